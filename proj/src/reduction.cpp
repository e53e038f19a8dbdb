#include "latfold/reduction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

namespace latfold::reduction {

namespace {

using Pair = std::pair<VarIndex, VarIndex>;

// Most frequent pair among terms of degree >= 3; ties broken towards the
// lexicographically smallest pair, for deterministic gadget ordering.
Pair select_pair(const Polynomial& p, bool& found) {
  std::map<Pair, int> counts;
  for (const auto& [t, c] : p.terms()) {
    if (t.degree() < 3) continue;
    const auto& vars = t.vars();
    for (std::size_t a = 0; a < vars.size(); ++a) {
      for (std::size_t b = a + 1; b < vars.size(); ++b) {
        counts[{vars[a], vars[b]}]++;
      }
    }
  }
  found = !counts.empty();
  Pair best{0, 0};
  int best_count = 0;
  for (const auto& [pair, count] : counts) {
    if (count > best_count) {
      best = pair;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

ReductionResult reduce_to_quadratic(const Polynomial& p, VarIndex first_ancilla) {
  ReductionResult out;
  out.reduced = p;
  VarIndex next = first_ancilla;
  while (out.reduced.degree() > 2) {
    bool found = false;
    Pair pair = select_pair(out.reduced, found);
    if (!found) break;
    auto [u, v] = pair;
    VarIndex w = next++;

    Polynomial rewritten;
    double affected = 0.0;
    for (const auto& [t, c] : out.reduced.terms()) {
      if (t.degree() >= 3 && t.contains(u) && t.contains(v)) {
        Term sub = t.without(u, v).merged_with(Term{w});
        rewritten.add_term(sub, c);
        affected += std::abs(c);
      } else {
        rewritten.add_term(t, c);
      }
    }
    double m = 1.0 + 2.0 * affected;
    rewritten.add_term(Term{u, v}, m);
    rewritten.add_term(Term{u, w}, -2.0 * m);
    rewritten.add_term(Term{v, w}, -2.0 * m);
    rewritten.add_term(Term{w}, 3.0 * m);

    out.reduced = std::move(rewritten);
    out.map.gadgets.push_back({w, u, v, m});
  }
  return out;
}

EncodedProblem reduce(const EncodedProblem& problem) {
  EncodedProblem out = problem;
  auto result = reduce_to_quadratic(problem.hamiltonian,
                                    static_cast<VarIndex>(problem.num_vars()));
  out.hamiltonian = std::move(result.reduced);
  out.reduction = result.map;
  for (const Gadget& g : out.reduction.gadgets) {
    out.registry.vars.push_back({VarRole::ReductionAncilla,
                                 static_cast<std::int32_t>(g.u),
                                 static_cast<std::int32_t>(g.v), -1, {}});
  }
  out.metadata["max_degree"] = std::to_string(out.hamiltonian.degree());
  out.metadata["reduction_gadgets"] = std::to_string(out.reduction.gadgets.size());
  return out;
}

namespace {

// Mask-compiled form for fast exhaustive sweeps over <= 32 variables.
struct MaskedPoly {
  double constant = 0.0;
  std::vector<std::uint32_t> masks;
  std::vector<double> coeffs;
  std::vector<std::vector<std::uint32_t>> var_terms;

  static MaskedPoly compile(const Polynomial& p, int num_vars) {
    MaskedPoly mp;
    mp.var_terms.resize(num_vars);
    for (const auto& [t, c] : p.terms()) {
      if (t.is_constant()) {
        mp.constant += c;
        continue;
      }
      std::uint32_t mask = 0;
      for (VarIndex v : t.vars()) mask |= 1u << v;
      std::uint32_t id = static_cast<std::uint32_t>(mp.masks.size());
      mp.masks.push_back(mask);
      mp.coeffs.push_back(c);
      for (VarIndex v : t.vars()) mp.var_terms[v].push_back(id);
    }
    return mp;
  }

  double evaluate(std::uint32_t x) const {
    double e = constant;
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if ((x & masks[t]) == masks[t]) e += coeffs[t];
    }
    return e;
  }
};

}  // namespace

VerifyReport verify_reduction(const Polynomial& original, int original_vars,
                              const Polynomial& reduced, const ReductionMap& map,
                              int cap) {
  const int total = original_vars + static_cast<int>(map.gadgets.size());
  if (total > cap) {
    throw CapExceededError("reduction certificate needs " + std::to_string(total) +
                           " variables, cap is " + std::to_string(cap));
  }
  if (auto mv = reduced.max_var(); mv && static_cast<int>(*mv) >= total) {
    throw CapExceededError("reduced polynomial references variables beyond the map");
  }
  VerifyReport report;

  const std::uint64_t orig_states = 1ull << original_vars;
  const std::uint32_t orig_mask = static_cast<std::uint32_t>(orig_states - 1);
  std::vector<double> min_over_ancilla(orig_states,
                                       std::numeric_limits<double>::infinity());
  MaskedPoly mp = MaskedPoly::compile(reduced, total);

  // Gray-code sweep over every (original, ancilla) assignment.
  double reduced_min = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> reduced_argmins;
  std::uint32_t x = 0;
  double energy = mp.evaluate(0);
  const std::uint64_t states = 1ull << total;
  for (std::uint64_t step = 0;; ++step) {
    std::uint32_t xo = x & orig_mask;
    min_over_ancilla[xo] = std::min(min_over_ancilla[xo], energy);
    if (energy < reduced_min - kValueTol) {
      reduced_min = energy;
      reduced_argmins.assign(1, xo);
    } else if (std::abs(energy - reduced_min) <= kValueTol) {
      reduced_argmins.push_back(xo);
    }
    if (step + 1 == states) break;
    int b = std::countr_zero(step + 1);
    std::uint32_t bit = 1u << b;
    if (x & bit) {
      for (std::uint32_t t : mp.var_terms[b]) {
        if ((x & mp.masks[t]) == mp.masks[t]) energy -= mp.coeffs[t];
      }
      x ^= bit;
    } else {
      x ^= bit;
      for (std::uint32_t t : mp.var_terms[b]) {
        if ((x & mp.masks[t]) == mp.masks[t]) energy += mp.coeffs[t];
      }
    }
    if (((step + 1) & 0xFFFF) == 0) energy = mp.evaluate(x);  // drift control
  }

  double original_min = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> original_argmins;
  report.energy_preserved = true;
  MaskedPoly mo = MaskedPoly::compile(original, original_vars);
  for (std::uint64_t xo = 0; xo < orig_states; ++xo) {
    double e = mo.evaluate(static_cast<std::uint32_t>(xo));
    if (std::abs(e - min_over_ancilla[xo]) > kValueTol) {
      report.energy_preserved = false;
    }
    if (e < original_min - kValueTol) {
      original_min = e;
      original_argmins.assign(1, static_cast<std::uint32_t>(xo));
    } else if (std::abs(e - original_min) <= kValueTol) {
      original_argmins.push_back(static_cast<std::uint32_t>(xo));
    }
  }

  std::sort(reduced_argmins.begin(), reduced_argmins.end());
  reduced_argmins.erase(std::unique(reduced_argmins.begin(), reduced_argmins.end()),
                        reduced_argmins.end());
  report.min_original = original_min;
  report.min_reduced = reduced_min;
  report.original_minimizers = original_argmins.size();
  report.argmin_preserved = reduced_argmins == original_argmins &&
                            std::abs(original_min - reduced_min) <= kValueTol;
  return report;
}

}  // namespace latfold::reduction
