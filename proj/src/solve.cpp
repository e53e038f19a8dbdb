#include "latfold/solve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace latfold::solve {

CompiledProblem CompiledProblem::build(const Polynomial& p, std::uint32_t num_vars) {
  if (auto mv = p.max_var(); mv && *mv >= num_vars) {
    throw IndexOutOfRangeError("polynomial references variable " +
                               std::to_string(*mv) + " beyond declared count " +
                               std::to_string(num_vars));
  }
  CompiledProblem cp;
  cp.num_vars = num_vars;
  cp.term_off.push_back(0);
  std::vector<std::uint32_t> loads(num_vars, 0);
  for (const auto& [t, c] : p.terms()) {
    if (t.is_constant()) {
      cp.constant += c;
      continue;
    }
    cp.coeff.push_back(c);
    for (VarIndex v : t.vars()) {
      cp.term_vars.push_back(v);
      loads[v]++;
    }
    cp.term_off.push_back(static_cast<std::uint32_t>(cp.term_vars.size()));
  }
  cp.var_off.assign(num_vars + 1, 0);
  std::partial_sum(loads.begin(), loads.end(), cp.var_off.begin() + 1);
  cp.var_terms.resize(cp.term_vars.size());
  std::vector<std::uint32_t> cursor(cp.var_off.begin(), cp.var_off.end() - 1);
  for (std::uint32_t t = 0; t + 1 < cp.term_off.size(); ++t) {
    for (std::uint32_t k = cp.term_off[t]; k < cp.term_off[t + 1]; ++k) {
      cp.var_terms[cursor[cp.term_vars[k]]++] = t;
    }
  }
  return cp;
}

double CompiledProblem::evaluate(std::span<const std::uint8_t> bits) const {
  double e = constant;
  for (std::uint32_t t = 0; t + 1 < term_off.size(); ++t) {
    bool active = true;
    for (std::uint32_t k = term_off[t]; k < term_off[t + 1]; ++k) {
      if (!bits[term_vars[k]]) {
        active = false;
        break;
      }
    }
    if (active) e += coeff[t];
  }
  return e;
}

void EvalState::init(const CompiledProblem& problem,
                     std::vector<std::uint8_t> assignment) {
  cp = &problem;
  bits = std::move(assignment);
  zeros.assign(problem.term_count(), 0);
  energy = problem.constant;
  for (std::uint32_t t = 0; t < problem.term_count(); ++t) {
    std::uint16_t z = 0;
    for (std::uint32_t k = problem.term_off[t]; k < problem.term_off[t + 1]; ++k) {
      if (!bits[problem.term_vars[k]]) ++z;
    }
    zeros[t] = z;
    if (z == 0) energy += problem.coeff[t];
  }
}

double EvalState::flip_delta(std::uint32_t v) const {
  double s = 0.0;
  if (bits[v]) {
    for (std::uint32_t k = cp->var_off[v]; k < cp->var_off[v + 1]; ++k) {
      std::uint32_t t = cp->var_terms[k];
      if (zeros[t] == 0) s -= cp->coeff[t];
    }
  } else {
    for (std::uint32_t k = cp->var_off[v]; k < cp->var_off[v + 1]; ++k) {
      std::uint32_t t = cp->var_terms[k];
      if (zeros[t] == 1) s += cp->coeff[t];
    }
  }
  return s;
}

void EvalState::flip(std::uint32_t v) {
  if (bits[v]) {
    bits[v] = 0;
    for (std::uint32_t k = cp->var_off[v]; k < cp->var_off[v + 1]; ++k) {
      std::uint32_t t = cp->var_terms[k];
      if (zeros[t] == 0) energy -= cp->coeff[t];
      zeros[t]++;
    }
  } else {
    bits[v] = 1;
    for (std::uint32_t k = cp->var_off[v]; k < cp->var_off[v + 1]; ++k) {
      std::uint32_t t = cp->var_terms[k];
      zeros[t]--;
      if (zeros[t] == 0) energy += cp->coeff[t];
    }
  }
}

namespace {

constexpr double kCandidateBand = 1e-6;

struct BlockResult {
  double local_min = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> candidates;  // gray step indices
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

ExhaustiveResult exhaustive_solve(const CompiledProblem& cp,
                                  const std::vector<VarIndex>& free_vars,
                                  const std::vector<std::uint8_t>& base,
                                  const ExhaustiveOptions& options) {
  const int m = static_cast<int>(free_vars.size());
  if (m > options.max_vars) {
    throw TooLargeError("exhaustive solve over " + std::to_string(m) +
                        " variables exceeds the cap " +
                        std::to_string(options.max_vars));
  }
  ExhaustiveResult result;
  if (m == 0) {
    result.min_energy = cp.evaluate(base);
    result.minimizers.push_back(base);
    return result;
  }

  // Gray position 0 flips every other step; give it the lightest variable.
  std::vector<VarIndex> order = free_vars;
  std::stable_sort(order.begin(), order.end(), [&cp](VarIndex a, VarIndex b) {
    return cp.term_load(a) < cp.term_load(b);
  });

  const int block_bits = options.parallel ? std::clamp(m - 16, 0, 8) : 0;
  const int low_bits = m - block_bits;
  const std::uint64_t steps = 1ull << low_bits;
  const std::uint32_t blocks = 1u << block_bits;

  std::vector<BlockResult> block_results(blocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (block_bits > 0)
#endif
  for (std::uint32_t blk = 0; blk < blocks; ++blk) {
    std::vector<std::uint8_t> bits = base;
    for (int p = 0; p < m; ++p) bits[order[p]] = 0;
    for (int b = 0; b < block_bits; ++b) {
      bits[order[low_bits + b]] = (blk >> b) & 1;
    }
    EvalState state;
    state.init(cp, std::move(bits));
    BlockResult& out = block_results[blk];
    out.local_min = state.energy;
    out.candidates.push_back(0);
    for (std::uint64_t s = 1; s < steps; ++s) {
      state.flip(order[std::countr_zero(s)]);
      if ((s & 0xFFFF) == 0) state.resync();
      if (state.energy < out.local_min - kCandidateBand) {
        out.local_min = state.energy;
        out.candidates.clear();
        out.candidates.push_back(s);
      } else if (state.energy <= out.local_min + kCandidateBand) {
        out.candidates.push_back(s);
      }
    }
  }

  // Re-evaluate every candidate from scratch; incremental drift never
  // decides membership in the minimizer set.
  auto candidate_bits = [&](std::uint32_t blk, std::uint64_t s) {
    std::vector<std::uint8_t> bits = base;
    std::uint64_t gray = s ^ (s >> 1);
    for (int p = 0; p < low_bits; ++p) bits[order[p]] = (gray >> p) & 1;
    for (int b = 0; b < block_bits; ++b) {
      bits[order[low_bits + b]] = (blk >> b) & 1;
    }
    return bits;
  };

  double global_min = std::numeric_limits<double>::infinity();
  for (std::uint32_t blk = 0; blk < blocks; ++blk) {
    for (std::uint64_t s : block_results[blk].candidates) {
      global_min = std::min(global_min, cp.evaluate(candidate_bits(blk, s)));
    }
  }
  result.min_energy = global_min;
  for (std::uint32_t blk = 0; blk < blocks; ++blk) {
    for (std::uint64_t s : block_results[blk].candidates) {
      auto bits = candidate_bits(blk, s);
      if (std::abs(cp.evaluate(bits) - global_min) <= kValueTol) {
        result.minimizers.push_back(std::move(bits));
      }
    }
  }
  std::sort(result.minimizers.begin(), result.minimizers.end());
  result.minimizers.erase(
      std::unique(result.minimizers.begin(), result.minimizers.end()),
      result.minimizers.end());
  return result;
}

ExhaustiveResult exhaustive_solve(const Polynomial& p, std::uint32_t num_vars,
                                  const ExhaustiveOptions& options) {
  CompiledProblem cp = CompiledProblem::build(p, num_vars);
  std::vector<VarIndex> free_vars(num_vars);
  std::iota(free_vars.begin(), free_vars.end(), 0);
  return exhaustive_solve(cp, free_vars, std::vector<std::uint8_t>(num_vars, 0),
                          options);
}

ExhaustiveResult exhaustive_solve_reference(const Polynomial& p,
                                            std::uint32_t num_vars) {
  if (num_vars > 24) throw TooLargeError("reference solver cap is 24 variables");
  ExhaustiveResult result;
  result.min_energy = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> bits(num_vars, 0);
  for (std::uint64_t x = 0; x < (1ull << num_vars); ++x) {
    for (std::uint32_t b = 0; b < num_vars; ++b) bits[b] = (x >> b) & 1;
    double e = p.evaluate(bits);
    if (e < result.min_energy - kValueTol) {
      result.min_energy = e;
      result.minimizers.assign(1, bits);
    } else if (std::abs(e - result.min_energy) <= kValueTol) {
      result.minimizers.push_back(bits);
    }
  }
  std::sort(result.minimizers.begin(), result.minimizers.end());
  return result;
}

Schedule resolve_schedule(const Polynomial& p, Schedule schedule) {
  if (schedule.t_hot <= 0.0) {
    schedule.t_hot = p.abs_coefficient_sum();
    if (schedule.t_hot <= 0.0) schedule.t_hot = 1.0;
  }
  if (schedule.t_cold <= 0.0) {
    double smallest = p.min_abs_coefficient();
    schedule.t_cold = smallest > 0.0 ? 1e-3 * smallest : 1e-3;
  }
  if (schedule.t_cold >= schedule.t_hot) schedule.t_cold = schedule.t_hot * 1e-6;
  return schedule;
}

std::vector<Sample> simulated_annealing(const CompiledProblem& cp,
                                        const std::vector<VarIndex>& free_vars,
                                        const std::vector<std::uint8_t>& base,
                                        int num_samples, const SaOptions& options) {
  std::vector<Sample> samples(static_cast<std::size_t>(std::max(0, num_samples)));
  const Schedule& sched = options.schedule;
  if (sched.sweeps > 0 && (sched.t_hot <= 0.0 || sched.t_cold <= 0.0)) {
    throw Error("annealing schedule must be resolved before sampling");
  }
  const double ratio = sched.t_cold / sched.t_hot;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (options.parallel)
#endif
  for (int i = 0; i < num_samples; ++i) {
    std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(0x5151ull + i)));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<std::uint8_t> bits = base;
    for (VarIndex v : free_vars) bits[v] = rng() & 1;
    if (options.initializer) options.initializer(rng, bits);
    if (sched.sweeps > 0 && !free_vars.empty()) {
      EvalState state;
      state.init(cp, std::move(bits));
      for (int sweep = 0; sweep < sched.sweeps; ++sweep) {
        double t = sched.sweeps == 1
                       ? sched.t_hot
                       : sched.t_hot * std::pow(ratio, static_cast<double>(sweep) /
                                                           (sched.sweeps - 1));
        for (VarIndex v : free_vars) {
          double d = state.flip_delta(v);
          if (d <= 0.0 || uniform(rng) < std::exp(-d / t)) state.flip(v);
        }
      }
      bits = std::move(state.bits);
    }
    samples[i].energy = cp.evaluate(bits);
    samples[i].bits = std::move(bits);
  }
  return samples;
}

std::vector<Sample> simulated_annealing(const Polynomial& p,
                                        std::uint32_t num_vars, int num_samples,
                                        const SaOptions& options) {
  CompiledProblem cp = CompiledProblem::build(p, num_vars);
  std::vector<VarIndex> free_vars(num_vars);
  std::iota(free_vars.begin(), free_vars.end(), 0);
  SaOptions resolved = options;
  resolved.schedule = resolve_schedule(p, options.schedule);
  return simulated_annealing(cp, free_vars, std::vector<std::uint8_t>(num_vars, 0),
                             num_samples, resolved);
}

Sample single_flip_descent(const CompiledProblem& cp,
                           const std::vector<VarIndex>& free_vars, Sample sample) {
  EvalState state;
  state.init(cp, std::move(sample.bits));

  // U[v] = sum of coefficients of terms whose other variables are all set;
  // the flip delta is +-U[v] and stays maintainable under flips.
  std::vector<double> u(cp.num_vars, 0.0);
  for (std::uint32_t t = 0; t < cp.term_count(); ++t) {
    if (state.zeros[t] == 0) {
      for (std::uint32_t k = cp.term_off[t]; k < cp.term_off[t + 1]; ++k) {
        u[cp.term_vars[k]] += cp.coeff[t];
      }
    } else if (state.zeros[t] == 1) {
      for (std::uint32_t k = cp.term_off[t]; k < cp.term_off[t + 1]; ++k) {
        if (!state.bits[cp.term_vars[k]]) {
          u[cp.term_vars[k]] += cp.coeff[t];
          break;
        }
      }
    }
  }

  auto delta_of = [&](VarIndex v) { return state.bits[v] ? -u[v] : u[v]; };
  for (long guard = 0; guard < 4'000'000; ++guard) {
    VarIndex best = 0;
    double best_delta = 0.0;
    bool found = false;
    for (VarIndex v : free_vars) {
      double d = delta_of(v);
      if (d < best_delta - 1e-12 || (!found && d < -1e-12)) {
        best = v;
        best_delta = d;
        found = true;
      }
    }
    if (!found) break;

    // apply the flip and patch U for every co-occurring variable
    bool setting = !state.bits[best];
    state.bits[best] = setting;
    for (std::uint32_t k = cp.var_off[best]; k < cp.var_off[best + 1]; ++k) {
      std::uint32_t t = cp.var_terms[k];
      double c = cp.coeff[t];
      if (setting) {
        std::uint16_t z = --state.zeros[t];
        if (z == 0) {
          state.energy += c;
          for (std::uint32_t q = cp.term_off[t]; q < cp.term_off[t + 1]; ++q) {
            if (cp.term_vars[q] != best) u[cp.term_vars[q]] += c;
          }
        } else if (z == 1) {
          for (std::uint32_t q = cp.term_off[t]; q < cp.term_off[t + 1]; ++q) {
            VarIndex w = cp.term_vars[q];
            if (!state.bits[w]) {
              u[w] += c;
              break;
            }
          }
        }
      } else {
        std::uint16_t z = state.zeros[t]++;
        if (z == 0) {
          state.energy -= c;
          for (std::uint32_t q = cp.term_off[t]; q < cp.term_off[t + 1]; ++q) {
            if (cp.term_vars[q] != best) u[cp.term_vars[q]] -= c;
          }
        } else if (z == 1) {
          for (std::uint32_t q = cp.term_off[t]; q < cp.term_off[t + 1]; ++q) {
            VarIndex w = cp.term_vars[q];
            if (!state.bits[w] && w != best) {
              u[w] -= c;
              break;
            }
          }
        }
      }
    }
  }

  sample.bits = std::move(state.bits);
  sample.energy = cp.evaluate(sample.bits);
  sample.postprocessed = true;
  return sample;
}

Sample single_flip_descent(const Polynomial& p, std::uint32_t num_vars,
                           Sample sample) {
  CompiledProblem cp = CompiledProblem::build(p, num_vars);
  std::vector<VarIndex> free_vars(num_vars);
  std::iota(free_vars.begin(), free_vars.end(), 0);
  return single_flip_descent(cp, free_vars, std::move(sample));
}

Polynomial spin_reversal_gauge(const Polynomial& p,
                               std::span<const std::int8_t> gauge) {
  if (p.degree() > 2) {
    throw NotQuadraticError("spin reversal gauges apply to 2-local problems only");
  }
  auto flipped = [&gauge](VarIndex v) {
    return v < gauge.size() && gauge[v] == -1;
  };
  Polynomial out;
  for (const auto& [t, c] : p.terms()) {
    Polynomial factor = Polynomial::constant(c);
    for (VarIndex v : t.vars()) {
      factor = factor * Polynomial::literal(v, flipped(v));
    }
    out += factor;
  }
  return out;
}

std::vector<Subproblem> split_subproblems(const Polynomial& p, int k) {
  if (k < 0 || k > 30) throw TooLargeError("split count k must be in [0, 30]");
  std::vector<Subproblem> out;
  out.reserve(1ull << k);
  for (std::uint32_t id = 0; id < (1u << k); ++id) {
    Subproblem sub;
    sub.id = id;
    sub.prefix.resize(k);
    PartialAssignment fixed;
    for (int r = 0; r < k; ++r) {
      std::uint8_t bit = (id >> (k - 1 - r)) & 1;  // big-endian pattern
      sub.prefix[r] = bit;
      fixed[static_cast<VarIndex>(r)] = bit;
    }
    sub.poly = p.fix(fixed);
    out.push_back(std::move(sub));
  }
  return out;
}

RunStats compute_stats(std::uint64_t hits, std::uint64_t total,
                       double t_sample_us, bool strict) {
  if (total == 0) throw DegenerateProbabilityError("no samples");
  if (strict && (hits == 0 || hits == total)) {
    throw DegenerateProbabilityError("success probability is degenerate: " +
                                     std::to_string(hits) + "/" +
                                     std::to_string(total));
  }
  RunStats stats;
  stats.total = total;
  stats.hits = hits;
  stats.t_sample_us = t_sample_us;
  stats.p_s = static_cast<double>(hits) / static_cast<double>(total);
  if (hits == 0) {
    stats.r99_finite = false;
    stats.r99 = 0;
    stats.tts_s = std::numeric_limits<double>::infinity();
    return stats;
  }
  if (hits == total) {
    stats.r99 = 1;
  } else {
    stats.r99 = static_cast<std::uint64_t>(
        std::ceil(std::log(1.0 - 0.99) / std::log1p(-stats.p_s)));
  }
  stats.tts_s = static_cast<double>(stats.r99) * t_sample_us * 1e-6;
  return stats;
}

std::uint64_t count_hits(const std::vector<Sample>& samples, double ground_energy,
                         double tol) {
  std::uint64_t hits = 0;
  for (const Sample& s : samples) {
    if (std::abs(s.energy - ground_energy) <= tol) ++hits;
  }
  return hits;
}

std::string stats_text(const RunStats& stats) {
  std::ostringstream os;
  char buf[64];
  os << "total " << stats.total << '\n';
  os << "hits " << stats.hits << '\n';
  std::snprintf(buf, sizeof(buf), "%.10g", stats.p_s);
  os << "p_s " << buf << '\n';
  os << "r99 " << (stats.r99_finite ? std::to_string(stats.r99) : "inf") << '\n';
  std::snprintf(buf, sizeof(buf), "%.10g", stats.t_sample_us);
  os << "t_sample_us " << buf << '\n';
  if (stats.r99_finite) {
    std::snprintf(buf, sizeof(buf), "%.10g", stats.tts_s);
    os << "tts_s " << buf << '\n';
  } else {
    os << "tts_s inf\n";
  }
  return os.str();
}

std::string stats_json(const RunStats& stats) {
  std::ostringstream os;
  char buf[64];
  os << "{\"total\":" << stats.total << ",\"hits\":" << stats.hits;
  std::snprintf(buf, sizeof(buf), "%.10g", stats.p_s);
  os << ",\"p_s\":" << buf;
  if (stats.r99_finite) {
    os << ",\"r99\":" << stats.r99;
  } else {
    os << ",\"r99\":null";
  }
  std::snprintf(buf, sizeof(buf), "%.10g", stats.t_sample_us);
  os << ",\"t_sample_us\":" << buf;
  if (stats.r99_finite) {
    std::snprintf(buf, sizeof(buf), "%.10g", stats.tts_s);
    os << ",\"tts_s\":" << buf;
  } else {
    os << ",\"tts_s\":null";
  }
  os << "}";
  return os.str();
}

}  // namespace latfold::solve
