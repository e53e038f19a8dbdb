#include "latfold/nested_shell.hpp"

#include <algorithm>
#include <cmath>

namespace latfold::nested_shell {

namespace {

std::vector<Vec3> parity_ball(int i) {
  std::vector<Vec3> out;
  for (int x = -i; x <= i; ++x) {
    for (int y = -i; y <= i; ++y) {
      for (int z = -i; z <= i; ++z) {
        Vec3 v{x, y, z};
        if (v.l1() <= i && (v.l1() % 2) == (i % 2)) out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

constexpr Vec3 kSteps[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                            {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

}  // namespace

int shell_size(int i) { return static_cast<int>(parity_ball(i).size()); }

int ShellSpace::qubit_at(int i, Vec3 v) const {
  for (int q = q_begin(i); q < q_end(i); ++q) {
    if (qubits[q].vertex == v) return q;
  }
  return -1;
}

VariableRegistry ShellSpace::registry() const {
  VariableRegistry reg;
  reg.vars.reserve(qubits.size());
  for (const Qubit& q : qubits) {
    reg.vars.push_back({VarRole::Site, q.residue, -1, -1, q.vertex});
  }
  return reg;
}

ShellSpace build_space(int n) {
  if (n < 2) throw SequenceTooShortError("nested-shell space needs n >= 2");
  ShellSpace space;
  space.n = n;
  space.offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    space.offsets[i] = static_cast<int>(space.qubits.size());
    for (const Vec3& v : parity_ball(i)) space.qubits.push_back({i, v});
  }
  space.offsets[n] = static_cast<int>(space.qubits.size());
  for (int q = 0; q < space.offsets[n]; ++q) {
    space.by_vertex[space.qubits[q].vertex].push_back(q);
  }
  space.adjacent.resize(space.qubits.size());
  for (int q = 0; q < space.offsets[n]; ++q) {
    for (const Vec3& step : kSteps) {
      auto it = space.by_vertex.find(space.qubits[q].vertex + step);
      if (it == space.by_vertex.end()) continue;
      space.adjacent[q].insert(space.adjacent[q].end(), it->second.begin(),
                               it->second.end());
    }
    std::sort(space.adjacent[q].begin(), space.adjacent[q].end());
  }
  return space;
}

Lambdas default_lambdas(int n, const InteractionMatrix& P) {
  Lambdas lam;
  lam.conn = 1.0 + P.abs_sum();
  lam.olap = lam.conn;
  lam.one = 1.0 + 12.0 * lam.conn + 6.0 * n * P.max_abs();
  return lam;
}

Polynomial build_h_one(const ShellSpace& space, double lambda) {
  Polynomial h;
  for (int i = 0; i < space.n; ++i) {
    for (int a = space.q_begin(i); a < space.q_end(i); ++a) {
      for (int b = a + 1; b < space.q_end(i); ++b) {
        h.add_term(Term{static_cast<VarIndex>(a), static_cast<VarIndex>(b)}, lambda);
      }
    }
  }
  return h;
}

Polynomial build_h_conn(const ShellSpace& space, double lambda) {
  Polynomial h = Polynomial::constant(lambda * (space.n - 1));
  for (int i = 0; i + 1 < space.n; ++i) {
    for (int a = space.q_begin(i); a < space.q_end(i); ++a) {
      for (int b : space.adjacent[a]) {
        if (space.qubits[b].residue != i + 1) continue;
        h.add_term(Term{static_cast<VarIndex>(a), static_cast<VarIndex>(b)}, -lambda);
      }
    }
  }
  return h;
}

Polynomial build_h_olap(const ShellSpace& space, double lambda) {
  Polynomial h;
  for (const auto& [vertex, qubits] : space.by_vertex) {
    for (std::size_t a = 0; a < qubits.size(); ++a) {
      for (std::size_t b = a + 1; b < qubits.size(); ++b) {
        h.add_term(Term{static_cast<VarIndex>(qubits[a]),
                        static_cast<VarIndex>(qubits[b])},
                   lambda);
      }
    }
  }
  return h;
}

Polynomial build_h_pair(const ShellSpace& space, const InteractionMatrix& P) {
  // Unordered adjacent qubit pairs; the published 1/2 factor cancels the
  // double count that an ordered sum would produce.
  Polynomial h;
  for (int a = 0; a < space.total_qubits(); ++a) {
    for (int b : space.adjacent[a]) {
      if (b <= a) continue;
      double e = P.at(space.qubits[a].residue, space.qubits[b].residue);
      if (e == 0.0) continue;
      h.add_term(Term{static_cast<VarIndex>(a), static_cast<VarIndex>(b)}, e);
    }
  }
  return h;
}

EncodedProblem encode(const std::string& sequence, const InteractionMatrix& P,
                      const Lambdas& lambdas) {
  const int n = static_cast<int>(sequence.size());
  if (n < 2) throw SequenceTooShortError("nested-shell encoding needs n >= 2");
  Lambdas lam = lambdas;
  Lambdas fallback = default_lambdas(n, P);
  if (lam.one <= 0.0) lam.one = fallback.one;
  if (lam.conn <= 0.0) lam.conn = fallback.conn;
  if (lam.olap <= 0.0) lam.olap = fallback.olap;

  ShellSpace space = build_space(n);
  EncodedProblem problem;
  problem.encoder = "nested-shell";
  problem.sequence = sequence;
  problem.lattice = LatticeKind::Cubic;
  problem.lambdas = {{"one", lam.one}, {"conn", lam.conn}, {"olap", lam.olap}};
  problem.registry = space.registry();
  problem.hamiltonian = build_h_one(space, lam.one);
  problem.hamiltonian += build_h_conn(space, lam.conn);
  problem.hamiltonian += build_h_pair(space, P);
  problem.hamiltonian += build_h_olap(space, lam.olap);
  problem.metadata["max_degree"] = std::to_string(problem.hamiltonian.degree());
  problem.metadata["total_qubits"] = std::to_string(space.total_qubits());
  return problem;
}

std::vector<std::uint8_t> assignment_for_placement(const ShellSpace& space,
                                                   const std::vector<Vec3>& coords) {
  std::vector<std::uint8_t> bits(space.total_qubits(), 0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    int q = space.qubit_at(static_cast<int>(i), coords[i]);
    if (q < 0) {
      throw IndexOutOfRangeError("residue " + std::to_string(i) +
                                 " placed outside its vertex set");
    }
    bits[q] = 1;
  }
  return bits;
}

namespace {

void placement_dfs(const ShellSpace& space, const InteractionMatrix& P,
                   std::vector<Vec3>& chain, ValidEnumeration& result) {
  if (static_cast<int>(chain.size()) == space.n) {
    ++result.placement_count;
    double e = 0.0;
    for (int i = 0; i < space.n; ++i) {
      for (int j = i + 3; j < space.n; j += 2) {
        if (P.at(i, j) != 0.0 && (chain[j] - chain[i]).l1() == 1) e += P.at(i, j);
      }
    }
    if (result.minimizers.empty() || e < result.min_energy - kValueTol) {
      result.min_energy = e;
      result.minimizers.clear();
      result.minimizers.push_back(chain);
    } else if (std::abs(e - result.min_energy) <= kValueTol) {
      result.minimizers.push_back(chain);
    }
    return;
  }
  for (const Vec3& step : kSteps) {
    Vec3 next = chain.back() + step;
    if (std::find(chain.begin(), chain.end(), next) != chain.end()) continue;
    chain.push_back(next);
    placement_dfs(space, P, chain, result);
    chain.pop_back();
  }
}

}  // namespace

ValidEnumeration enumerate_valid(const ShellSpace& space,
                                 const InteractionMatrix& P) {
  ValidEnumeration result;
  std::vector<Vec3> chain{{0, 0, 0}};
  if (space.n == 1) {
    result.placement_count = 1;
    result.minimizers.push_back(chain);
    return result;
  }
  placement_dfs(space, P, chain, result);
  std::sort(result.minimizers.begin(), result.minimizers.end());
  return result;
}

}  // namespace latfold::nested_shell
