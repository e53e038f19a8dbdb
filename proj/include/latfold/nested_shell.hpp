#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "latfold/encoded.hpp"
#include "latfold/lattice.hpp"
#include "latfold/polynomial.hpp"
#include "latfold/potentials.hpp"

namespace latfold::nested_shell {

/// Position-flag space on the cubic grid: residue i may occupy any vertex
/// of V_i = S_i, the parity ball {v : |v|_1 <= i and |v|_1 = i (mod 2)}.
/// One flag qubit per (residue, vertex) pair.
struct ShellSpace {
  int n = 0;
  struct Qubit {
    int residue = 0;
    Vec3 vertex{};
  };
  std::vector<Qubit> qubits;
  std::vector<int> offsets;                   // gamma(i); offsets[n] = total
  std::map<Vec3, std::vector<int>> by_vertex; // theta
  std::vector<std::vector<int>> adjacent;     // eta, qubit -> qubit ids

  int total_qubits() const { return offsets.back(); }
  int q_begin(int i) const { return offsets[i]; }
  int q_end(int i) const { return offsets[i + 1]; }
  int vertex_set_size(int i) const { return offsets[i + 1] - offsets[i]; }
  /// Flag index for residue i at vertex v, or -1.
  int qubit_at(int i, Vec3 v) const;
  VariableRegistry registry() const;
};

/// |S_i| by direct enumeration.
int shell_size(int i);

ShellSpace build_space(int n);

struct Lambdas {
  double one = 0.0, conn = 0.0, olap = 0.0;
};

/// Defaults: conn = olap = 1 + sum|P|; one additionally dominates the links
/// and contacts a single extra flag can buy (12*conn + 6*n*max|P| + 1),
/// since a duplicate flag gains up to 12 chain links and 6n contacts.
Lambdas default_lambdas(int n, const InteractionMatrix& P);

Polynomial build_h_one(const ShellSpace& space, double lambda);
Polynomial build_h_conn(const ShellSpace& space, double lambda);
Polynomial build_h_olap(const ShellSpace& space, double lambda);
Polynomial build_h_pair(const ShellSpace& space, const InteractionMatrix& P);

/// 2-local H = H_one + H_conn + H_pair + H_olap.
EncodedProblem encode(const std::string& sequence, const InteractionMatrix& P,
                      const Lambdas& lambdas = {});

/// One-hot assignment flagging each residue at the given chain position.
std::vector<std::uint8_t> assignment_for_placement(const ShellSpace& space,
                                                   const std::vector<Vec3>& coords);

struct ValidEnumeration {
  double min_energy = 0.0;
  std::vector<std::vector<Vec3>> minimizers;
  std::uint64_t placement_count = 0;
};

/// Exhaustive walk over every valid placement (self-avoiding chain from the
/// origin). Under dominant penalties these are exactly the assignments that
/// can reach the ground energy, so the minimum here is the ground energy.
ValidEnumeration enumerate_valid(const ShellSpace& space,
                                 const InteractionMatrix& P);

}  // namespace latfold::nested_shell
