#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "latfold/encoded.hpp"
#include "latfold/lattice.hpp"
#include "latfold/polynomial.hpp"
#include "latfold/potentials.hpp"

namespace latfold::turn_circuit {

struct HCounts {
  std::int64_t total = 0;   // n(n+1)/2 adders in the full triangle
  std::int64_t redun = 0;   // n - ceil(log2(n+1)) zero output digits
  std::int64_t improv = 0;  // adders left after pruning the zero planes
};

HCounts h_counts(std::int64_t n);

/// Output digits needed to hold the sum of n input bits.
int sum_width(int n);

/// carry = x AND y, sum = x XOR y, as polynomials (2*carry + sum = x + y).
std::pair<Polynomial, Polynomial> half_adder(const Polynomial& x,
                                             const Polynomial& y);

Polynomial xor_poly(const Polynomial& a, const Polynomial& b);
Polynomial xnor_poly(const Polynomial& a, const Polynomial& b);

/// Adder count of the sum network over the given number of inputs, using
/// the same construction loop as the polynomial build.
std::int64_t sum_network_size(int inputs, bool pruned);

struct SumString {
  int i = 0, j = 0;
  Direction dir = Direction::PlusX;
  std::vector<Polynomial> bits;  // bits[r-1] is digit r, r = 1 least significant
  std::int64_t adders = 0;
};

/// Digit polynomials of the number of turns taken in `dir` between residues
/// i and j (turns i..j-1; the fixed turns 0 and 1 enter as constant and
/// affine inputs).
SumString build_sum_string(int i, int j, Direction dir, int n, LatticeKind kind,
                           bool pruned = true);

/// 0/1 polynomial that is 1 exactly when residues i and j sit on the same
/// vertex (j - i even).
Polynomial overlap_term(int i, int j, int n, LatticeKind kind,
                        std::int64_t* adders = nullptr);

Polynomial build_h_olap(int n, double lambda, LatticeKind kind,
                        std::int64_t* adders = nullptr);

/// Published closed-form adjacency test along the given axis (0 = x).
Polynomial adjacency(int i, int j, int axis, int n, LatticeKind kind,
                     std::int64_t* adders = nullptr);

/// Ground-truth adjacency indicator, interpolated from the position
/// differences over every assignment of the turns between i and j.
Polynomial adjacency_indicator(int i, int j, int axis, int n, LatticeKind kind);

Polynomial build_h_pair(int n, const InteractionMatrix& P, LatticeKind kind,
                        std::int64_t* adders = nullptr);

/// Variable registry of the circuit encoding: the 3N-8 (cubic) or 2N-5
/// (planar) turn bits, nothing else.
VariableRegistry turn_registry(int n, LatticeKind kind);

/// H = H_olap + H_pair over exactly the turn bits; no ancillas, unbounded
/// locality (recorded in the metadata).
EncodedProblem encode(const std::string& sequence, const InteractionMatrix& P,
                      LatticeKind kind, double lambda_olap = 0.0);

}  // namespace latfold::turn_circuit
