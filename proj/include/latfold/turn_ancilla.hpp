#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "latfold/encoded.hpp"
#include "latfold/lattice.hpp"
#include "latfold/polynomial.hpp"
#include "latfold/potentials.hpp"

namespace latfold::turn_ancilla {

/// Turn symbols a 3-bit group can take: six directions plus the two bit
/// strings that name no direction.
enum class TurnSymbol : int {
  PlusX, MinusX, PlusY, MinusY, PlusZ, MinusZ, Invalid000, Invalid011
};

TurnSymbol to_symbol(Direction d);

/// Index of the first bit of turn j in the solution string (j >= 2).
VarIndex turn_group_start(int j, LatticeKind kind);

/// 0/1 indicator of turn j taking the given symbol, as a polynomial over
/// that turn's bit group. Degree 3 (cubic) or 2 (planar).
Polynomial direction_indicator(int j, TurnSymbol symbol, int n, LatticeKind kind);

/// Displacement polynomials (dx, dy, dz) contributed by turn p, including
/// the fixed turn 0 and the one-bit turn 1.
std::array<Polynomial, 3> turn_step_polynomials(int p, LatticeKind kind);

/// Position of residue m relative to the origin.
std::array<Polynomial, 3> position_polynomials(int m, int n, LatticeKind kind);

/// Squared lattice distance between residues j and k; multilinear, at most
/// 4-local, bounded by (j-k)^2.
Polynomial distance_poly(int j, int k, int n, LatticeKind kind);

/// Slack width for pair (i,j): 0 for odd separation, ceil(2*log2|i-j|)
/// otherwise.
int mu(int i, int j);

struct SlackRegister {
  int i = 0, j = 0;
  int width = 0;    // mu(i,j)
  int pointer = 0;  // index of the first (most significant) ancilla
};

struct FlagVar {
  int i = 0, j = 0;
  int var = 0;
};

/// Variable layout: turn block, then slack registers in ascending (i,j)
/// order, then interaction flags. Flags exist only for pairs with a
/// nonzero interaction energy.
struct Layout {
  int n = 0;
  LatticeKind kind = LatticeKind::Cubic;
  int turn_bits = 0;
  std::vector<SlackRegister> slacks;
  std::vector<FlagVar> flags;

  int total_vars() const;
  int slack_pointer(int i, int j) const;  // throws NoSlackRegisterError
  const FlagVar* find_flag(int i, int j) const;
  VariableRegistry registry() const;
};

Layout make_layout(int n, const InteractionMatrix& P, LatticeKind kind);

/// Closed-form variable count for an n-residue problem with every
/// odd-separation pair interacting (the worst case the layout can reach).
long closed_form_qubit_count(int n, LatticeKind kind);

struct Lambdas {
  double back = 0.0, redun = 0.0, olap = 0.0;
};

/// Default penalty: 1 + sum over pairs of |P_ij|, so one violation always
/// costs more than every contact reward combined.
double default_lambda(const InteractionMatrix& P);

Polynomial build_h_back(int n, double lambda, LatticeKind kind);
Polynomial build_h_redun(int n, double lambda, LatticeKind kind);
Polynomial build_h_olap(const Layout& layout, double lambda);
Polynomial build_h_pair(const Layout& layout, const InteractionMatrix& P);

EncodedProblem encode(const std::string& sequence, const InteractionMatrix& P,
                      LatticeKind kind, const Lambdas& lambdas = {});

/// Cheapest ancilla completion of a turn-bit assignment: slack registers
/// set to clamp(2^mu - D, 0, 2^mu - 1), flags set where they lower energy.
std::vector<std::uint8_t> complete_with_optimal_ancillas(
    const Layout& layout, const InteractionMatrix& P,
    std::span<const std::uint8_t> turn_bits);

/// Random-restart distribution for annealing runs: draws a uniform random
/// symmetry-fixed self-avoiding fold whose first `fixed_prefix` turn bits
/// match the assignment (subproblem splitting pins those), then fills every
/// ancilla register with its cheapest value for the drawn turns. Restarting
/// from valid configurations is what makes single-flip sampling productive
/// here: the slack registers couple turns so stiffly that cold random
/// starts relax into stretched zero-contact folds instead.
std::function<void(std::mt19937_64&, std::vector<std::uint8_t>&)>
valid_fold_initializer(const Layout& layout, const InteractionMatrix& P,
                       const std::string& sequence, int fixed_prefix = 0);

/// Penalty/contact bookkeeping for a turn-bit assignment, computed from
/// decoded geometry rather than the Hamiltonian; tests compare the two.
struct TurnAssignmentAudit {
  int reversals = 0;       // adjacent opposite moves (valid codes only)
  int invalid_codes = 0;   // 000/011 groups
  int overlap_pairs = 0;   // even-separation pairs on the same vertex
  double contact_energy = 0.0;
};

TurnAssignmentAudit audit_turn_assignment(const Layout& layout,
                                          const InteractionMatrix& P,
                                          std::span<const std::uint8_t> turn_bits);

}  // namespace latfold::turn_ancilla
