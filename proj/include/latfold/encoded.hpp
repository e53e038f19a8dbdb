#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latfold/lattice.hpp"
#include "latfold/polynomial.hpp"

namespace latfold {

enum class VarRole : std::uint8_t { Turn, Slack, Flag, Site, ReductionAncilla };

const char* var_role_name(VarRole r);

struct VarInfo {
  VarRole role = VarRole::Turn;
  // slack: (a,b) residue pair, r = bit position (0 = most significant)
  // flag:  (a,b) residue pair
  // site:  a = residue, site = grid vertex
  // reduction ancilla: (a,b) = substituted variable pair
  std::int32_t a = -1, b = -1, r = -1;
  Vec3 site{};

  friend bool operator==(const VarInfo&, const VarInfo&) = default;
};

struct VariableRegistry {
  std::vector<VarInfo> vars;

  std::size_t size() const { return vars.size(); }
  std::size_t count(VarRole role) const;

  friend bool operator==(const VariableRegistry&, const VariableRegistry&) = default;
};

/// One gadget of a degree reduction: ancilla w stands for the product u*v,
/// enforced by the penalty M*(uv - 2uw - 2vw + 3w).
struct Gadget {
  VarIndex ancilla = 0;
  VarIndex u = 0, v = 0;
  double penalty = 0.0;

  friend bool operator==(const Gadget&, const Gadget&) = default;
};

struct ReductionMap {
  std::vector<Gadget> gadgets;

  bool empty() const { return gadgets.empty(); }

  /// Extend an assignment of the pre-reduction variables with the ancilla
  /// values that zero every penalty (w = uv, applied in gadget order).
  std::vector<std::uint8_t> extend(std::span<const std::uint8_t> bits,
                                   std::size_t total_vars) const;

  friend bool operator==(const ReductionMap&, const ReductionMap&) = default;
};

struct DecodedFold {
  std::optional<Fold> fold;
  bool valid = false;
  std::string reason;
};

/// A compiled optimization instance: Hamiltonian, variable registry and
/// enough metadata to decode any assignment back into a fold.
struct EncodedProblem {
  std::string encoder;  // turn-ancilla | turn-circuit | nested-shell
  std::string sequence;
  LatticeKind lattice = LatticeKind::Cubic;
  std::map<std::string, double> lambdas;
  VariableRegistry registry;
  ReductionMap reduction;
  Polynomial hamiltonian;
  std::map<std::string, std::string> metadata;

  std::size_t num_vars() const { return registry.size(); }

  /// Decode a full assignment to a fold. Penalty-violating assignments
  /// come back with valid=false and a reason.
  DecodedFold decode(std::span<const std::uint8_t> bits) const;

  void save(std::ostream& os) const;
  static EncodedProblem load(std::istream& is);
};

}  // namespace latfold
