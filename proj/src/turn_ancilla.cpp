#include "latfold/turn_ancilla.hpp"

#include <algorithm>
#include <cmath>

namespace latfold::turn_ancilla {

namespace {

int ceil_log2(long v) {
  int m = 0;
  while ((1L << m) < v) ++m;
  return m;
}

// Bit patterns for the 3-bit cubic turn code, index order (q1, q2, q3).
std::array<std::uint8_t, 3> cubic_pattern(TurnSymbol s) {
  switch (s) {
    case TurnSymbol::PlusX: return {1, 0, 1};
    case TurnSymbol::MinusX: return {1, 1, 0};
    case TurnSymbol::PlusY: return {0, 0, 1};
    case TurnSymbol::MinusY: return {0, 1, 0};
    case TurnSymbol::PlusZ: return {1, 1, 1};
    case TurnSymbol::MinusZ: return {1, 0, 0};
    case TurnSymbol::Invalid000: return {0, 0, 0};
    case TurnSymbol::Invalid011: return {0, 1, 1};
  }
  return {};
}

std::array<std::uint8_t, 2> planar_pattern(TurnSymbol s) {
  switch (s) {
    case TurnSymbol::PlusX: return {0, 0};
    case TurnSymbol::PlusY: return {0, 1};
    case TurnSymbol::MinusX: return {1, 0};
    case TurnSymbol::MinusY: return {1, 1};
    default:
      throw InvalidTurnError("symbol has no planar turn code");
  }
}

}  // namespace

TurnSymbol to_symbol(Direction d) {
  switch (d) {
    case Direction::PlusX: return TurnSymbol::PlusX;
    case Direction::MinusX: return TurnSymbol::MinusX;
    case Direction::PlusY: return TurnSymbol::PlusY;
    case Direction::MinusY: return TurnSymbol::MinusY;
    case Direction::PlusZ: return TurnSymbol::PlusZ;
    case Direction::MinusZ: return TurnSymbol::MinusZ;
  }
  return TurnSymbol::Invalid000;
}

VarIndex turn_group_start(int j, LatticeKind kind) {
  return 1 + static_cast<VarIndex>(turn_bit_width(kind)) * (j - 2);
}

Polynomial direction_indicator(int j, TurnSymbol symbol, int n, LatticeKind kind) {
  if (j < 2 || j > n - 2) {
    throw IndexOutOfRangeError("turn index " + std::to_string(j) +
                               " outside [2, " + std::to_string(n - 2) + "]");
  }
  VarIndex base = turn_group_start(j, kind);
  Polynomial p = Polynomial::constant(1.0);
  if (kind == LatticeKind::Cubic) {
    auto bits = cubic_pattern(symbol);
    for (int r = 0; r < 3; ++r) {
      p = p * Polynomial::literal(base + r, bits[r] == 0);
    }
  } else {
    auto bits = planar_pattern(symbol);
    for (int r = 0; r < 2; ++r) {
      p = p * Polynomial::literal(base + r, bits[r] == 0);
    }
  }
  return p;
}

std::array<Polynomial, 3> turn_step_polynomials(int p, LatticeKind kind) {
  std::array<Polynomial, 3> out;
  if (p == 0) {
    out[0] = Polynomial::constant(1.0);
    return out;
  }
  if (p == 1) {
    out[0] = Polynomial::variable(0);
    out[1] = Polynomial::literal(0, true);
    return out;
  }
  VarIndex s = turn_group_start(p, kind);
  if (kind == LatticeKind::Cubic) {
    VarIndex a = s, b = s + 1, c = s + 2;
    // d+x - d-x = q1 q3 - q1 q2
    out[0].add_term(Term{a, c}, 1.0);
    out[0].add_term(Term{a, b}, -1.0);
    // d+y - d-y = q3 - q2 - q1 q3 + q1 q2
    out[1].add_term(Term{c}, 1.0);
    out[1].add_term(Term{b}, -1.0);
    out[1].add_term(Term{a, c}, -1.0);
    out[1].add_term(Term{a, b}, 1.0);
    // d+z - d-z = -q1 + q1 q2 + q1 q3
    out[2].add_term(Term{a}, -1.0);
    out[2].add_term(Term{a, b}, 1.0);
    out[2].add_term(Term{a, c}, 1.0);
  } else {
    VarIndex a = s, b = s + 1;
    // d+x - d-x = 1 - b - 2a + 2ab
    out[0].add_term(Term::constant(), 1.0);
    out[0].add_term(Term{b}, -1.0);
    out[0].add_term(Term{a}, -2.0);
    out[0].add_term(Term{a, b}, 2.0);
    // d+y - d-y = b - 2ab
    out[1].add_term(Term{b}, 1.0);
    out[1].add_term(Term{a, b}, -2.0);
  }
  return out;
}

namespace {

std::array<Polynomial, 3> delta_position(int from, int to, LatticeKind kind) {
  std::array<Polynomial, 3> out;
  for (int p = from; p < to; ++p) {
    auto step = turn_step_polynomials(p, kind);
    for (int axis = 0; axis < 3; ++axis) out[axis] += step[axis];
  }
  return out;
}

}  // namespace

std::array<Polynomial, 3> position_polynomials(int m, int n, LatticeKind kind) {
  if (m < 0 || m > n - 1) {
    throw IndexOutOfRangeError("residue index " + std::to_string(m) +
                               " outside [0, " + std::to_string(n - 1) + "]");
  }
  if (m == 0) return {};
  return delta_position(0, m, kind);
}

Polynomial distance_poly(int j, int k, int n, LatticeKind kind) {
  if (j == k) return Polynomial::zero();
  int lo = std::min(j, k), hi = std::max(j, k);
  if (lo < 0 || hi > n - 1) {
    throw IndexOutOfRangeError("residue pair (" + std::to_string(j) + ", " +
                               std::to_string(k) + ") out of range");
  }
  auto delta = delta_position(lo, hi, kind);
  Polynomial d = delta[0] * delta[0] + delta[1] * delta[1];
  if (kind == LatticeKind::Cubic) d += delta[2] * delta[2];
  return d;
}

int mu(int i, int j) {
  long s = std::abs(static_cast<long>(i) - j);
  if (s % 2 != 0) return 0;
  return ceil_log2(s * s);
}

int Layout::total_vars() const {
  int total = turn_bits;
  for (const SlackRegister& s : slacks) total += s.width;
  total += static_cast<int>(flags.size());
  return total;
}

int Layout::slack_pointer(int i, int j) const {
  for (const SlackRegister& s : slacks) {
    if (s.i == i && s.j == j) return s.pointer;
  }
  throw NoSlackRegisterError("pair (" + std::to_string(i) + ", " +
                             std::to_string(j) + ") has no slack register");
}

const FlagVar* Layout::find_flag(int i, int j) const {
  for (const FlagVar& f : flags) {
    if (f.i == i && f.j == j) return &f;
  }
  return nullptr;
}

VariableRegistry Layout::registry() const {
  VariableRegistry reg;
  reg.vars.resize(total_vars());
  for (int v = 0; v < turn_bits; ++v) reg.vars[v] = {VarRole::Turn, -1, -1, -1, {}};
  for (const SlackRegister& s : slacks) {
    for (int r = 0; r < s.width; ++r) {
      reg.vars[s.pointer + r] = {VarRole::Slack, s.i, s.j, r, {}};
    }
  }
  for (const FlagVar& f : flags) {
    reg.vars[f.var] = {VarRole::Flag, f.i, f.j, -1, {}};
  }
  return reg;
}

Layout make_layout(int n, const InteractionMatrix& P, LatticeKind kind) {
  Layout layout;
  layout.n = n;
  layout.kind = kind;
  layout.turn_bits = free_bit_count(kind, n);
  int next = layout.turn_bits;
  for (int i = 0; i <= n - 5; ++i) {
    for (int j = i + 4; j <= n - 1; ++j) {
      int width = mu(i, j);
      if (width == 0) continue;
      layout.slacks.push_back({i, j, width, next});
      next += width;
    }
  }
  for (int i = 0; i <= n - 4; ++i) {
    for (int j = i + 3; j <= n - 1; ++j) {
      if ((j - i) % 2 == 0) continue;
      if (P.at(i, j) == 0.0) continue;
      layout.flags.push_back({i, j, next});
      ++next;
    }
  }
  return layout;
}

double default_lambda(const InteractionMatrix& P) { return 1.0 + P.abs_sum(); }

Polynomial build_h_back(int n, double lambda, LatticeKind kind) {
  if (n < 4) throw SequenceTooShortError("need at least 4 residues");
  Polynomial h;
  h += Polynomial::variable(0) *
       direction_indicator(2, TurnSymbol::MinusX, n, kind);
  h += Polynomial::literal(0, true) *
       direction_indicator(2, TurnSymbol::MinusY, n, kind);
  static constexpr TurnSymbol pairs[6][2] = {
      {TurnSymbol::PlusX, TurnSymbol::MinusX},
      {TurnSymbol::MinusX, TurnSymbol::PlusX},
      {TurnSymbol::PlusY, TurnSymbol::MinusY},
      {TurnSymbol::MinusY, TurnSymbol::PlusY},
      {TurnSymbol::PlusZ, TurnSymbol::MinusZ},
      {TurnSymbol::MinusZ, TurnSymbol::PlusZ}};
  int npairs = kind == LatticeKind::Cubic ? 6 : 4;
  for (int j = 2; j <= n - 3; ++j) {
    for (int k = 0; k < npairs; ++k) {
      h += direction_indicator(j, pairs[k][0], n, kind) *
           direction_indicator(j + 1, pairs[k][1], n, kind);
    }
  }
  return h * lambda;
}

Polynomial build_h_redun(int n, double lambda, LatticeKind kind) {
  if (n < 4) throw SequenceTooShortError("need at least 4 residues");
  if (kind == LatticeKind::Planar) return Polynomial::zero();  // all 2-bit codes are moves
  Polynomial h;
  for (int j = 2; j <= n - 2; ++j) {
    h += direction_indicator(j, TurnSymbol::Invalid000, n, kind);
    h += direction_indicator(j, TurnSymbol::Invalid011, n, kind);
  }
  return h * lambda;
}

Polynomial build_h_olap(const Layout& layout, double lambda) {
  Polynomial h;
  for (const SlackRegister& s : layout.slacks) {
    Polynomial d = distance_poly(s.i, s.j, layout.n, layout.kind);
    Polynomial alpha;
    for (int r = 0; r < s.width; ++r) {
      alpha.add_term(Term{static_cast<VarIndex>(s.pointer + r)},
                     static_cast<double>(1L << (s.width - 1 - r)));
    }
    Polynomial expr = Polynomial::constant(static_cast<double>(1L << s.width));
    expr -= d;
    expr -= alpha;
    h += (expr * expr) * lambda;
  }
  return h;
}

Polynomial build_h_pair(const Layout& layout, const InteractionMatrix& P) {
  Polynomial h;
  for (const FlagVar& f : layout.flags) {
    Polynomial d = distance_poly(f.i, f.j, layout.n, layout.kind);
    Polynomial two_minus_d = Polynomial::constant(2.0) - d;
    h += Polynomial::variable(f.var) * two_minus_d * P.at(f.i, f.j);
  }
  return h;
}

EncodedProblem encode(const std::string& sequence, const InteractionMatrix& P,
                      LatticeKind kind, const Lambdas& lambdas) {
  const int n = static_cast<int>(sequence.size());
  if (n < 4) {
    throw SequenceTooShortError("turn-ancilla encoding needs at least 4 residues");
  }
  Lambdas lam = lambdas;
  double fallback = default_lambda(P);
  if (lam.back <= 0.0) lam.back = fallback;
  if (lam.redun <= 0.0) lam.redun = fallback;
  if (lam.olap <= 0.0) lam.olap = fallback;

  Layout layout = make_layout(n, P, kind);
  EncodedProblem problem;
  problem.encoder = "turn-ancilla";
  problem.sequence = sequence;
  problem.lattice = kind;
  problem.lambdas = {{"back", lam.back}, {"redun", lam.redun}, {"olap", lam.olap}};
  problem.registry = layout.registry();
  problem.hamiltonian = build_h_back(n, lam.back, kind);
  problem.hamiltonian += build_h_redun(n, lam.redun, kind);
  problem.hamiltonian += build_h_olap(layout, lam.olap);
  problem.hamiltonian += build_h_pair(layout, P);
  problem.metadata["max_degree"] = std::to_string(problem.hamiltonian.degree());
  problem.metadata["slack_registers"] = std::to_string(layout.slacks.size());
  problem.metadata["interaction_flags"] = std::to_string(layout.flags.size());
  return problem;
}

namespace {

// Residue positions for a turn-bit assignment; turns that decode to 000/011
// contribute no displacement, matching the indicator polynomials.
std::vector<Vec3> positions_for_bits(const Layout& layout,
                                     std::span<const std::uint8_t> turn_bits,
                                     std::vector<bool>* turn_valid) {
  const int n = layout.n;
  const int width = turn_bit_width(layout.kind);
  std::vector<Vec3> pos;
  pos.reserve(n);
  pos.push_back({0, 0, 0});
  if (turn_valid) turn_valid->assign(std::max(0, n - 1), true);
  if (n >= 2) pos.push_back({1, 0, 0});
  if (n >= 3) {
    Vec3 step = turn_bits[0] ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    pos.push_back(pos.back() + step);
  }
  for (int j = 2; j <= n - 2; ++j) {
    auto group = turn_bits.subspan(turn_group_start(j, layout.kind), width);
    auto dir = decode_turn(group, layout.kind);
    Vec3 step{};
    if (dir) {
      step = direction_step(*dir);
    } else if (turn_valid) {
      (*turn_valid)[j] = false;
    }
    pos.push_back(pos.back() + step);
  }
  return pos;
}

long squared_distance(Vec3 a, Vec3 b) {
  Vec3 d = a - b;
  return static_cast<long>(d.x) * d.x + static_cast<long>(d.y) * d.y +
         static_cast<long>(d.z) * d.z;
}

}  // namespace

std::vector<std::uint8_t> complete_with_optimal_ancillas(
    const Layout& layout, const InteractionMatrix& P,
    std::span<const std::uint8_t> turn_bits) {
  auto pos = positions_for_bits(layout, turn_bits, nullptr);
  std::vector<std::uint8_t> bits(turn_bits.begin(), turn_bits.end());
  bits.resize(layout.total_vars(), 0);
  for (const SlackRegister& s : layout.slacks) {
    long d = squared_distance(pos[s.i], pos[s.j]);
    long target = std::clamp((1L << s.width) - d, 0L, (1L << s.width) - 1);
    for (int r = 0; r < s.width; ++r) {
      bits[s.pointer + r] =
          static_cast<std::uint8_t>((target >> (s.width - 1 - r)) & 1);
    }
  }
  for (const FlagVar& f : layout.flags) {
    long d = squared_distance(pos[f.i], pos[f.j]);
    double contribution = P.at(f.i, f.j) * (2.0 - static_cast<double>(d));
    bits[f.var] = contribution < 0.0 ? 1 : 0;
  }
  return bits;
}

std::function<void(std::mt19937_64&, std::vector<std::uint8_t>&)>
valid_fold_initializer(const Layout& layout, const InteractionMatrix& P,
                       const std::string& sequence, int fixed_prefix) {
  return [layout, P, sequence, fixed_prefix](std::mt19937_64& rng,
                                             std::vector<std::uint8_t>& bits) {
    std::vector<std::uint8_t> turn_bits(bits.begin(),
                                        bits.begin() + layout.turn_bits);
    for (long attempt = 0; attempt < 1'000'000; ++attempt) {
      for (int b = fixed_prefix; b < layout.turn_bits; ++b) {
        turn_bits[b] = rng() & 1;
      }
      try {
        if (!fold_from_bits(turn_bits, sequence, layout.kind).valid()) continue;
      } catch (const InvalidTurnError&) {
        continue;
      }
      break;
    }
    bits = complete_with_optimal_ancillas(layout, P, turn_bits);
  };
}

TurnAssignmentAudit audit_turn_assignment(const Layout& layout,
                                          const InteractionMatrix& P,
                                          std::span<const std::uint8_t> turn_bits) {
  TurnAssignmentAudit audit;
  std::vector<bool> turn_valid;
  auto pos = positions_for_bits(layout, turn_bits, &turn_valid);
  const int n = layout.n;
  for (int j = 2; j <= n - 2; ++j) {
    if (!turn_valid[j]) ++audit.invalid_codes;
  }
  for (int p = 1; p <= n - 3; ++p) {
    if (!turn_valid[p] || !turn_valid[p + 1]) continue;
    Vec3 a = pos[p + 1] - pos[p];
    Vec3 b = pos[p + 2] - pos[p + 1];
    if (a + b == Vec3{0, 0, 0}) ++audit.reversals;
  }
  for (const SlackRegister& s : layout.slacks) {
    if (pos[s.i] == pos[s.j]) ++audit.overlap_pairs;
  }
  for (const FlagVar& f : layout.flags) {
    long d = squared_distance(pos[f.i], pos[f.j]);
    double contribution = P.at(f.i, f.j) * (2.0 - static_cast<double>(d));
    if (contribution < 0.0) audit.contact_energy += contribution;
  }
  return audit;
}

}  // namespace latfold::turn_ancilla
