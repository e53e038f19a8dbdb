#include "latfold/turn_circuit.hpp"

#include <algorithm>
#include <cmath>

#include "latfold/turn_ancilla.hpp"

namespace latfold::turn_circuit {

namespace {

int ceil_log2(long v) {
  int m = 0;
  while ((1L << m) < v) ++m;
  return m;
}

// Input wire of a sum network: indicator that turn p moves in direction d.
Polynomial turn_input(int p, Direction d, int n, LatticeKind kind) {
  if (p == 0) {
    return d == Direction::PlusX ? Polynomial::constant(1.0) : Polynomial::zero();
  }
  if (p == 1) {
    if (d == Direction::PlusX) return Polynomial::variable(0);
    if (d == Direction::PlusY) return Polynomial::literal(0, true);
    return Polynomial::zero();
  }
  return turn_ancilla::direction_indicator(p, turn_ancilla::to_symbol(d), n, kind);
}

struct PolyBackend {
  using Wire = Polynomial;
  std::int64_t adders = 0;
  Wire zero() const { return Polynomial::zero(); }
  std::pair<Wire, Wire> half_adder(const Wire& x, const Wire& y) {
    ++adders;
    return turn_circuit::half_adder(x, y);
  }
};

struct CountBackend {
  using Wire = char;
  std::int64_t adders = 0;
  Wire zero() const { return 0; }
  std::pair<Wire, Wire> half_adder(Wire, Wire) {
    ++adders;
    return {0, 0};
  }
};

// Triangle of half-adder chains, one plane per output digit. Plane p holds
// n-p+1 adders; planes above the real output width only ever carry zeros,
// so the pruned build stops at sum_width(n) planes.
template <class Backend>
std::vector<typename Backend::Wire> run_sum_network(
    std::vector<typename Backend::Wire> wires, int planes, Backend& backend) {
  std::vector<typename Backend::Wire> digits;
  digits.reserve(planes);
  for (int p = 0; p < planes && !wires.empty(); ++p) {
    typename Backend::Wire acc = backend.zero();
    std::vector<typename Backend::Wire> carries;
    carries.reserve(wires.size());
    for (auto& w : wires) {
      auto [carry, sum] = backend.half_adder(acc, w);
      acc = std::move(sum);
      carries.push_back(std::move(carry));
    }
    digits.push_back(std::move(acc));
    carries.erase(carries.begin());  // the zero-seeded chain head never carries
    wires = std::move(carries);
  }
  return digits;
}

std::array<int, 3> lattice_axes(LatticeKind kind) {
  return kind == LatticeKind::Cubic ? std::array<int, 3>{0, 1, 2}
                                    : std::array<int, 3>{0, 1, -1};
}

Direction axis_direction(int axis, bool positive) {
  static constexpr Direction plus[3] = {Direction::PlusX, Direction::PlusY,
                                        Direction::PlusZ};
  static constexpr Direction minus[3] = {Direction::MinusX, Direction::MinusY,
                                         Direction::MinusZ};
  return positive ? plus[axis] : minus[axis];
}

}  // namespace

HCounts h_counts(std::int64_t n) {
  HCounts c;
  c.total = n * (n + 1) / 2;
  c.redun = n - ceil_log2(n + 1);
  c.improv = c.total - c.redun * (c.redun + 1) / 2;
  return c;
}

int sum_width(int n) { return ceil_log2(n + 1); }

std::pair<Polynomial, Polynomial> half_adder(const Polynomial& x,
                                             const Polynomial& y) {
  Polynomial carry = x * y;
  Polynomial sum = x + y - 2.0 * carry;
  return {std::move(carry), std::move(sum)};
}

Polynomial xor_poly(const Polynomial& a, const Polynomial& b) {
  return a + b - 2.0 * (a * b);
}

Polynomial xnor_poly(const Polynomial& a, const Polynomial& b) {
  return Polynomial::constant(1.0) - xor_poly(a, b);
}

std::int64_t sum_network_size(int inputs, bool pruned) {
  CountBackend backend;
  std::vector<char> wires(inputs, 0);
  run_sum_network(std::move(wires), pruned ? sum_width(inputs) : inputs, backend);
  return backend.adders;
}

SumString build_sum_string(int i, int j, Direction dir, int n, LatticeKind kind,
                           bool pruned) {
  if (j < i + 2) {
    throw IndexOutOfRangeError("sum string needs at least two turns");
  }
  PolyBackend backend;
  std::vector<Polynomial> wires;
  wires.reserve(j - i);
  for (int p = i; p < j; ++p) wires.push_back(turn_input(p, dir, n, kind));
  int inputs = j - i;
  SumString out;
  out.i = i;
  out.j = j;
  out.dir = dir;
  out.bits = run_sum_network(std::move(wires), pruned ? sum_width(inputs) : inputs,
                             backend);
  out.adders = backend.adders;
  return out;
}

namespace {

struct AxisSums {
  SumString plus, minus;
};

std::vector<AxisSums> all_axis_sums(int i, int j, int n, LatticeKind kind,
                                    std::int64_t* adders) {
  std::vector<AxisSums> out;
  for (int axis : lattice_axes(kind)) {
    if (axis < 0) continue;
    AxisSums s{build_sum_string(i, j, axis_direction(axis, true), n, kind),
               build_sum_string(i, j, axis_direction(axis, false), n, kind)};
    if (adders) *adders += s.plus.adders + s.minus.adders;
    out.push_back(std::move(s));
  }
  return out;
}

Polynomial strings_equal(const SumString& a, const SumString& b) {
  Polynomial eq = Polynomial::constant(1.0);
  for (std::size_t r = 0; r < a.bits.size(); ++r) {
    eq = eq * xnor_poly(a.bits[r], b.bits[r]);
  }
  return eq;
}

}  // namespace

Polynomial overlap_term(int i, int j, int n, LatticeKind kind,
                        std::int64_t* adders) {
  if ((j - i) % 2 != 0 || j < i + 2) {
    throw IndexOutOfRangeError("overlap test applies to even separations >= 2");
  }
  Polynomial olap = Polynomial::constant(1.0);
  for (const AxisSums& s : all_axis_sums(i, j, n, kind, adders)) {
    olap = olap * strings_equal(s.plus, s.minus);
  }
  return olap;
}

Polynomial build_h_olap(int n, double lambda, LatticeKind kind,
                        std::int64_t* adders) {
  Polynomial h;
  for (int i = 0; i <= n - 3; ++i) {
    for (int j = i + 2; j <= n - 1; j += 2) {
      h += overlap_term(i, j, n, kind, adders);
    }
  }
  return h * lambda;
}

Polynomial adjacency(int i, int j, int axis, int n, LatticeKind kind,
                     std::int64_t* adders) {
  if ((j - i) % 2 != 1 || j < i + 3) {
    throw IndexOutOfRangeError("adjacency test applies to odd separations >= 3");
  }
  auto sums = all_axis_sums(i, j, n, kind, adders);
  const int w = sum_width(j - i);

  Polynomial other_equal = Polynomial::constant(1.0);
  for (std::size_t a = 0; a < sums.size(); ++a) {
    if (static_cast<int>(a) == axis) continue;
    other_equal = other_equal * strings_equal(sums[a].plus, sums[a].minus);
  }

  const auto& sp = sums[axis].plus.bits;
  const auto& sm = sums[axis].minus.bits;

  // |plus - minus| = 1: the strings differ in exactly the low p digits, the
  // plus string's low p-1 digits agree with each other and flip at digit p.
  Polynomial differ_by_one = xor_poly(sp[0], sm[0]);
  for (int r = 2; r <= w; ++r) {
    differ_by_one = differ_by_one * xnor_poly(sp[r - 1], sm[r - 1]);
  }
  for (int p = 2; p <= w; ++p) {
    Polynomial term = xor_poly(sp[p - 2], sp[p - 1]);
    for (int r = 1; r <= p - 2; ++r) {
      term = term * xnor_poly(sp[r - 1], sp[r]);
    }
    for (int r = 1; r <= p; ++r) {
      term = term * xor_poly(sp[r - 1], sm[r - 1]);
    }
    for (int r = p + 1; r <= w; ++r) {
      term = term * xnor_poly(sp[r - 1], sm[r - 1]);
    }
    differ_by_one += term;
  }
  return other_equal * differ_by_one;
}

Polynomial adjacency_indicator(int i, int j, int axis, int n, LatticeKind kind) {
  // Support: the free bits of turns i..j-1.
  std::vector<VarIndex> support;
  for (int p = std::max(i, 1); p < j; ++p) {
    if (p == 1) {
      support.push_back(0);
    } else {
      VarIndex base = turn_ancilla::turn_group_start(p, kind);
      for (int r = 0; r < turn_bit_width(kind); ++r) support.push_back(base + r);
    }
  }
  std::sort(support.begin(), support.end());
  const int m = static_cast<int>(support.size());
  if (m > 24) throw TooLargeError("adjacency indicator support too large");

  std::vector<std::int64_t> table(1u << m, 0);
  std::vector<std::uint8_t> bits(free_bit_count(kind, n), 0);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    for (int b = 0; b < m; ++b) bits[support[b]] = (mask >> b) & 1;
    Vec3 delta{};
    for (int p = i; p < j; ++p) {
      if (p == 0) {
        delta = delta + Vec3{1, 0, 0};
      } else if (p == 1) {
        delta = delta + (bits[0] ? Vec3{1, 0, 0} : Vec3{0, 1, 0});
      } else {
        auto group = std::span<const std::uint8_t>(bits).subspan(
            turn_ancilla::turn_group_start(p, kind), turn_bit_width(kind));
        if (auto dir = decode_turn(group, kind)) delta = delta + direction_step(*dir);
      }
    }
    int along = axis == 0 ? delta.x : axis == 1 ? delta.y : delta.z;
    Vec3 rest = delta;
    (axis == 0 ? rest.x : axis == 1 ? rest.y : rest.z) = 0;
    table[mask] = (std::abs(along) == 1 && rest == Vec3{0, 0, 0}) ? 1 : 0;
  }
  // Moebius transform: truth table -> multilinear coefficients.
  for (int b = 0; b < m; ++b) {
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      if (mask & (1u << b)) table[mask] -= table[mask ^ (1u << b)];
    }
  }
  Polynomial out;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (table[mask] == 0) continue;
    std::vector<VarIndex> vars;
    for (int b = 0; b < m; ++b) {
      if (mask & (1u << b)) vars.push_back(support[b]);
    }
    out.add_term(Term::of(std::move(vars)), static_cast<double>(table[mask]));
  }
  return out;
}

Polynomial build_h_pair(int n, const InteractionMatrix& P, LatticeKind kind,
                        std::int64_t* adders) {
  Polynomial h;
  for (int i = 0; i <= n - 4; ++i) {
    for (int j = i + 3; j <= n - 1; j += 2) {
      if (P.at(i, j) == 0.0) continue;
      Polynomial sum_adjacent;
      for (int axis : lattice_axes(kind)) {
        if (axis < 0) continue;
        sum_adjacent += adjacency(i, j, axis, n, kind, adders);
      }
      h += sum_adjacent * P.at(i, j);
    }
  }
  return h;
}

VariableRegistry turn_registry(int n, LatticeKind kind) {
  if (n < 4) {
    throw SequenceTooShortError("turn-circuit encoding needs at least 4 residues");
  }
  VariableRegistry reg;
  reg.vars.assign(free_bit_count(kind, n), {VarRole::Turn, -1, -1, -1, {}});
  return reg;
}

EncodedProblem encode(const std::string& sequence, const InteractionMatrix& P,
                      LatticeKind kind, double lambda_olap) {
  const int n = static_cast<int>(sequence.size());
  if (n < 4) {
    throw SequenceTooShortError("turn-circuit encoding needs at least 4 residues");
  }
  if (lambda_olap <= 0.0) lambda_olap = 1.0 + P.abs_sum();

  std::int64_t adders = 0;
  EncodedProblem problem;
  problem.encoder = "turn-circuit";
  problem.sequence = sequence;
  problem.lattice = kind;
  problem.lambdas = {{"olap", lambda_olap}};
  problem.registry = turn_registry(n, kind);
  problem.hamiltonian = build_h_olap(n, lambda_olap, kind, &adders);
  problem.hamiltonian += build_h_pair(n, P, kind, &adders);
  problem.metadata["max_degree"] = std::to_string(problem.hamiltonian.degree());
  problem.metadata["half_adders"] = std::to_string(adders);
  return problem;
}

}  // namespace latfold::turn_circuit
