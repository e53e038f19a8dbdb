#include <cmath>

#include "doctest.h"
#include "latfold/lattice.hpp"
#include "latfold/potentials.hpp"
#include "latfold/solve.hpp"
#include "latfold/turn_circuit.hpp"

using namespace latfold;
namespace tc = latfold::turn_circuit;

namespace {

InteractionMatrix hp_matrix(const std::string& seq) {
  return InteractionMatrix::build(seq, PotentialTable::hp());
}

std::vector<std::uint8_t> turn_assignment(std::uint32_t mask, int nbits) {
  std::vector<std::uint8_t> bits(nbits);
  for (int b = 0; b < nbits; ++b) bits[b] = (mask >> b) & 1;
  return bits;
}

// Residue positions with invalid codes contributing no displacement.
std::vector<Vec3> positions_of(std::span<const std::uint8_t> bits, int n,
                               LatticeKind kind) {
  std::vector<Vec3> pos{{0, 0, 0}, {1, 0, 0}};
  pos.reserve(n);
  if (n >= 3) pos.push_back(pos.back() + (bits[0] ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
  const int width = turn_bit_width(kind);
  for (int j = 2; j <= n - 2; ++j) {
    auto group = bits.subspan(1 + static_cast<std::size_t>(width) * (j - 2), width);
    Vec3 step{};
    if (auto dir = decode_turn(group, kind)) step = direction_step(*dir);
    pos.push_back(pos.back() + step);
  }
  return pos;
}

long sum_value(const tc::SumString& s, std::span<const std::uint8_t> bits) {
  long value = 0;
  for (std::size_t r = 0; r < s.bits.size(); ++r) {
    double bit = s.bits[r].evaluate(bits);
    CHECK((std::abs(bit) < 1e-9 || std::abs(bit - 1.0) < 1e-9));
    value += static_cast<long>(std::llround(bit)) << r;
  }
  return value;
}

}  // namespace

TEST_CASE("half adder law") {
  Polynomial x = Polynomial::variable(0);
  Polynomial y = Polynomial::variable(1);
  auto [carry, sum] = tc::half_adder(x, y);
  CHECK(carry.evaluate(turn_assignment(0b11, 2)) == 1.0);
  CHECK(sum.evaluate(turn_assignment(0b11, 2)) == 0.0);
  CHECK(carry.evaluate(turn_assignment(0b10, 2)) == 0.0);
  CHECK(sum.evaluate(turn_assignment(0b10, 2)) == 1.0);
  // 2c + s = x + y as polynomials
  CHECK(2.0 * carry + sum == x + y);

  auto [c0, s0] = tc::half_adder(Polynomial::zero(), y);
  CHECK(c0.is_zero());
  CHECK(s0 == y);
}

TEST_CASE("adder count closed forms") {
  auto c3 = tc::h_counts(3);
  CHECK(c3.total == 6);
  CHECK(c3.redun == 1);
  CHECK(c3.improv == 5);
  auto c7 = tc::h_counts(7);
  CHECK(c7.total == 28);
  CHECK(c7.redun == 4);
  CHECK(c7.improv == 18);

  // quasilinear growth: h_improv(n) stays within a constant of n*log2(n+1)
  for (long n = 2; n <= 1024; ++n) {
    auto c = tc::h_counts(n);
    double bound = 1.25 * static_cast<double>(n) * std::log2(double(n + 1));
    CHECK(static_cast<double>(c.improv) <= bound + 2.0);
    CHECK(c.improv ==
          (n * n + n - c.redun * c.redun - c.redun) / 2);  // published identity
  }
}

TEST_CASE("constructed networks use exactly the predicted adders") {
  for (int n = 2; n <= 64; ++n) {
    CHECK(tc::sum_network_size(n, true) == tc::h_counts(n).improv);
    CHECK(tc::sum_network_size(n, false) == tc::h_counts(n).total);
  }
}

TEST_CASE("sum strings count directional turns") {
  const int n = 6;
  const int nbits = free_bit_count(LatticeKind::Cubic, n);
  auto s04 = tc::build_sum_string(0, 4, Direction::PlusX, n, LatticeKind::Cubic);
  CHECK(s04.adders == tc::h_counts(4).improv);
  CHECK(s04.bits.size() == 3);  // values up to 4 need three digits

  // straight +x fold: every turn is +x
  std::vector<std::uint8_t> straight(nbits, 0);
  straight[0] = 1;
  for (int j = 2; j <= n - 2; ++j) {
    straight[1 + 3 * (j - 2)] = 1;
    straight[1 + 3 * (j - 2) + 1] = 0;
    straight[1 + 3 * (j - 2) + 2] = 1;
  }
  CHECK(sum_value(s04, straight) == 4);

  // all free turns -x: only the fixed turns contribute to the +x count
  std::vector<std::uint8_t> back(nbits, 0);
  back[0] = 1;
  for (int j = 2; j <= n - 2; ++j) {
    back[1 + 3 * (j - 2)] = 1;
    back[1 + 3 * (j - 2) + 1] = 1;
    back[1 + 3 * (j - 2) + 2] = 0;
  }
  CHECK(sum_value(s04, back) == 2);  // turn 0 fixed +x, turn 1 has q0 = 1

  // value law on every assignment, every axis, for a middle-sized pair
  for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
    auto bits = turn_assignment(mask, 7);  // n=5 assignment
    auto pos = positions_of(bits, 5, LatticeKind::Cubic);
    for (int d = 0; d < 6; ++d) {
      auto s = tc::build_sum_string(0, 4, static_cast<Direction>(d), 5,
                                    LatticeKind::Cubic);
      long count = 0;
      Vec3 step = direction_step(static_cast<Direction>(d));
      for (int p = 0; p < 4; ++p) {
        if (pos[p + 1] - pos[p] == step) ++count;
      }
      CHECK(sum_value(s, bits) == count);
    }
  }
}

TEST_CASE("pruned and unpruned networks agree; removed digits are zero") {
  for (int span : {2, 3, 4}) {
    auto pruned =
        tc::build_sum_string(0, span, Direction::PlusY, 6, LatticeKind::Cubic);
    auto full =
        tc::build_sum_string(0, span, Direction::PlusY, 6, LatticeKind::Cubic, false);
    REQUIRE(full.bits.size() == static_cast<std::size_t>(span));
    REQUIRE(pruned.bits.size() <= full.bits.size());
    for (std::size_t r = 0; r < pruned.bits.size(); ++r) {
      CHECK(Polynomial::approx_equal(pruned.bits[r], full.bits[r]));
    }
    for (std::size_t r = pruned.bits.size(); r < full.bits.size(); ++r) {
      CHECK(full.bits[r].is_zero());
    }
  }
}

TEST_CASE("overlap term is the coincidence indicator") {
  const int n = 5;
  const int nbits = free_bit_count(LatticeKind::Cubic, n);
  Polynomial o04 = tc::overlap_term(0, 4, n, LatticeKind::Cubic);
  for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
    auto bits = turn_assignment(mask, nbits);
    auto pos = positions_of(bits, n, LatticeKind::Cubic);
    double expect = pos[0] == pos[4] ? 1.0 : 0.0;
    CHECK(o04.evaluate(bits) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK_THROWS_AS(tc::overlap_term(0, 3, n, LatticeKind::Cubic),
                  IndexOutOfRangeError);
}

TEST_CASE("h_olap counts coincident even pairs") {
  const int n = 5;
  const int nbits = free_bit_count(LatticeKind::Cubic, n);
  const double lambda = 2.0;
  Polynomial h = tc::build_h_olap(n, lambda, LatticeKind::Cubic);
  for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
    auto bits = turn_assignment(mask, nbits);
    auto pos = positions_of(bits, n, LatticeKind::Cubic);
    int coincident = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 2; j < n; j += 2) {
        if (pos[i] == pos[j]) ++coincident;
      }
    }
    CHECK(h.evaluate(bits) == doctest::Approx(lambda * coincident).epsilon(1e-9));
  }
}

TEST_CASE("published adjacency formula matches the position indicator") {
  for (int n : {5, 6}) {
    for (int i = 0; i <= n - 4; ++i) {
      for (int j = i + 3; j <= n - 1; j += 2) {
        for (int axis = 0; axis < 3; ++axis) {
          Polynomial formula = tc::adjacency(i, j, axis, n, LatticeKind::Cubic);
          Polynomial truth = tc::adjacency_indicator(i, j, axis, n, LatticeKind::Cubic);
          CHECK(Polynomial::approx_equal(formula, truth, 1e-7));
        }
      }
    }
  }
}

TEST_CASE("at most one axis can report adjacency") {
  const int n = 5;
  const int nbits = free_bit_count(LatticeKind::Cubic, n);
  for (int i = 0; i <= n - 4; ++i) {
    for (int j = i + 3; j <= n - 1; j += 2) {
      Polynomial sum;
      for (int axis = 0; axis < 3; ++axis) {
        sum += tc::adjacency(i, j, axis, n, LatticeKind::Cubic);
      }
      for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
        double v = sum.evaluate(turn_assignment(mask, nbits));
        CHECK((std::abs(v) < 1e-9 || std::abs(v - 1.0) < 1e-9));
      }
    }
  }
}

TEST_CASE("encode uses exactly the turn bits") {
  auto P8 = hp_matrix("HPPHPPHH");
  EncodedProblem p8 = tc::encode("HPPHPPHH", P8, LatticeKind::Cubic);
  CHECK(p8.num_vars() == 16);
  CHECK(p8.registry.count(VarRole::Turn) == 16);
  CHECK(p8.metadata.count("half_adders") == 1);
}

TEST_CASE("HPPH ground state matches the oracle") {
  auto P = hp_matrix("HPPH");
  EncodedProblem problem = tc::encode("HPPH", P, LatticeKind::Cubic);
  auto result = solve::exhaustive_solve(problem.hamiltonian,
                                        static_cast<std::uint32_t>(problem.num_vars()));
  CHECK(result.min_energy == doctest::Approx(-1.0).epsilon(1e-9));
  bool decodable_hit = false;
  for (const auto& bits : result.minimizers) {
    auto decoded = problem.decode(bits);
    if (decoded.valid) {
      decodable_hit = true;
      CHECK(fold_energy(*decoded.fold, P) == -1.0);
    }
  }
  CHECK(decodable_hit);
}

TEST_CASE("valid assignments evaluate to their fold energy") {
  const std::string seq = "HPPHH";
  const int n = 5;
  auto P = hp_matrix(seq);
  EncodedProblem problem = tc::encode(seq, P, LatticeKind::Cubic);
  const int nbits = free_bit_count(LatticeKind::Cubic, n);
  for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
    auto bits = turn_assignment(mask, nbits);
    Fold fold;
    try {
      fold = fold_from_bits(bits, seq, LatticeKind::Cubic);
    } catch (const InvalidTurnError&) {
      continue;
    }
    if (!fold.valid()) continue;
    CHECK(problem.hamiltonian.evaluate(bits) ==
          doctest::Approx(fold_energy(fold, P)).epsilon(1e-9));
  }
}
