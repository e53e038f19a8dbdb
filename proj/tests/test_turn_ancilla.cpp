#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "latfold/lattice.hpp"
#include "latfold/potentials.hpp"
#include "latfold/solve.hpp"
#include "latfold/turn_ancilla.hpp"

using namespace latfold;
namespace ta = latfold::turn_ancilla;

namespace {

InteractionMatrix hp_matrix(const std::string& seq) {
  return InteractionMatrix::build(seq, PotentialTable::hp());
}

PotentialTable mj() {
  static PotentialTable table =
      PotentialTable::load_mj_file(std::string(LATFOLD_DATA_DIR) + "/mj1996.tbl");
  return table;
}

std::vector<std::uint8_t> turn_assignment(std::uint32_t mask, int nbits) {
  std::vector<std::uint8_t> bits(nbits);
  for (int b = 0; b < nbits; ++b) bits[b] = (mask >> b) & 1;
  return bits;
}

constexpr ta::TurnSymbol kAllSymbols[8] = {
    ta::TurnSymbol::PlusX,  ta::TurnSymbol::MinusX,     ta::TurnSymbol::PlusY,
    ta::TurnSymbol::MinusY, ta::TurnSymbol::PlusZ,      ta::TurnSymbol::MinusZ,
    ta::TurnSymbol::Invalid000, ta::TurnSymbol::Invalid011};

}  // namespace

TEST_CASE("direction indicators hit exactly their bit pattern") {
  const int n = 5;
  Polynomial dx = ta::direction_indicator(2, ta::TurnSymbol::PlusX, n,
                                          LatticeKind::Cubic);
  // bits (q1,q2,q3) live at vars 1..3
  std::vector<std::uint8_t> bits(4, 0);
  bits[1] = 1;
  bits[2] = 0;
  bits[3] = 1;
  CHECK(dx.evaluate(bits) == 1.0);
  bits[2] = 1;
  CHECK(dx.evaluate(bits) == 0.0);

  CHECK_THROWS_AS(
      ta::direction_indicator(1, ta::TurnSymbol::PlusX, n, LatticeKind::Cubic),
      IndexOutOfRangeError);
  CHECK_THROWS_AS(
      ta::direction_indicator(4, ta::TurnSymbol::PlusX, n, LatticeKind::Cubic),
      IndexOutOfRangeError);
}

TEST_CASE("the eight indicators partition every bit pattern") {
  Polynomial sum;
  for (ta::TurnSymbol s : kAllSymbols) {
    sum += ta::direction_indicator(2, s, 5, LatticeKind::Cubic);
  }
  CHECK(sum == Polynomial::constant(1.0));

  Polynomial planar_sum;
  for (int k = 0; k < 4; ++k) {
    planar_sum += ta::direction_indicator(2, static_cast<ta::TurnSymbol>(k), 5,
                                          LatticeKind::Planar);
  }
  CHECK(planar_sum == Polynomial::constant(1.0));
}

TEST_CASE("indicators agree with decode_turn on all 8 patterns") {
  for (std::uint32_t code = 0; code < 8; ++code) {
    std::vector<std::uint8_t> group = {
        static_cast<std::uint8_t>(code >> 2 & 1),
        static_cast<std::uint8_t>(code >> 1 & 1),
        static_cast<std::uint8_t>(code & 1)};
    auto decoded = decode_turn(group, LatticeKind::Cubic);
    std::vector<std::uint8_t> bits(4, 0);
    bits[1] = group[0];
    bits[2] = group[1];
    bits[3] = group[2];
    for (int s = 0; s < 8; ++s) {
      double v = ta::direction_indicator(2, static_cast<ta::TurnSymbol>(s), 5,
                                         LatticeKind::Cubic)
                     .evaluate(bits);
      bool should_fire =
          decoded ? (s == static_cast<int>(ta::to_symbol(*decoded)))
                  : (group[1] == 0 && s == 6) || (group[1] == 1 && s == 7);
      CHECK(v == (should_fire ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("backtrack penalty fires on reversals only") {
  const double lambda = 2.0;
  Polynomial h = ta::build_h_back(4, lambda, LatticeKind::Cubic);
  // q0=1 (turn1=+x) and turn2=-x (110)
  CHECK(h.evaluate(turn_assignment(0b0111, 4)) == lambda);
  // straight +x,+x,+x: q=1 101
  CHECK(h.evaluate(turn_assignment(0b1011, 4)) == 0.0);

  for (int n : {4, 5}) {
    Polynomial hb = ta::build_h_back(n, lambda, LatticeKind::Cubic);
    int nbits = free_bit_count(LatticeKind::Cubic, n);
    for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
      double v = hb.evaluate(turn_assignment(mask, nbits));
      double multiples = v / lambda;
      CHECK(multiples >= -1e-9);
      CHECK(std::abs(multiples - std::round(multiples)) < 1e-9);
    }
  }
}

TEST_CASE("redundancy penalty counts invalid codes") {
  const double lambda = 3.0;
  Polynomial h = ta::build_h_redun(4, lambda, LatticeKind::Cubic);
  CHECK(h.evaluate(turn_assignment(0b0000, 4)) == lambda);   // q1q2q3 = 000
  CHECK(h.evaluate(turn_assignment(0b1011, 4)) == 0.0);      // 101 = +x

  Polynomial h5 = ta::build_h_redun(5, lambda, LatticeKind::Cubic);
  // both free turns 000
  CHECK(h5.evaluate(turn_assignment(0, 7)) == 2 * lambda);

  CHECK(ta::build_h_redun(6, lambda, LatticeKind::Planar).is_zero());
}

TEST_CASE("position polynomials track the decoded fold") {
  auto zero = ta::position_polynomials(0, 5, LatticeKind::Cubic);
  CHECK(zero[0].is_zero());
  CHECK(zero[1].is_zero());
  CHECK(zero[2].is_zero());

  auto first = ta::position_polynomials(1, 5, LatticeKind::Cubic);
  CHECK(first[0] == Polynomial::constant(1.0));
  CHECK(first[1].is_zero());

  auto second = ta::position_polynomials(2, 5, LatticeKind::Cubic);
  std::vector<std::uint8_t> bits(7, 0);
  bits[0] = 1;
  CHECK(second[0].evaluate(bits) == 2.0);
  CHECK(second[1].evaluate(bits) == 0.0);

  const int n = 5;
  const int nbits = free_bit_count(LatticeKind::Cubic, n);
  for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
    auto assignment = turn_assignment(mask, nbits);
    Fold fold;
    try {
      fold = fold_from_bits(assignment, "PPPPP", LatticeKind::Cubic);
    } catch (const InvalidTurnError&) {
      continue;
    }
    for (int m = 0; m < n; ++m) {
      auto pos = ta::position_polynomials(m, n, LatticeKind::Cubic);
      CHECK(pos[0].evaluate(assignment) == fold.coords[m].x);
      CHECK(pos[1].evaluate(assignment) == fold.coords[m].y);
      CHECK(pos[2].evaluate(assignment) == fold.coords[m].z);
    }
  }
}

TEST_CASE("distance polynomial properties") {
  CHECK(ta::distance_poly(3, 3, 5, LatticeKind::Cubic).is_zero());

  Polynomial d04 = ta::distance_poly(0, 4, 5, LatticeKind::Cubic);
  CHECK(d04.degree() <= 4);
  std::vector<std::uint8_t> straight = turn_assignment(0, 7);
  straight[0] = 1;                                    // +x
  straight[1] = 1; straight[2] = 0; straight[3] = 1;  // +x
  straight[4] = 1; straight[5] = 0; straight[6] = 1;  // +x
  CHECK(d04.evaluate(straight) == 16.0);

  const int nbits = free_bit_count(LatticeKind::Cubic, 5);
  for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
    double v = d04.evaluate(turn_assignment(mask, nbits));
    CHECK(v >= -1e-9);
    CHECK(v <= 16.0 + 1e-9);
  }
}

TEST_CASE("slack widths follow the closed form") {
  CHECK(ta::mu(0, 4) == 4);
  CHECK(ta::mu(0, 3) == 0);
  CHECK(ta::mu(0, 6) == 6);
  CHECK(ta::mu(4, 0) == 4);  // separation is |i-j|
  CHECK(ta::mu(0, 8) == 6);
}

TEST_CASE("slack registers tile the ancilla block") {
  for (int n = 5; n <= 10; ++n) {
    std::string seq(n, 'H');
    auto layout = ta::make_layout(n, hp_matrix(seq), LatticeKind::Cubic);
    int expected = layout.turn_bits;
    for (const auto& reg : layout.slacks) {
      CHECK(reg.pointer == expected);
      CHECK(reg.width == ta::mu(reg.i, reg.j));
      expected += reg.width;
    }
    if (!layout.slacks.empty()) {
      CHECK(layout.slacks.front().pointer == 3 * n - 8);
    }
    for (const auto& flag : layout.flags) {
      CHECK(flag.var == expected);
      ++expected;
    }
    CHECK(layout.total_vars() == expected);
    CHECK_THROWS_AS(layout.slack_pointer(0, 3), NoSlackRegisterError);
  }
}

TEST_CASE("registry matches the qubit-count formula") {
  // reference arithmetic straight from the closed forms
  auto formula = [](int n) {
    long count = 3L * n - 8;
    for (int i = 0; i <= n - 5; ++i) {
      for (int j = i + 4; j <= n - 1; ++j) {
        if ((j - i) % 2 == 0) {
          count += static_cast<long>(std::ceil(2.0 * std::log2(double(j - i))));
        }
      }
    }
    for (int j = 0; j <= n - 4; ++j) {
      for (int k = j + 3; k <= n - 1; ++k) {
        if ((k - j) % 2 == 1) ++count;
      }
    }
    return count;
  };
  for (int n = 4; n <= 12; ++n) {
    std::string seq(n, 'H');
    auto layout = ta::make_layout(n, hp_matrix(seq), LatticeKind::Cubic);
    CHECK(static_cast<long>(layout.registry().size()) == formula(n));
    CHECK(layout.registry().count(VarRole::Turn) ==
          static_cast<std::size_t>(3 * n - 8));
  }
  // N=4: 4 turn bits, no slack pairs, one flag
  auto l4 = ta::make_layout(4, hp_matrix("HPPH"), LatticeKind::Cubic);
  CHECK(l4.total_vars() == 5);
}

TEST_CASE("overlap penalty bottoms out at lambda on coincident pairs") {
  const std::string seq = "PPPPP";
  auto P = hp_matrix(seq);
  auto layout = ta::make_layout(5, P, LatticeKind::Cubic);
  const double lambda = 2.5;
  Polynomial h = ta::build_h_olap(layout, lambda);

  // square walk +x,+y,-x,-y puts residue 4 on residue 0
  Fold square;
  square.sequence = seq;
  square.coords = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}};
  auto turn_bits = bits_for_fold(square, LatticeKind::Cubic);
  auto completed = ta::complete_with_optimal_ancillas(layout, P, turn_bits);
  CHECK(h.evaluate(completed) == doctest::Approx(lambda).epsilon(1e-12));

  // straight walk: D = 16, slack absorbs the inequality exactly
  Fold straight;
  straight.sequence = seq;
  straight.coords = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}};
  auto straight_bits =
      ta::complete_with_optimal_ancillas(layout, P, bits_for_fold(straight, LatticeKind::Cubic));
  CHECK(h.evaluate(straight_bits) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("optimal completion reproduces penalties plus contacts") {
  struct Case {
    std::string seq;
    LatticeKind kind;
  };
  for (const Case& c : {Case{"HPPH", LatticeKind::Cubic},
                        Case{"HPPHP", LatticeKind::Cubic},
                        Case{"HPHHPH", LatticeKind::Cubic},
                        Case{"HPPHP", LatticeKind::Planar}}) {
    const int n = static_cast<int>(c.seq.size());
    auto P = InteractionMatrix::build(c.seq, PotentialTable::hp());
    ta::Lambdas lam{2.0, 3.0, 5.0};
    EncodedProblem problem = ta::encode(c.seq, P, c.kind, lam);
    auto layout = ta::make_layout(n, P, c.kind);
    const int nbits = free_bit_count(c.kind, n);
    for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
      auto turn_bits = turn_assignment(mask, nbits);
      auto full = ta::complete_with_optimal_ancillas(layout, P, turn_bits);
      auto audit = ta::audit_turn_assignment(layout, P, turn_bits);
      double expected = lam.back * audit.reversals + lam.redun * audit.invalid_codes +
                        lam.olap * audit.overlap_pairs + audit.contact_energy;
      CHECK(problem.hamiltonian.evaluate(full) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("ground state of encode(HPPH) decodes to the bent fold") {
  auto P = hp_matrix("HPPH");
  EncodedProblem problem = ta::encode("HPPH", P, LatticeKind::Cubic);
  CHECK(problem.num_vars() == 5);
  auto result = solve::exhaustive_solve(problem.hamiltonian,
                                        static_cast<std::uint32_t>(problem.num_vars()));
  CHECK(result.min_energy == doctest::Approx(-1.0).epsilon(1e-12));
  REQUIRE(!result.minimizers.empty());
  for (const auto& bits : result.minimizers) {
    auto decoded = problem.decode(bits);
    REQUIRE(decoded.valid);
    CHECK(fold_energy(*decoded.fold, P) == -1.0);
  }
}

TEST_CASE("invalid decodings always cost more than any valid fold") {
  for (const std::string& seq : {std::string("HPPH"), std::string("HHPHH")}) {
    const int n = static_cast<int>(seq.size());
    auto P = hp_matrix(seq);
    EncodedProblem problem = ta::encode(seq, P, LatticeKind::Cubic);
    auto layout = ta::make_layout(n, P, LatticeKind::Cubic);
    const int nbits = free_bit_count(LatticeKind::Cubic, n);

    double worst_valid = -1e300;
    for (std::uint32_t mask = 0; mask < (1u << nbits); ++mask) {
      auto turn_bits = turn_assignment(mask, nbits);
      bool valid = true;
      try {
        valid = fold_from_bits(turn_bits, seq, LatticeKind::Cubic).valid();
      } catch (const InvalidTurnError&) {
        valid = false;
      }
      if (!valid) continue;
      auto full = ta::complete_with_optimal_ancillas(layout, P, turn_bits);
      worst_valid = std::max(worst_valid, problem.hamiltonian.evaluate(full));
    }

    const int total = layout.total_vars();
    REQUIRE(total <= 16);
    std::vector<std::uint8_t> bits(total);
    for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
      for (int b = 0; b < total; ++b) bits[b] = (mask >> b) & 1;
      auto turn_bits = std::vector<std::uint8_t>(bits.begin(), bits.begin() + nbits);
      bool valid = true;
      try {
        valid = fold_from_bits(turn_bits, seq, LatticeKind::Cubic).valid();
      } catch (const InvalidTurnError&) {
        valid = false;
      }
      if (valid) continue;
      CHECK(problem.hamiltonian.evaluate(bits) > worst_valid + 0.5);
    }
  }
}

TEST_CASE("planar encoding reproduces the PSVKMA oracle minimum") {
  auto P = InteractionMatrix::build("PSVKMA", mj());
  SawResult oracle = saw_enumerate("PSVKMA", P, LatticeKind::Planar);
  EncodedProblem problem = ta::encode("PSVKMA", P, LatticeKind::Planar);
  auto result = solve::exhaustive_solve(problem.hamiltonian,
                                        static_cast<std::uint32_t>(problem.num_vars()));
  CHECK(result.min_energy == doctest::Approx(oracle.min_energy).epsilon(1e-9));
  for (const auto& bits : result.minimizers) {
    auto decoded = problem.decode(bits);
    REQUIRE(decoded.valid);
    CHECK(fold_energy(*decoded.fold, P) ==
          doctest::Approx(oracle.min_energy).epsilon(1e-9));
  }
}

TEST_CASE("problem file round trip") {
  auto P = hp_matrix("HPPHP");
  EncodedProblem problem = ta::encode("HPPHP", P, LatticeKind::Cubic);
  std::stringstream ss;
  problem.save(ss);
  EncodedProblem back = EncodedProblem::load(ss);
  CHECK(back.encoder == problem.encoder);
  CHECK(back.sequence == problem.sequence);
  CHECK(back.lambdas == problem.lambdas);
  CHECK(back.registry == problem.registry);
  CHECK(back.hamiltonian == problem.hamiltonian);
}
