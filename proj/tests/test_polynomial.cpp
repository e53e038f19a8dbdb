#include <random>
#include <sstream>

#include "doctest.h"
#include "latfold/polynomial.hpp"

using namespace latfold;

namespace {

Polynomial random_poly(std::mt19937& rng, int num_vars, int num_terms,
                       int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> var(0, num_vars - 1);
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  Polynomial p;
  for (int t = 0; t < num_terms; ++t) {
    std::vector<VarIndex> vars;
    int d = deg(rng);
    for (int k = 0; k < d; ++k) vars.push_back(var(rng));
    p.add_term(Term::of(std::move(vars)), coeff(rng));
  }
  return p;
}

std::vector<std::uint8_t> assignment_bits(std::uint32_t mask, int n) {
  std::vector<std::uint8_t> bits(n);
  for (int b = 0; b < n; ++b) bits[b] = (mask >> b) & 1;
  return bits;
}

}  // namespace

TEST_CASE("literal builds x and 1-x") {
  Polynomial x0 = Polynomial::literal(0, false);
  CHECK(x0.term_count() == 1);
  CHECK(x0.coefficient(Term{0}) == 1.0);

  Polynomial not3 = Polynomial::literal(3, true);
  CHECK(not3.coefficient(Term::constant()) == 1.0);
  CHECK(not3.coefficient(Term{3}) == -1.0);

  std::vector<std::uint8_t> bits(4, 0);
  bits[3] = 1;
  CHECK(not3.evaluate(bits) == 0.0);
}

TEST_CASE("add cancels to the zero polynomial") {
  Polynomial a = Polynomial::variable(0);
  Polynomial b = Polynomial::variable(0) * -1.0;
  CHECK((a + b).is_zero());

  Polynomial c = Polynomial::constant(1.0) + 2.0 * Polynomial::variable(1);
  CHECK(c.term_count() == 2);
  CHECK((c + Polynomial::zero()) == c);
}

TEST_CASE("mul normalizes idempotent products") {
  Polynomial x0 = Polynomial::variable(0);
  CHECK(x0 * x0 == x0);
  CHECK((Polynomial::literal(0, true) * x0).is_zero());

  // (1-x0)(1-x1)x2 is the indicator of (0,0,1)
  Polynomial up = Polynomial::literal(0, true) * Polynomial::literal(1, true) *
                  Polynomial::variable(2);
  for (std::uint32_t mask = 0; mask < 8; ++mask) {
    auto bits = assignment_bits(mask, 3);
    double expect = (mask == 0b100) ? 1.0 : 0.0;  // bit order x0 x1 x2
    CHECK(up.evaluate(bits) == expect);
  }
}

TEST_CASE("evaluate matches the XNOR table") {
  // 1 - p - q + 2pq
  Polynomial xnor = Polynomial::constant(1.0) - Polynomial::variable(0) -
                    Polynomial::variable(1) +
                    2.0 * (Polynomial::variable(0) * Polynomial::variable(1));
  CHECK(xnor.evaluate(assignment_bits(0b11, 2)) == 1.0);
  CHECK(xnor.evaluate(assignment_bits(0b01, 2)) == 0.0);
  CHECK(xnor.evaluate(assignment_bits(0b00, 2)) == 1.0);
  CHECK(Polynomial::constant(5.0).evaluate({}) == 5.0);
}

TEST_CASE("evaluate requires all appearing variables") {
  Polynomial p = Polynomial::variable(4);
  std::vector<std::uint8_t> short_bits(3, 1);
  CHECK_THROWS_AS(p.evaluate(short_bits), MissingVariableError);
}

TEST_CASE("fix substitutes and renormalizes") {
  Polynomial p = Polynomial::variable(0) * Polynomial::variable(1);
  CHECK(p.fix({{0, 1}}) == Polynomial::variable(1));
  CHECK(p.fix({{0, 0}}).is_zero());
}

TEST_CASE("fix agrees with evaluate on every extension") {
  std::mt19937 rng(7);
  for (int round = 0; round < 40; ++round) {
    const int n = 8;
    Polynomial p = random_poly(rng, n, 12, 4);
    PartialAssignment fixed;
    std::uniform_int_distribution<int> pick(0, 2);
    for (int v = 0; v < n; ++v) {
      int choice = pick(rng);
      if (choice < 2) fixed[v] = static_cast<std::uint8_t>(choice);
    }
    Polynomial q = p.fix(fixed);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      auto bits = assignment_bits(mask, n);
      bool consistent = true;
      for (const auto& [v, value] : fixed) {
        if (bits[v] != value) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;
      CHECK(q.evaluate(bits) == doctest::Approx(p.evaluate(bits)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ring laws hold pointwise on random inputs") {
  std::mt19937 rng(11);
  const int n = 6;
  for (int round = 0; round < 25; ++round) {
    Polynomial a = random_poly(rng, n, 6, 3);
    Polynomial b = random_poly(rng, n, 6, 3);
    Polynomial c = random_poly(rng, n, 6, 3);
    CHECK(Polynomial::approx_equal(a * b, b * a));
    CHECK(Polynomial::approx_equal((a * b) * c, a * (b * c), 1e-7));
    CHECK(Polynomial::approx_equal(a * (b + c), a * b + a * c, 1e-8));
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      auto bits = assignment_bits(mask, n);
      CHECK((a * b).evaluate(bits) ==
            doctest::Approx(a.evaluate(bits) * b.evaluate(bits)).epsilon(1e-9));
    }
  }
}

TEST_CASE("canonical form never stores zeros or repeated indices") {
  std::mt19937 rng(3);
  for (int round = 0; round < 50; ++round) {
    Polynomial p = random_poly(rng, 8, 10, 4) * random_poly(rng, 8, 10, 4);
    for (const auto& [t, coeff] : p.terms()) {
      CHECK(std::abs(coeff) >= kCoeffZero);
      for (std::size_t i = 1; i < t.vars().size(); ++i) {
        CHECK(t.vars()[i - 1] < t.vars()[i]);
      }
    }
  }
}

TEST_CASE("text round trip is bit-exact") {
  std::mt19937 rng(5);
  for (int round = 0; round < 20; ++round) {
    Polynomial p = random_poly(rng, 10, 15, 5);
    p.add_term(Term::constant(), 0.1 + round * 1e-13);
    std::stringstream ss;
    p.write_text(ss);
    Polynomial back = Polynomial::from_text(ss);
    CHECK(back == p);
  }
}

TEST_CASE("text format shape") {
  Polynomial p;
  p.add_term(Term::constant(), 2.5);
  p.add_term(Term{0, 2, 7}, -1.0);
  std::string text = p.to_text();
  CHECK(text == "const : 2.5\n0 2 7 : -1\n");
  CHECK(Polynomial::parse_line("0 2 7 : -1") ==
        Polynomial::parse_line("0 7 2 : -1"));
}
