#include <random>

#include "doctest.h"
#include "latfold/reduction.hpp"

using namespace latfold;
namespace rd = latfold::reduction;

namespace {

Polynomial random_poly(std::mt19937& rng, int num_vars, int num_terms,
                       int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  std::uniform_int_distribution<int> var(0, num_vars - 1);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  Polynomial p;
  for (int t = 0; t < num_terms; ++t) {
    std::vector<VarIndex> vars;
    for (int k = 0, d = deg(rng); k < d; ++k) vars.push_back(var(rng));
    p.add_term(Term::of(std::move(vars)), coeff(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("quadratic input passes through untouched") {
  Polynomial p = Polynomial::variable(0) * Polynomial::variable(1) +
                 Polynomial::constant(3.0);
  auto result = rd::reduce_to_quadratic(p, 10);
  CHECK(result.reduced == p);
  CHECK(result.map.empty());
}

TEST_CASE("cubic term gadget preserves the minimum over the ancilla") {
  const double c = -2.5;
  Polynomial p = c * (Polynomial::variable(0) * Polynomial::variable(1) *
                      Polynomial::variable(2));
  auto result = rd::reduce_to_quadratic(p, 3);
  REQUIRE(result.map.gadgets.size() == 1);
  const Gadget& g = result.map.gadgets[0];
  CHECK(g.ancilla == 3);
  CHECK(g.u == 0);  // most frequent pair, ties to the lexicographic smallest
  CHECK(g.v == 1);
  CHECK(g.penalty == doctest::Approx(1.0 + 2.0 * std::abs(c)));
  CHECK(result.reduced.degree() == 2);

  // per original assignment, the ancilla minimum reproduces the input
  std::vector<std::uint8_t> bits(4, 0);
  for (std::uint32_t x = 0; x < 8; ++x) {
    for (int b = 0; b < 3; ++b) bits[b] = (x >> b) & 1;
    double best = 1e300;
    for (int w = 0; w < 2; ++w) {
      bits[3] = static_cast<std::uint8_t>(w);
      best = std::min(best, result.reduced.evaluate(bits));
    }
    CHECK(best == doctest::Approx(p.evaluate(
                      std::span<const std::uint8_t>(bits).subspan(0, 3))));
  }

  auto report = rd::verify_reduction(p, 3, result.reduced, result.map);
  CHECK(report.energy_preserved);
  CHECK(report.argmin_preserved);
}

TEST_CASE("random high-degree polynomials reduce soundly") {
  std::mt19937 rng(23);
  for (int round = 0; round < 15; ++round) {
    Polynomial p = random_poly(rng, 8, 10, 4);
    auto result = rd::reduce_to_quadratic(p, 8);
    CHECK(result.reduced.degree() <= 2);
    if (8 + result.map.gadgets.size() > 24) continue;
    auto report = rd::verify_reduction(p, 8, result.reduced, result.map);
    CHECK(report.energy_preserved);
    CHECK(report.argmin_preserved);
    CHECK(report.min_original == doctest::Approx(report.min_reduced));
  }
}

TEST_CASE("reduction is idempotent") {
  std::mt19937 rng(29);
  Polynomial p = random_poly(rng, 6, 8, 4);
  auto once = rd::reduce_to_quadratic(p, 6);
  auto twice = rd::reduce_to_quadratic(once.reduced,
                                       6 + static_cast<VarIndex>(once.map.gadgets.size()));
  CHECK(twice.map.empty());
  CHECK(twice.reduced == once.reduced);
}

TEST_CASE("ancilla extension zeroes every penalty") {
  std::mt19937 rng(31);
  for (int round = 0; round < 10; ++round) {
    Polynomial p = random_poly(rng, 7, 9, 5);
    auto result = rd::reduce_to_quadratic(p, 7);
    const std::size_t total = 7 + result.map.gadgets.size();
    std::vector<std::uint8_t> original(7);
    for (std::uint32_t x = 0; x < (1u << 7); ++x) {
      for (int b = 0; b < 7; ++b) original[b] = (x >> b) & 1;
      auto extended = result.map.extend(original, total);
      CHECK(result.reduced.evaluate(extended) ==
            doctest::Approx(p.evaluate(original)).epsilon(1e-9));
    }
  }
}

TEST_CASE("certificate cap is enforced") {
  Polynomial p;
  std::vector<VarIndex> vars;
  for (VarIndex v = 0; v < 30; ++v) vars.push_back(v);
  p.add_term(Term::of(std::move(vars)), 1.0);
  auto result = rd::reduce_to_quadratic(p, 30);
  CHECK_THROWS_AS(rd::verify_reduction(p, 30, result.reduced, result.map),
                  CapExceededError);
}
