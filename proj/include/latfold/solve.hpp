#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "latfold/polynomial.hpp"

namespace latfold::solve {

/// Flattened CSR form of a polynomial for the inner solver loops:
/// term -> variables and variable -> terms, plus coefficients.
struct CompiledProblem {
  std::uint32_t num_vars = 0;
  double constant = 0.0;
  std::vector<double> coeff;
  std::vector<std::uint32_t> term_off;
  std::vector<std::uint32_t> term_vars;
  std::vector<std::uint32_t> var_off;
  std::vector<std::uint32_t> var_terms;

  static CompiledProblem build(const Polynomial& p, std::uint32_t num_vars);
  std::size_t term_count() const { return coeff.size(); }
  std::uint32_t term_load(std::uint32_t v) const {
    return var_off[v + 1] - var_off[v];
  }
  double evaluate(std::span<const std::uint8_t> bits) const;
};

/// Mutable assignment with per-term unset-variable counters; single bit
/// flips update the energy in time proportional to the variable's term load.
struct EvalState {
  const CompiledProblem* cp = nullptr;
  std::vector<std::uint8_t> bits;
  std::vector<std::uint16_t> zeros;
  double energy = 0.0;

  void init(const CompiledProblem& problem, std::vector<std::uint8_t> assignment);
  double flip_delta(std::uint32_t v) const;
  void flip(std::uint32_t v);
  void resync() { energy = cp->evaluate(bits); }
};

struct ExhaustiveOptions {
  int max_vars = 30;
  bool parallel = true;
};

struct ExhaustiveResult {
  double min_energy = 0.0;
  std::vector<std::vector<std::uint8_t>> minimizers;  // full-width, sorted
};

/// Exact minimum over all assignments of the free variables (other
/// variables pinned to `base`). Gray-code incremental sweep, parallel over
/// leading blocks; every candidate is re-evaluated from scratch before it
/// may enter the minimizer set. Throws TooLargeError above max_vars.
ExhaustiveResult exhaustive_solve(const CompiledProblem& cp,
                                  const std::vector<VarIndex>& free_vars,
                                  const std::vector<std::uint8_t>& base,
                                  const ExhaustiveOptions& options = {});
ExhaustiveResult exhaustive_solve(const Polynomial& p, std::uint32_t num_vars,
                                  const ExhaustiveOptions& options = {});

/// Naive reference (direct evaluation per assignment), kept for testing the
/// incremental kernel at small sizes.
ExhaustiveResult exhaustive_solve_reference(const Polynomial& p,
                                            std::uint32_t num_vars);

struct Schedule {
  double t_hot = 0.0;   // <= 0: sum of |coefficients|
  double t_cold = 0.0;  // <= 0: 1e-3 * min nonzero |coefficient|
  int sweeps = 64;
};

Schedule resolve_schedule(const Polynomial& p, Schedule schedule);

struct Sample {
  std::vector<std::uint8_t> bits;
  double energy = 0.0;
  std::uint32_t subproblem = 0;
  bool postprocessed = false;
};

struct SaOptions {
  Schedule schedule;
  std::uint64_t seed = 1;
  bool parallel = true;
  /// Optional warm start: called once per sample after the free variables
  /// are randomized, before the sweeps begin. Problem-aware callers use
  /// this to seed consistent ancilla registers for the random prefix.
  std::function<void(std::mt19937_64&, std::vector<std::uint8_t>&)> initializer;
};

/// Metropolis single-flip annealing, one independent restart per sample.
/// Sample i is generated by an RNG seeded from (seed, i), so results are
/// identical whatever the thread count. Zero sweeps yields uniform random
/// assignments. Each sample's energy is a fresh full evaluation.
std::vector<Sample> simulated_annealing(const CompiledProblem& cp,
                                        const std::vector<VarIndex>& free_vars,
                                        const std::vector<std::uint8_t>& base,
                                        int num_samples, const SaOptions& options);
std::vector<Sample> simulated_annealing(const Polynomial& p,
                                        std::uint32_t num_vars, int num_samples,
                                        const SaOptions& options);

/// Greedy best-improvement descent: repeatedly flip the single bit with the
/// largest energy decrease until no flip improves. Never increases energy.
Sample single_flip_descent(const CompiledProblem& cp,
                           const std::vector<VarIndex>& free_vars, Sample sample);
Sample single_flip_descent(const Polynomial& p, std::uint32_t num_vars,
                           Sample sample);

/// Spin-reversal gauge on a 2-local problem: in spin coordinates h_i -> g_i
/// h_i and J_ij -> g_i g_j J_ij, realized as the substitution x_i -> 1 - x_i
/// wherever g_i = -1. Applying the same gauge twice restores the input
/// bit-exactly. Throws NotQuadraticError above degree 2.
Polynomial spin_reversal_gauge(const Polynomial& p,
                               std::span<const std::int8_t> gauge);

struct Subproblem {
  std::uint32_t id = 0;
  std::vector<std::uint8_t> prefix;  // values of variables 0..k-1
  Polynomial poly;
};

/// Fix the first k variables to each of the 2^k patterns (id read as a
/// big-endian bit string). The minimum over the pieces is the global one.
std::vector<Subproblem> split_subproblems(const Polynomial& p, int k);

struct RunStats {
  std::uint64_t total = 0;
  std::uint64_t hits = 0;
  double p_s = 0.0;
  bool r99_finite = true;
  std::uint64_t r99 = 0;
  double t_sample_us = 0.0;
  double tts_s = 0.0;
};

/// p_s = hits/total, R99 = ceil(log(0.01)/log(1-p_s)), TTS = R99 * t_sample.
/// hits == 0 yields an infinite-R99 sentinel (r99_finite = false); strict
/// mode instead throws DegenerateProbabilityError for hits in {0, total}.
RunStats compute_stats(std::uint64_t hits, std::uint64_t total,
                       double t_sample_us, bool strict = false);

std::uint64_t count_hits(const std::vector<Sample>& samples, double ground_energy,
                         double tol = kValueTol);

std::string stats_text(const RunStats& stats);
std::string stats_json(const RunStats& stats);

}  // namespace latfold::solve
