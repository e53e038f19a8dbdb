#pragma once

#include <cstdint>
#include <vector>

#include "latfold/encoded.hpp"
#include "latfold/polynomial.hpp"

namespace latfold::reduction {

struct ReductionResult {
  Polynomial reduced;
  ReductionMap map;
};

/// Quadratize by repeated product substitution: pick the variable pair that
/// co-occurs in the most terms of degree >= 3, replace it everywhere in
/// those terms with a fresh ancilla w, and add the penalty
/// M*(uv - 2uw - 2vw + 3w) with M = 1 + 2*sum|c| over the rewritten terms.
/// Minimizing over the ancillas reproduces the input value pointwise.
ReductionResult reduce_to_quadratic(const Polynomial& p, VarIndex first_ancilla);

/// Reduce a whole problem; the registry gains reduction-ancilla entries and
/// the map rides along in the problem file.
EncodedProblem reduce(const EncodedProblem& problem);

struct VerifyReport {
  bool energy_preserved = false;
  bool argmin_preserved = false;
  double min_original = 0.0;
  double min_reduced = 0.0;
  std::uint64_t original_minimizers = 0;
};

/// Exhaustive certificate over every assignment (original + ancilla): the
/// ground energy and the projection of the minimizer set onto the original
/// variables must both survive the reduction. Throws CapExceededError when
/// the total variable count is above the cap.
VerifyReport verify_reduction(const Polynomial& original, int original_vars,
                              const Polynomial& reduced, const ReductionMap& map,
                              int cap = 24);

}  // namespace latfold::reduction
