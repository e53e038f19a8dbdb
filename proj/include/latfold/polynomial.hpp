#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latfold/errors.hpp"

namespace latfold {

using VarIndex = std::uint32_t;

/// Product of distinct binary variables. Indices are kept strictly
/// increasing; the empty product is the constant term. Idempotence
/// (x^2 = x) is normalized away on construction.
class Term {
 public:
  Term() = default;
  Term(std::initializer_list<VarIndex> vars);
  static Term constant() { return Term(); }
  static Term of(std::vector<VarIndex> vars);

  const std::vector<VarIndex>& vars() const { return vars_; }
  std::size_t degree() const { return vars_.size(); }
  bool is_constant() const { return vars_.empty(); }
  bool contains(VarIndex v) const;

  /// Set union of the two index sets (product of the monomials).
  Term merged_with(const Term& other) const;
  /// Copy with the given variables removed.
  Term without(VarIndex u, VarIndex v) const;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term& a, const Term& b) {
    return a.vars_ <=> b.vars_;
  }

 private:
  std::vector<VarIndex> vars_;
};

/// Partial 0/1 assignment, keyed by variable index.
using PartialAssignment = std::map<VarIndex, std::uint8_t>;

/// Coefficients smaller than this in magnitude are treated as zero and
/// dropped from the canonical form.
inline constexpr double kCoeffZero = 1e-10;
/// Tolerance for value comparisons (energies, coefficients).
inline constexpr double kValueTol = 1e-9;

/// Sparse multilinear pseudo-boolean polynomial over binary variables.
/// Canonical form: no zero coefficients, no repeated index inside a term.
/// Immutable in spirit: all operators return fresh values, and a fully
/// constructed polynomial can be shared freely across threads.
class Polynomial {
 public:
  Polynomial() = default;

  static Polynomial zero() { return Polynomial(); }
  static Polynomial constant(double c);
  static Polynomial variable(VarIndex v);
  /// x_v (negated = false) or 1 - x_v (negated = true).
  static Polynomial literal(VarIndex v, bool negated);

  void add_term(const Term& t, double coeff);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a);

  const std::map<Term, double>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  std::size_t degree() const;
  bool is_zero() const { return terms_.empty(); }
  double coefficient(const Term& t) const;
  double constant_term() const { return coefficient(Term::constant()); }

  /// Sum of |coefficient| over all non-constant terms.
  double abs_coefficient_sum() const;
  /// Smallest nonzero |coefficient| over non-constant terms (0 if none).
  double min_abs_coefficient() const;

  /// Variables actually appearing, ascending.
  std::vector<VarIndex> support() const;
  std::optional<VarIndex> max_var() const;

  /// Evaluate under a full assignment; bits[v] must exist for every
  /// variable in the support or MissingVariableError is thrown.
  double evaluate(std::span<const std::uint8_t> bits) const;

  /// Substitute the fixed bits and renormalize over the free variables.
  Polynomial fix(const PartialAssignment& fixed) const;

  bool operator==(const Polynomial&) const = default;
  static bool approx_equal(const Polynomial& a, const Polynomial& b,
                           double tol = kValueTol);

  /// One term per line, `i j k : coeff` with sorted indices, the constant
  /// term as `const : coeff`. Coefficients round-trip bit-exactly.
  void write_text(std::ostream& os) const;
  std::string to_text() const;
  static Polynomial parse_line(const std::string& line);
  static Polynomial from_text(std::istream& is);

 private:
  std::map<Term, double> terms_;
};

}  // namespace latfold
