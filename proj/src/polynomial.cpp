#include "latfold/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace latfold {

Term::Term(std::initializer_list<VarIndex> vars) : vars_(vars) {
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

Term Term::of(std::vector<VarIndex> vars) {
  Term t;
  t.vars_ = std::move(vars);
  std::sort(t.vars_.begin(), t.vars_.end());
  t.vars_.erase(std::unique(t.vars_.begin(), t.vars_.end()), t.vars_.end());
  return t;
}

bool Term::contains(VarIndex v) const {
  return std::binary_search(vars_.begin(), vars_.end(), v);
}

Term Term::merged_with(const Term& other) const {
  Term out;
  out.vars_.reserve(vars_.size() + other.vars_.size());
  std::set_union(vars_.begin(), vars_.end(), other.vars_.begin(),
                 other.vars_.end(), std::back_inserter(out.vars_));
  return out;
}

Term Term::without(VarIndex u, VarIndex v) const {
  Term out;
  out.vars_.reserve(vars_.size());
  for (VarIndex w : vars_) {
    if (w != u && w != v) out.vars_.push_back(w);
  }
  return out;
}

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add_term(Term::constant(), c);
  return p;
}

Polynomial Polynomial::variable(VarIndex v) {
  Polynomial p;
  p.add_term(Term{v}, 1.0);
  return p;
}

Polynomial Polynomial::literal(VarIndex v, bool negated) {
  Polynomial p;
  if (negated) {
    p.add_term(Term::constant(), 1.0);
    p.add_term(Term{v}, -1.0);
  } else {
    p.add_term(Term{v}, 1.0);
  }
  return p;
}

void Polynomial::add_term(const Term& t, double coeff) {
  auto [it, inserted] = terms_.try_emplace(t, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < kCoeffZero) terms_.erase(it);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [t, c] : other.terms_) add_term(t, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [t, c] : other.terms_) add_term(t, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [t, c] : terms_) c *= s;
  return *this;
}

namespace {

// Multiplication of multilinear polynomials over binary variables is an
// OR-convolution of index sets; with the joint support packed into 64 bits
// the inner loop is a couple of integer ops per term pair.
Polynomial masked_mul(const Polynomial& a, const Polynomial& b,
                      const std::vector<VarIndex>& support) {
  std::vector<VarIndex> slot(support.back() + 1, 0);
  for (std::size_t i = 0; i < support.size(); ++i) slot[support[i]] = static_cast<VarIndex>(i);
  auto pack = [&slot](const Term& t) {
    std::uint64_t mask = 0;
    for (VarIndex v : t.vars()) mask |= 1ull << slot[v];
    return mask;
  };
  std::vector<std::pair<std::uint64_t, double>> ta, tb;
  ta.reserve(a.terms().size());
  tb.reserve(b.terms().size());
  for (const auto& [t, c] : a.terms()) ta.emplace_back(pack(t), c);
  for (const auto& [t, c] : b.terms()) tb.emplace_back(pack(t), c);

  std::unordered_map<std::uint64_t, double> acc;
  acc.reserve(ta.size() + tb.size());
  for (const auto& [ma, ca] : ta) {
    for (const auto& [mb, cb] : tb) {
      acc[ma | mb] += ca * cb;
    }
  }

  Polynomial out;
  std::vector<VarIndex> vars;
  for (const auto& [mask, coeff] : acc) {
    if (std::abs(coeff) < kCoeffZero) continue;
    vars.clear();
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (mask >> i & 1) vars.push_back(support[i]);
    }
    out.add_term(Term::of(vars), coeff);
  }
  return out;
}

}  // namespace

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.term_count() > 4 && b.term_count() > 4) {
    std::vector<VarIndex> sa = a.support();
    std::vector<VarIndex> sb = b.support();
    std::vector<VarIndex> support;
    std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(),
                   std::back_inserter(support));
    if (!support.empty() && support.size() <= 64) {
      return masked_mul(a, b, support);
    }
  }
  Polynomial out;
  for (const auto& [ta, ca] : a.terms_) {
    for (const auto& [tb, cb] : b.terms_) {
      out.add_term(ta.merged_with(tb), ca * cb);
    }
  }
  return out;
}

Polynomial operator-(const Polynomial& a) {
  Polynomial out = a;
  out *= -1.0;
  return out;
}

std::size_t Polynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [t, c] : terms_) d = std::max(d, t.degree());
  return d;
}

double Polynomial::coefficient(const Term& t) const {
  auto it = terms_.find(t);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::abs_coefficient_sum() const {
  double s = 0.0;
  for (const auto& [t, c] : terms_) {
    if (!t.is_constant()) s += std::abs(c);
  }
  return s;
}

double Polynomial::min_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [t, c] : terms_) {
    if (t.is_constant()) continue;
    double a = std::abs(c);
    if (m == 0.0 || a < m) m = a;
  }
  return m;
}

std::vector<VarIndex> Polynomial::support() const {
  std::vector<VarIndex> out;
  for (const auto& [t, c] : terms_) {
    out.insert(out.end(), t.vars().begin(), t.vars().end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<VarIndex> Polynomial::max_var() const {
  std::optional<VarIndex> m;
  for (const auto& [t, c] : terms_) {
    if (!t.vars().empty()) {
      VarIndex v = t.vars().back();
      if (!m || v > *m) m = v;
    }
  }
  return m;
}

double Polynomial::evaluate(std::span<const std::uint8_t> bits) const {
  double sum = 0.0;
  for (const auto& [t, c] : terms_) {
    bool active = true;
    for (VarIndex v : t.vars()) {
      if (v >= bits.size()) {
        throw MissingVariableError("evaluate: variable " + std::to_string(v) +
                                   " is unassigned");
      }
      if (!bits[v]) {
        active = false;
        break;
      }
    }
    if (active) sum += c;
  }
  return sum;
}

Polynomial Polynomial::fix(const PartialAssignment& fixed) const {
  Polynomial out;
  std::vector<VarIndex> kept;
  for (const auto& [t, c] : terms_) {
    kept.clear();
    bool dead = false;
    for (VarIndex v : t.vars()) {
      auto it = fixed.find(v);
      if (it == fixed.end()) {
        kept.push_back(v);
      } else if (it->second == 0) {
        dead = true;
        break;
      }
      // fixed to 1: drop the index
    }
    if (!dead) out.add_term(Term::of(kept), c);
  }
  return out;
}

bool Polynomial::approx_equal(const Polynomial& a, const Polynomial& b,
                              double tol) {
  for (const auto& [t, c] : a.terms_) {
    if (std::abs(c - b.coefficient(t)) > tol) return false;
  }
  for (const auto& [t, c] : b.terms_) {
    if (std::abs(c - a.coefficient(t)) > tol) return false;
  }
  return true;
}

namespace {

std::string format_coeff(double c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c);
  return buf;
}

}  // namespace

void Polynomial::write_text(std::ostream& os) const {
  for (const auto& [t, c] : terms_) {
    if (t.is_constant()) {
      os << "const";
    } else {
      bool first = true;
      for (VarIndex v : t.vars()) {
        if (!first) os << ' ';
        os << v;
        first = false;
      }
    }
    os << " : " << format_coeff(c) << '\n';
  }
}

std::string Polynomial::to_text() const {
  std::ostringstream oss;
  write_text(oss);
  return oss.str();
}

Polynomial Polynomial::parse_line(const std::string& line) {
  std::istringstream iss(line);
  std::vector<VarIndex> vars;
  std::string tok;
  bool constant = false;
  bool seen_sep = false;
  double coeff = 0.0;
  while (iss >> tok) {
    if (tok == ":") {
      if (!(iss >> coeff)) throw FormatError("term line missing coefficient: " + line);
      seen_sep = true;
      break;
    }
    if (tok == "const") {
      constant = true;
    } else {
      try {
        vars.push_back(static_cast<VarIndex>(std::stoul(tok)));
      } catch (const std::exception&) {
        throw FormatError("bad variable index in term line: " + line);
      }
    }
  }
  if (!seen_sep) throw FormatError("term line missing ':' separator: " + line);
  if (constant && !vars.empty()) throw FormatError("malformed constant term: " + line);
  Polynomial p;
  p.add_term(Term::of(std::move(vars)), coeff);
  return p;
}

Polynomial Polynomial::from_text(std::istream& is) {
  Polynomial p;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    p += parse_line(line);
  }
  return p;
}

}  // namespace latfold
