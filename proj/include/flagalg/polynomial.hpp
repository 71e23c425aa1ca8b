#pragma once

#include <flagalg/numeric.hpp>

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace flagalg {

// Exponent vector; width fixed by the ambient polynomial ring.
using Monomial = std::vector<int>;

inline int monomial_weight(const Monomial& m) {
  int s = 0;
  for (int e : m) s += e;
  return s;
}

inline Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

// a | b as monomials
inline bool monomial_divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

// graded lexicographic, used for leading terms and deterministic printing
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int wa = monomial_weight(a), wb = monomial_weight(b);
    if (wa != wb) return wa < wb;
    return a < b;  // lex tiebreak
  }
};

// Multivariate polynomial over Q.  Generators all sit in cohomological
// degree 2, so an exponent-weight w term has degree 2w.
class Polynomial {
 public:
  Polynomial() : nvars_(0) {}
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial zero(std::size_t nvars) { return Polynomial(nvars); }
  static Polynomial constant(std::size_t nvars, const Rat& c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_[Monomial(nvars, 0)] = c;
    return p;
  }
  static Polynomial variable(std::size_t nvars, std::size_t i, const Rat& coeff = Rat(1)) {
    Polynomial p(nvars);
    if (coeff != 0) {
      Monomial m(nvars, 0);
      m[i] = 1;
      p.terms_[m] = coeff;
    }
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rat, MonomialOrder>& terms() const { return terms_; }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && monomial_weight(terms_.begin()->first) == 0);
  }
  Rat constant_value() const {
    if (terms_.empty()) return Rat(0);
    return terms_.begin()->second;
  }

  void add_term(const Monomial& m, const Rat& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_[m] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  Polynomial operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
  }
  Polynomial operator-() const {
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }
  Polynomial operator*(const Polynomial& o) const {
    Polynomial r(nvars_);
    for (const auto& [m1, c1] : terms_)
      for (const auto& [m2, c2] : o.terms_) r.add_term(monomial_mul(m1, m2), c1 * c2);
    return r;
  }
  Polynomial operator*(const Rat& c) const {
    Polynomial r(nvars_);
    if (c == 0) return r;
    for (const auto& [m, cc] : terms_) r.terms_[m] = cc * c;
    return r;
  }
  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(nvars_, 1);
    Polynomial b = *this;
    while (k) {
      if (k & 1u) r = r * b;
      b = b * b;
      k >>= 1u;
    }
    return r;
  }

  // homogeneous cohomological degree, or nullopt for 0 / mixed
  std::optional<int> degree() const {
    if (terms_.empty()) return std::nullopt;
    int w = monomial_weight(terms_.begin()->first);
    for (const auto& [m, c] : terms_)
      if (monomial_weight(m) != w) return std::nullopt;
    return 2 * w;
  }
  bool is_homogeneous() const { return terms_.empty() || degree().has_value(); }

  std::pair<Monomial, Rat> leading_term() const {
    if (terms_.empty()) throw std::logic_error("leading term of zero");
    auto it = std::prev(terms_.end());
    return {it->first, it->second};
  }

  // substitution: variable i |-> images[i]; result lives in the ring of the
  // images
  Polynomial substitute(const std::vector<Polynomial>& images, std::size_t target_nvars) const {
    Polynomial r(target_nvars);
    for (const auto& [m, c] : terms_) {
      Polynomial t = Polynomial::constant(target_nvars, c);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (int e = 0; e < m[i]; ++e) t = t * images[i];
      r = r + t;
    }
    return r;
  }

  std::string str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // print highest degree last for stability
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      bool unit_coeff = (c == 1) && monomial_weight(m) > 0;
      if (!unit_coeff) os << to_string(c);
      bool printed = !unit_coeff;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (m[i] == 0) continue;
        if (printed) os << "*";
        os << names[i];
        if (m[i] > 1) os << "^" << m[i];
        printed = true;
      }
    }
    return os.str();
  }

 private:
  std::size_t nvars_;
  std::map<Monomial, Rat, MonomialOrder> terms_;
};

// Exact division test for a single divisor: repeatedly cancel leading terms.
// Returns the quotient when divisor | dividend, nullopt otherwise.
inline std::optional<Polynomial> exact_divide(const Polynomial& dividend,
                                              const Polynomial& divisor) {
  if (divisor.is_zero()) return std::nullopt;
  Polynomial r = dividend;
  Polynomial q(dividend.nvars());
  auto [lm, lc] = divisor.leading_term();
  while (!r.is_zero()) {
    auto [rm, rc] = r.leading_term();
    if (!monomial_divides(lm, rm)) return std::nullopt;
    Monomial diff(rm.size());
    for (std::size_t i = 0; i < rm.size(); ++i) diff[i] = rm[i] - lm[i];
    Rat coeff = rc / lc;
    Polynomial t(dividend.nvars());
    t.add_term(diff, coeff);
    q = q + t;
    r = r - t * divisor;
  }
  return q;
}

inline bool divides(const Polynomial& divisor, const Polynomial& dividend) {
  return exact_divide(dividend, divisor).has_value();
}

}  // namespace flagalg
