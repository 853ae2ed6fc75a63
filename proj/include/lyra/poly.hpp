// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyra/rational.hpp"

namespace lyra {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent vector of a monomial x^alpha.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : exps_(n, 0) {}
  explicit MultiIndex(std::vector<unsigned> exps) : exps_(std::move(exps)) {}
  MultiIndex(std::initializer_list<unsigned> exps) : exps_(exps) {}

  /// e_i scaled by `power`.
  static MultiIndex unit(std::size_t n, std::size_t i, unsigned power = 1) {
    MultiIndex m(n);
    m.exps_.at(i) = power;
    return m;
  }

  std::size_t size() const { return exps_.size(); }
  unsigned operator[](std::size_t i) const { return exps_[i]; }
  unsigned& operator[](std::size_t i) { return exps_[i]; }
  std::span<const unsigned> exponents() const { return exps_; }

  unsigned degree() const {
    unsigned d = 0;
    for (unsigned e : exps_) d += e;
    return d;
  }

  /// Index of the single variable if this is x_i^d with d >= 1.
  std::optional<std::size_t> pure_variable() const {
    std::optional<std::size_t> var;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i] == 0) continue;
      if (var) return std::nullopt;
      var = i;
    }
    return var;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    if (o.size() != size()) throw DimensionError("multi-index dimension mismatch");
    MultiIndex out(*this);
    for (std::size_t i = 0; i < size(); ++i) out.exps_[i] += o.exps_[i];
    return out;
  }

  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<unsigned> exps_;
};

/// Graded-lex order, highest first: larger total degree first, ties broken
/// lexicographically with x1 most significant.
struct GrlexDescending {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    auto ea = a.exponents(), eb = b.exponents();
    return std::lexicographical_compare(eb.begin(), eb.end(), ea.begin(), ea.end());
  }
};

/// Sparse multivariate polynomial with coefficients in C. C is either Rational
/// or an affine form over template parameters; it must provide +, -, unary -,
/// multiplication by Rational and a free `is_zero`.
template <class C>
class BasicPoly {
 public:
  using Coeff = C;
  using Terms = std::map<MultiIndex, C, GrlexDescending>;

  BasicPoly() = default;
  explicit BasicPoly(std::size_t dimension) : dim_(dimension) {}

  static BasicPoly monomial(const MultiIndex& alpha, const C& coeff) {
    BasicPoly p(alpha.size());
    p.add_term(alpha, coeff);
    return p;
  }
  static BasicPoly constant(std::size_t dimension, const C& coeff) {
    return monomial(MultiIndex(dimension), coeff);
  }

  std::size_t dimension() const { return dim_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndex& alpha, const C& coeff) {
    if (alpha.size() != dim_) throw DimensionError("monomial dimension does not match polynomial");
    if (lyra_is_zero(coeff)) return;
    auto [it, inserted] = terms_.try_emplace(alpha, coeff);
    if (!inserted) {
      it->second += coeff;
      if (lyra_is_zero(it->second)) terms_.erase(it);
    }
  }

  C coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? C{} : it->second;
  }

  std::optional<unsigned> min_degree() const {
    if (terms_.empty()) return std::nullopt;
    return std::prev(terms_.end())->first.degree();
  }
  std::optional<unsigned> max_degree() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.begin()->first.degree();
  }

  /// Degree-d part; zero if no term has degree d.
  BasicPoly homogeneous_layer(unsigned d) const {
    BasicPoly out(dim_);
    for (const auto& [alpha, c] : terms_)
      if (alpha.degree() == d) out.terms_.emplace_hint(out.terms_.end(), alpha, c);
    return out;
  }
  BasicPoly lowest_layer() const { return terms_.empty() ? *this : homogeneous_layer(*min_degree()); }
  BasicPoly highest_layer() const { return terms_.empty() ? *this : homogeneous_layer(*max_degree()); }

  /// Largest exponent of x_i over all terms (0 for the zero polynomial).
  unsigned max_exponent(std::size_t i) const {
    unsigned m = 0;
    for (const auto& [alpha, c] : terms_) m = std::max(m, alpha[i]);
    return m;
  }

  BasicPoly derivative(std::size_t i) const {
    if (i >= dim_) throw DimensionError("derivative variable out of range");
    BasicPoly out(dim_);
    for (const auto& [alpha, c] : terms_) {
      if (alpha[i] == 0) continue;
      MultiIndex beta = alpha;
      beta[i] -= 1;
      out.add_term(beta, c * Rational(alpha[i]));
    }
    return out;
  }

  BasicPoly& operator+=(const BasicPoly& o) {
    check_dim(o);
    for (const auto& [alpha, c] : o.terms_) add_term(alpha, c);
    return *this;
  }
  BasicPoly& operator-=(const BasicPoly& o) {
    check_dim(o);
    for (const auto& [alpha, c] : o.terms_) add_term(alpha, -c);
    return *this;
  }
  BasicPoly& operator*=(const Rational& s) {
    if (lyra::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [alpha, c] : terms_) c = c * s;
    return *this;
  }

  friend BasicPoly operator+(BasicPoly a, const BasicPoly& b) { return a += b; }
  friend BasicPoly operator-(BasicPoly a, const BasicPoly& b) { return a -= b; }
  friend BasicPoly operator-(BasicPoly a) {
    for (auto& [alpha, c] : a.terms_) c = -c;
    return a;
  }
  friend BasicPoly operator*(BasicPoly a, const Rational& s) { return a *= s; }
  friend BasicPoly operator*(const Rational& s, BasicPoly a) { return a *= s; }

  bool operator==(const BasicPoly& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  void check_dim(const BasicPoly& o) const {
    if (o.dim_ != dim_) throw DimensionError("polynomial dimension mismatch");
  }

 private:
  static bool lyra_is_zero(const C& c) {
    using lyra::is_zero;
    return is_zero(c);
  }

  std::size_t dim_ = 0;
  Terms terms_;
};

using Polynomial = BasicPoly<Rational>;

/// Product of a C-polynomial with a concrete polynomial.
template <class C>
BasicPoly<C> multiply(const BasicPoly<C>& p, const Polynomial& q) {
  if (p.dimension() != q.dimension()) throw DimensionError("polynomial dimension mismatch");
  BasicPoly<C> out(p.dimension());
  for (const auto& [a, ca] : p.terms())
    for (const auto& [b, cb] : q.terms()) out.add_term(a + b, ca * cb);
  return out;
}

inline Polynomial operator*(const Polynomial& p, const Polynomial& q) { return multiply(p, q); }

Polynomial variable(std::size_t dimension, std::size_t i);
Polynomial pow(const Polynomial& p, unsigned exp);

/// Sum over x of p; the sum of squares sum x_i^2 is handy for encoding x != 0.
Polynomial squared_norm(std::size_t dimension);

Rational evaluate(const Polynomial& p, std::span<const Rational> x);
double evaluate(const Polynomial& p, std::span<const double> x);

std::vector<Polynomial> gradient(const Polynomial& p);

/// Polynomial system x' = f(x) with f(0) = 0.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<Polynomial> components);

  std::size_t dimension() const { return components_.size(); }
  const std::vector<Polynomial>& components() const { return components_; }
  const Polynomial& operator[](std::size_t i) const { return components_[i]; }

  std::vector<double> evaluate(std::span<const double> x) const;

  bool operator==(const VectorField&) const = default;

 private:
  std::vector<Polynomial> components_;
};

/// Canonical names x1..xn.
std::vector<std::string> default_variable_names(std::size_t n);

/// Renders p in graded-lex order, e.g. "-2*x1^4 - 2*x2^4" or "197/100*x1^2".
std::string to_string(const Polynomial& p, const std::vector<std::string>& names = {});
std::string monomial_to_string(const MultiIndex& alpha, const std::vector<std::string>& names);

}  // namespace lyra
