// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyra/poly.hpp"

namespace lyra {

/// Unknown template coefficient c_id.
struct Param {
  int id = 0;
  std::string name() const { return "c" + std::to_string(id); }
  auto operator<=>(const Param&) const = default;
};

/// Assignment of rational values to parameter ids.
using Assignment = std::map<int, Rational>;

class MissingParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear expression sum_p a_p * c_p + b over template parameters.
class AffineForm {
 public:
  AffineForm() = default;
  explicit AffineForm(Rational constant) : constant_(std::move(constant)) {}

  static AffineForm param(int id, Rational coeff = 1) {
    AffineForm f;
    if (!lyra::is_zero(coeff)) f.terms_.emplace(id, std::move(coeff));
    return f;
  }

  const std::map<int, Rational>& terms() const { return terms_; }
  const Rational& constant() const { return constant_; }
  Rational coefficient(int id) const {
    auto it = terms_.find(id);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  bool is_zero() const { return terms_.empty() && lyra::is_zero(constant_); }
  bool is_constant() const { return terms_.empty(); }
  std::set<int> params() const;

  AffineForm& operator+=(const AffineForm& o);
  AffineForm& operator-=(const AffineForm& o);
  AffineForm& operator*=(const Rational& s);

  friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
  friend AffineForm operator-(AffineForm a, const AffineForm& b) { return a -= b; }
  friend AffineForm operator-(AffineForm a) { return a *= Rational(-1); }
  friend AffineForm operator*(AffineForm a, const Rational& s) { return a *= s; }
  friend AffineForm operator*(const Rational& s, AffineForm a) { return a *= s; }

  bool operator==(const AffineForm&) const = default;

  /// Throws MissingParameter if a referenced param is unassigned.
  Rational evaluate(const Assignment& a) const;

  /// Replaces every param that has an entry in `subs`.
  AffineForm substitute(const std::map<int, AffineForm>& subs) const;

  /// "2*c0 - 2*c1", "-c2", "1/3*c1 + 1", "0".
  std::string to_string() const;

 private:
  std::map<int, Rational> terms_;
  Rational constant_ = 0;
};

inline bool is_zero(const AffineForm& f) { return f.is_zero(); }

/// Polynomial in x whose coefficients are affine in the template parameters.
using ParamPoly = BasicPoly<AffineForm>;

enum class Parity { EvenOnly, All };

struct TemplateSpec {
  std::size_t dimension = 2;
  unsigned min_degree = 2;
  unsigned max_degree = 2;
  Parity parity = Parity::EvenOnly;
  bool cross_terms = true;

  /// Throws std::invalid_argument unless 1 <= min_degree <= max_degree and dimension >= 1.
  void validate() const;

  /// Synthesis default: even degrees in [2, max_degree]; cross terms only for quadratics.
  static TemplateSpec default_for(std::size_t dimension, unsigned max_degree);
};

/// Monomials included by `spec`, in parameter order: ascending degree; within
/// a degree the pure powers x1^d..xn^d first, then mixed monomials in
/// descending lex order.
std::vector<MultiIndex> admissible_monomials(const TemplateSpec& spec);

/// V(x) = sum c_alpha x^alpha with one fresh parameter per admissible monomial.
/// Throws std::invalid_argument when the admissible set is empty.
ParamPoly build_template(const TemplateSpec& spec);

std::set<int> params_of(const ParamPoly& p);

/// Lifts a concrete polynomial to constant affine coefficients.
ParamPoly lift(const Polynomial& p);

/// Throws MissingParameter if some parameter of V is unassigned.
Polynomial substitute(const ParamPoly& v, const Assignment& assignment);

ParamPoly substitute_params(const ParamPoly& v, const std::map<int, AffineForm>& subs);

class InconsistentEqualities : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Elimination {
  ParamPoly reduced;
  /// Eliminated param -> expression in surviving params.
  std::map<int, AffineForm> substitutions;
};

/// Solves the system {eq = 0} by Gaussian elimination over the rationals.
/// Each equation, after substituting the pivots found so far, eliminates its
/// smallest-id parameter. Throws InconsistentEqualities on e.g. 0 = 1.
Elimination apply_equalities(const ParamPoly& v, const std::vector<AffineForm>& equalities);

/// Composes an existing substitution map with a newer one (newer applied on top).
std::map<int, AffineForm> compose(const std::map<int, AffineForm>& older, const std::map<int, AffineForm>& newer);

/// Renders V grouped by parameter, e.g. "c1*(x1^2 + x2^2)".
std::string to_string(const ParamPoly& v, const std::vector<std::string>& names = {});

}  // namespace lyra
