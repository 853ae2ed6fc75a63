// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/poly.hpp"

#include <cmath>

namespace lyra {

Polynomial variable(std::size_t dimension, std::size_t i) {
  return Polynomial::monomial(MultiIndex::unit(dimension, i), Rational(1));
}

Polynomial pow(const Polynomial& p, unsigned exp) {
  Polynomial out = Polynomial::constant(p.dimension(), Rational(1));
  Polynomial base = p;
  while (exp > 0) {
    if (exp & 1U) out = out * base;
    exp >>= 1U;
    if (exp > 0) base = base * base;
  }
  return out;
}

Polynomial squared_norm(std::size_t dimension) {
  Polynomial out(dimension);
  for (std::size_t i = 0; i < dimension; ++i) out.add_term(MultiIndex::unit(dimension, i, 2), Rational(1));
  return out;
}

Rational evaluate(const Polynomial& p, std::span<const Rational> x) {
  if (x.size() != p.dimension()) throw DimensionError("evaluation point has wrong dimension");
  Rational sum = 0;
  Rational term;
  for (const auto& [alpha, c] : p.terms()) {
    term = c;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      if (alpha[i] != 0) term *= pow(x[i], alpha[i]);
    sum += term;
  }
  return sum;
}

double evaluate(const Polynomial& p, std::span<const double> x) {
  if (x.size() != p.dimension()) throw DimensionError("evaluation point has wrong dimension");
  double sum = 0.0;
  for (const auto& [alpha, c] : p.terms()) {
    double term = c.get_d();
    for (std::size_t i = 0; i < alpha.size(); ++i)
      if (alpha[i] != 0) term *= std::pow(x[i], static_cast<int>(alpha[i]));
    sum += term;
  }
  return sum;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.dimension());
  for (std::size_t i = 0; i < p.dimension(); ++i) g.push_back(p.derivative(i));
  return g;
}

VectorField::VectorField(std::vector<Polynomial> components) : components_(std::move(components)) {
  const std::size_t n = components_.size();
  if (n == 0) throw DimensionError("vector field needs at least one component");
  const MultiIndex origin(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (components_[i].dimension() != n)
      throw DimensionError("component f" + std::to_string(i + 1) + " has dimension " +
                           std::to_string(components_[i].dimension()) + ", expected " + std::to_string(n));
    if (!is_zero(components_[i].coefficient(origin)))
      throw std::invalid_argument("component f" + std::to_string(i + 1) + " has a constant term; f(0) must be 0");
  }
}

std::vector<double> VectorField::evaluate(std::span<const double> x) const {
  std::vector<double> out(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) out[i] = lyra::evaluate(components_[i], x);
  return out;
}

std::vector<std::string> default_variable_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

std::string monomial_to_string(const MultiIndex& alpha, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
    if (alpha[i] > 1) out += "^" + std::to_string(alpha[i]);
  }
  return out;
}

std::string to_string(const Polynomial& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [alpha, c] : p.terms()) {
    const bool negative = sgn(c) < 0;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    first = false;
    Rational mag = abs(c);
    std::string mono = monomial_to_string(alpha, names);
    if (mono.empty())
      out += to_string(mag);
    else if (mag == 1)
      out += mono;
    else
      out += to_string(mag) + "*" + mono;
  }
  return out;
}

}  // namespace lyra
