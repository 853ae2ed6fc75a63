// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/template.hpp"

#include <functional>

namespace lyra {

std::set<int> AffineForm::params() const {
  std::set<int> out;
  for (const auto& [id, c] : terms_) out.insert(id);
  return out;
}

AffineForm& AffineForm::operator+=(const AffineForm& o) {
  for (const auto& [id, c] : o.terms_) {
    auto [it, inserted] = terms_.try_emplace(id, c);
    if (!inserted) {
      it->second += c;
      if (lyra::is_zero(it->second)) terms_.erase(it);
    }
  }
  constant_ += o.constant_;
  return *this;
}

AffineForm& AffineForm::operator-=(const AffineForm& o) { return *this += -o; }

AffineForm& AffineForm::operator*=(const Rational& s) {
  if (lyra::is_zero(s)) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [id, c] : terms_) c *= s;
  constant_ *= s;
  return *this;
}

Rational AffineForm::evaluate(const Assignment& a) const {
  Rational v = constant_;
  for (const auto& [id, c] : terms_) {
    auto it = a.find(id);
    if (it == a.end()) throw MissingParameter("no value for parameter " + Param{id}.name());
    v += c * it->second;
  }
  return v;
}

AffineForm AffineForm::substitute(const std::map<int, AffineForm>& subs) const {
  AffineForm out(constant_);
  for (const auto& [id, c] : terms_) {
    auto it = subs.find(id);
    if (it == subs.end())
      out += AffineForm::param(id, c);
    else
      out += it->second * c;
  }
  return out;
}

std::string AffineForm::to_string() const {
  std::string out;
  auto append = [&](const Rational& c, const std::string& name) {
    const bool negative = sgn(c) < 0;
    if (out.empty())
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    Rational mag = abs(c);
    if (name.empty())
      out += lyra::to_string(mag);
    else if (mag == 1)
      out += name;
    else
      out += lyra::to_string(mag) + "*" + name;
  };
  for (const auto& [id, c] : terms_) append(c, Param{id}.name());
  if (!lyra::is_zero(constant_)) append(constant_, "");
  return out.empty() ? "0" : out;
}

void TemplateSpec::validate() const {
  if (dimension == 0) throw std::invalid_argument("template dimension must be positive");
  if (min_degree < 1 || min_degree > max_degree)
    throw std::invalid_argument("template degrees must satisfy 1 <= min_degree <= max_degree");
}

TemplateSpec TemplateSpec::default_for(std::size_t dimension, unsigned max_degree) {
  TemplateSpec s;
  s.dimension = dimension;
  s.min_degree = 2;
  s.max_degree = std::max(2U, max_degree);
  s.parity = Parity::EvenOnly;
  s.cross_terms = s.max_degree <= 2;
  return s;
}

namespace {

// All exponent vectors of total degree d, in descending lex order.
void enumerate_degree(std::size_t n, unsigned d, std::vector<MultiIndex>& out) {
  MultiIndex cur(n);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i + 1 == n) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      cur[i] = e;
      rec(i + 1, left - e);
    }
  };
  rec(0, d);
}

}  // namespace

std::vector<MultiIndex> admissible_monomials(const TemplateSpec& spec) {
  spec.validate();
  const std::size_t n = spec.dimension;
  std::vector<MultiIndex> out;
  for (unsigned d = spec.min_degree; d <= spec.max_degree; ++d) {
    if (spec.parity == Parity::EvenOnly && d % 2 != 0) continue;
    for (std::size_t i = 0; i < n; ++i) out.push_back(MultiIndex::unit(n, i, d));
    if (!spec.cross_terms) continue;
    std::vector<MultiIndex> layer;
    enumerate_degree(n, d, layer);
    for (auto& alpha : layer)
      if (!alpha.pure_variable()) out.push_back(std::move(alpha));
  }
  return out;
}

ParamPoly build_template(const TemplateSpec& spec) {
  auto monomials = admissible_monomials(spec);
  if (monomials.empty()) throw std::invalid_argument("template has no admissible monomials");
  ParamPoly v(spec.dimension);
  int id = 0;
  for (const auto& alpha : monomials) v.add_term(alpha, AffineForm::param(id++));
  return v;
}

std::set<int> params_of(const ParamPoly& p) {
  std::set<int> out;
  for (const auto& [alpha, form] : p.terms())
    for (const auto& [id, c] : form.terms()) out.insert(id);
  return out;
}

ParamPoly lift(const Polynomial& p) {
  ParamPoly out(p.dimension());
  for (const auto& [alpha, c] : p.terms()) out.add_term(alpha, AffineForm(c));
  return out;
}

Polynomial substitute(const ParamPoly& v, const Assignment& assignment) {
  Polynomial out(v.dimension());
  for (const auto& [alpha, form] : v.terms()) out.add_term(alpha, form.evaluate(assignment));
  return out;
}

ParamPoly substitute_params(const ParamPoly& v, const std::map<int, AffineForm>& subs) {
  ParamPoly out(v.dimension());
  for (const auto& [alpha, form] : v.terms()) out.add_term(alpha, form.substitute(subs));
  return out;
}

std::map<int, AffineForm> compose(const std::map<int, AffineForm>& older, const std::map<int, AffineForm>& newer) {
  std::map<int, AffineForm> out;
  for (const auto& [id, form] : older) out.emplace(id, form.substitute(newer));
  for (const auto& [id, form] : newer) out.emplace(id, form);
  return out;
}

Elimination apply_equalities(const ParamPoly& v, const std::vector<AffineForm>& equalities) {
  std::map<int, AffineForm> subs;
  for (const auto& eq : equalities) {
    AffineForm e = eq.substitute(subs);
    if (e.is_zero()) continue;
    if (e.is_constant())
      throw InconsistentEqualities("equality system is inconsistent: " + eq.to_string() + " = 0 reduces to " +
                                   e.to_string() + " = 0");
    auto [pivot, coeff] = *e.terms().begin();
    // pivot = -(e - coeff*pivot) / coeff
    AffineForm rest = e - AffineForm::param(pivot, coeff);
    AffineForm solved = rest * Rational(-1 / coeff);
    std::map<int, AffineForm> step{{pivot, solved}};
    for (auto& [id, form] : subs) form = form.substitute(step);
    subs.emplace(pivot, std::move(solved));
  }
  return {substitute_params(v, subs), std::move(subs)};
}

std::string to_string(const ParamPoly& v, const std::vector<std::string>& names) {
  if (v.is_zero()) return "0";
  // Group as sum_p c_p * P_p(x) + P_0(x).
  std::map<int, Polynomial> by_param;
  Polynomial fixed(v.dimension());
  for (const auto& [alpha, form] : v.terms()) {
    for (const auto& [id, c] : form.terms()) {
      auto [it, inserted] = by_param.try_emplace(id, v.dimension());
      it->second.add_term(alpha, c);
    }
    fixed.add_term(alpha, form.constant());
  }
  std::string out;
  for (const auto& [id, poly] : by_param) {
    if (!out.empty()) out += " + ";
    std::string name = Param{id}.name();
    if (poly.size() == 1) {
      const auto& [alpha, c] = *poly.terms().begin();
      std::string coeff = c == 1 ? "" : (c == -1 ? "-" : lyra::to_string(c) + "*");
      out += coeff + name + "*" + monomial_to_string(alpha, names);
    } else {
      out += name + "*(" + to_string(poly, names) + ")";
    }
  }
  if (!fixed.is_zero()) out += (out.empty() ? "" : " + ") + to_string(fixed, names);
  return out;
}

}  // namespace lyra
