// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/symred.hpp"

#include <algorithm>
#include <optional>

namespace lyra {

std::string to_string(Rule r) {
  switch (r) {
    case Rule::ExtremeLayer: return "R1-extreme-layer";
    case Rule::MaxExponent: return "R2-max-exponent";
    case Rule::LayerMaxExponent: return "R3-layer-max-exponent";
    case Rule::PurePower: return "R4-pure-power";
  }
  return "?";
}

std::string to_string(ReductionStatus s) {
  switch (s) {
    case ReductionStatus::Reduced: return "REDUCED";
    case ReductionStatus::Collapsed: return "TEMPLATE_INFEASIBLE";
    case ReductionStatus::Infeasible: return "TEMPLATE_INFEASIBLE";
  }
  return "?";
}

bool ReductionConstraint::violated_constant() const {
  if (!form.is_constant()) return false;
  return kind == ConstraintKind::Equality ? !is_zero(form.constant()) : sgn(form.constant()) > 0;
}

bool ReductionConstraint::trivially_true() const { return form.is_constant() && !violated_constant(); }

std::string ReductionConstraint::to_string() const {
  return form.to_string() + (kind == ConstraintKind::Equality ? " = 0" : " <= 0") + "  [" + lyra::to_string(rule) + "]";
}

namespace {

class ConstraintSink {
 public:
  void add(ConstraintKind kind, const AffineForm& form, Rule rule) {
    for (const auto& c : out_)
      if (c.kind == kind && c.form == form) return;
    out_.push_back({kind, form, rule});
  }
  std::vector<ReductionConstraint> take() { return std::move(out_); }

 private:
  std::vector<ReductionConstraint> out_;
};

// Any term with alpha_i equal to an odd maximum exponent of x_i must vanish.
void odd_max_exponent(const ParamPoly& p, Rule rule, ConstraintSink& sink) {
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    unsigned m = p.max_exponent(i);
    if (m % 2 == 0) continue;
    for (const auto& [alpha, form] : p.terms())
      if (alpha[i] == m) sink.add(ConstraintKind::Equality, form, rule);
  }
}

}  // namespace

std::vector<ReductionConstraint> extract_constraints(const ParamPoly& p) {
  ConstraintSink sink;
  if (p.is_zero()) return {};
  const unsigned l = *p.min_degree();
  const unsigned k = *p.max_degree();
  const ParamPoly low = p.homogeneous_layer(l);
  const ParamPoly high = p.homogeneous_layer(k);

  // R1
  if (k % 2 != 0)
    for (const auto& [alpha, form] : high.terms()) sink.add(ConstraintKind::Equality, form, Rule::ExtremeLayer);
  if (l % 2 != 0 && l != k)
    for (const auto& [alpha, form] : low.terms()) sink.add(ConstraintKind::Equality, form, Rule::ExtremeLayer);

  // R2
  odd_max_exponent(p, Rule::MaxExponent, sink);

  // R3
  odd_max_exponent(low, Rule::LayerMaxExponent, sink);
  if (l != k) odd_max_exponent(high, Rule::LayerMaxExponent, sink);

  // R4: extreme pure powers of each variable.
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    std::optional<MultiIndex> lowest, highest;
    for (const auto& [alpha, form] : p.terms()) {
      if (alpha.pure_variable() != i) continue;
      if (!lowest || alpha[i] < (*lowest)[i]) lowest = alpha;
      if (!highest || alpha[i] > (*highest)[i]) highest = alpha;
    }
    if (!lowest) continue;
    for (const auto& alpha : {*lowest, *highest}) {
      const AffineForm& form = p.terms().at(alpha);
      sink.add(alpha[i] % 2 != 0 ? ConstraintKind::Equality : ConstraintKind::Nonpositive, form, Rule::PurePower);
    }
  }
  return sink.take();
}

ReductionResult reduce_to_fixpoint(const ParamPoly& v, const VectorField& f, std::size_t term_cap) {
  ReductionResult res;
  ParamPoly current = v;
  std::vector<ReductionConstraint> nonpositive;

  auto finish_infeasible = [&](const std::string& why) {
    res.status = ReductionStatus::Infeasible;
    res.diagnostic = why;
    res.reduced_template = current;
    res.reduced_lie = lie_derivative(current, f);
    return res;
  };

  for (;;) {
    ParamPoly vdot = lie_derivative(current, f);
    if (vdot.size() > term_cap) throw TermCapExceeded("Lie derivative exceeds term cap during reduction");
    std::vector<AffineForm> equalities;
    for (auto& c : extract_constraints(vdot)) {
      if (c.violated_constant()) return finish_infeasible("constraint violated: " + c.to_string());
      if (c.kind == ConstraintKind::Equality)
        equalities.push_back(c.form);
      else if (!c.trivially_true())
        nonpositive.push_back(std::move(c));
    }
    if (equalities.empty()) {
      res.reduced_lie = std::move(vdot);
      break;
    }
    Elimination elim;
    try {
      elim = apply_equalities(current, equalities);
    } catch (const InconsistentEqualities& e) {
      return finish_infeasible(e.what());
    }
    res.substitutions = compose(res.substitutions, elim.substitutions);
    res.equalities_applied.insert(res.equalities_applied.end(), equalities.begin(), equalities.end());
    current = std::move(elim.reduced);
    ++res.iterations;
    if (current.is_zero()) {
      res.status = ReductionStatus::Collapsed;
      res.diagnostic = "template collapsed to zero";
      res.reduced_template = current;
      res.reduced_lie = ParamPoly(current.dimension());
      return res;
    }
  }
  res.reduced_template = std::move(current);

  for (auto& c : nonpositive) {
    ReductionConstraint r{c.kind, c.form.substitute(res.substitutions), c.rule};
    if (r.violated_constant()) return finish_infeasible("pending constraint violated: " + c.to_string());
    if (r.trivially_true()) continue;
    bool dup = std::any_of(res.inequalities_pending.begin(), res.inequalities_pending.end(),
                           [&](const ReductionConstraint& o) { return o.form == r.form; });
    if (!dup) res.inequalities_pending.push_back(std::move(r));
  }
  return res;
}

}  // namespace lyra
