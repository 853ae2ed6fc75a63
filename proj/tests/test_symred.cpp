// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include "lyra/lie.hpp"
#include "lyra/parse.hpp"
#include "lyra/symred.hpp"
#include "lyra/verify.hpp"
#include "support.hpp"

using namespace lyra;

TEST_CASE("E1 quadratic template reduces to c1*(x1^2 + x2^2)") {
  const SystemFile e1 = test::benchmark(1);
  const ReductionResult r = reduce_to_fixpoint(build_template(TemplateSpec::default_for(2, 2)), e1.field);
  CHECK(r.status == ReductionStatus::Reduced);
  REQUIRE(r.substitutions.size() == 2);
  CHECK(r.substitutions.at(2).is_zero());
  CHECK(r.substitutions.at(0) == AffineForm::param(1));
  CHECK(to_string(r.reduced_template) == "c1*(x1^2 + x2^2)");
  CHECK(r.reduced_lie == lie_derivative(r.reduced_template, e1.field));
}

TEST_CASE("constraints read off the support") {
  const auto x = default_variable_names(2);
  // c0*x1^3 - x2^2: odd extreme layer and odd max exponent of x1.
  ParamPoly p = lift(parse_polynomial("-x2^2", x));
  p.add_term(MultiIndex{3, 0}, AffineForm::param(0));
  const auto cs = extract_constraints(p);
  bool found = false;
  for (const auto& c : cs)
    if (c.kind == ConstraintKind::Equality && c.form == AffineForm::param(0)) found = true;
  CHECK(found);

  // Pure even power with a free coefficient gives c <= 0.
  ParamPoly q(2);
  q.add_term(MultiIndex{4, 0}, AffineForm::param(1));
  q.add_term(MultiIndex{0, 2}, AffineForm(Rational(-1)));
  bool nonpos = false;
  for (const auto& c : extract_constraints(q))
    if (c.kind == ConstraintKind::Nonpositive && c.form == AffineForm::param(1) && c.rule == Rule::PurePower) nonpos = true;
  CHECK(nonpos);
}

TEST_CASE("violated constants and collapse") {
  const auto x = default_variable_names(2);
  // V = c0*x1^2 on x' = (x2, x1): V' = 2 c0 x1 x2 forces c0 = 0.
  const VectorField f({parse_polynomial("x2", x), parse_polynomial("x1", x)});
  ParamPoly v(2);
  v.add_term(MultiIndex{2, 0}, AffineForm::param(0));
  const ReductionResult r = reduce_to_fixpoint(v, f);
  CHECK(r.status == ReductionStatus::Collapsed);

  // A parameter-free odd layer cannot be repaired.
  ParamPoly w = lift(parse_polynomial("x1^2", x));
  const VectorField g({parse_polynomial("x1^2", x), parse_polynomial("-x2", x)});
  CHECK(reduce_to_fixpoint(w, g).status == ReductionStatus::Infeasible);
}

TEST_CASE("every violated generated equality admits a confirmed positive point of V'") {
  struct Case {
    int id;
    TemplateSpec spec;
  };
  std::vector<Case> cases;
  for (int id : {1, 2, 8}) {
    const SystemFile sys = test::benchmark(id);
    cases.push_back({id, *sys.template_spec});
    cases.push_back({id, TemplateSpec::default_for(2, 4)});
  }
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> coeff(-6, 6);
  for (const auto& c : cases) {
    CAPTURE(c.id);
    const SystemFile sys = test::benchmark(c.id);
    const ParamPoly v = build_template(c.spec);
    const ParamPoly vdot = lie_derivative(v, sys.field);
    std::size_t checked = 0;
    for (const auto& rc : extract_constraints(vdot)) {
      if (rc.kind != ConstraintKind::Equality || rc.form.is_constant()) continue;
      CAPTURE(rc.to_string());
      for (int draw = 0; draw < 3; ++draw) {
        Assignment a;
        do {
          for (int id : params_of(v)) a[id] = coeff(rng);
        } while (rc.form.evaluate(a) == 0);
        const Polynomial p = substitute(vdot, a);
        FalsifyOptions fo;
        fo.seed = rng();
        const auto x = falsify_numeric(p, Rel::Gt, fo);
        REQUIRE(x.has_value());
        CHECK(evaluate(p, *x) > 0);
        ++checked;
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("reduction never removes a valid witness") {
  // x1^2 + x2^2 satisfies every generated condition for E1.
  const SystemFile e1 = test::benchmark(1);
  const ReductionResult r = reduce_to_fixpoint(build_template(TemplateSpec::default_for(2, 2)), e1.field);
  const Assignment a{{1, 1}};
  for (const auto& [id, form] : r.substitutions) CHECK(form.evaluate(a) == (id == 0 ? 1 : 0));
  for (const auto& c : r.inequalities_pending) CHECK(c.form.evaluate(a) <= 0);
}
