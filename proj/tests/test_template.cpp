// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include "support.hpp"
#include "lyra/template.hpp"

using namespace lyra;

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Monomials of total degree d in n variables: C(n + d - 1, d).
std::size_t count_degree(std::size_t n, unsigned d) { return binomial(n + d - 1, d); }

}  // namespace

TEST_CASE("admissible monomial counts") {
  for (std::size_t n = 1; n <= 5; ++n) {
    TemplateSpec s;
    s.dimension = n;
    s.min_degree = 1;
    s.max_degree = 4;
    s.parity = Parity::All;
    s.cross_terms = true;
    std::size_t expected = 0;
    for (unsigned d = 1; d <= 4; ++d) expected += count_degree(n, d);
    CHECK(admissible_monomials(s).size() == expected);

    s.parity = Parity::EvenOnly;
    CHECK(admissible_monomials(s).size() == count_degree(n, 2) + count_degree(n, 4));

    s.cross_terms = false;
    CHECK(admissible_monomials(s).size() == 2 * n);
  }
}

TEST_CASE("quadratic template on two variables") {
  const ParamPoly v = build_template(TemplateSpec::default_for(2, 2));
  CHECK(v.size() == 3);
  CHECK(params_of(v) == std::set<int>{0, 1, 2});
  CHECK(to_string(v) == "c0*x1^2 + c1*x2^2 + c2*x1*x2");
}

TEST_CASE("every template parameter appears exactly once") {
  TemplateSpec s;
  s.dimension = 3;
  s.min_degree = 2;
  s.max_degree = 6;
  const ParamPoly v = build_template(s);
  std::set<int> seen;
  for (const auto& [alpha, form] : v.terms()) {
    REQUIRE(form.terms().size() == 1);
    CHECK(form.constant() == 0);
    CHECK(seen.insert(form.terms().begin()->first).second);
    CHECK(alpha.degree() % 2 == 0);
  }
}

TEST_CASE("invalid specs are rejected") {
  TemplateSpec s;
  s.dimension = 2;
  s.min_degree = 4;
  s.max_degree = 2;
  CHECK_THROWS(s.validate());
  s.min_degree = 0;
  s.max_degree = 2;
  CHECK_THROWS(s.validate());
  s.dimension = 0;
  s.min_degree = 2;
  CHECK_THROWS(s.validate());
}

TEST_CASE("affine forms") {
  const AffineForm a = AffineForm::param(0, 2) + AffineForm::param(1, -1) + AffineForm(Rational(3));
  CHECK(a.evaluate({{0, 1}, {1, 5}}) == 0);
  CHECK_THROWS_AS(a.evaluate({{0, 1}}), MissingParameter);
  CHECK((a - a).is_zero());
  CHECK(a.substitute({{1, AffineForm::param(0, 2)}}) == AffineForm(Rational(3)));
}

TEST_CASE("equalities eliminate the smallest parameter") {
  const ParamPoly v = build_template(TemplateSpec::default_for(2, 2));
  const Elimination e = apply_equalities(v, {AffineForm::param(2), AffineForm::param(0) - AffineForm::param(1)});
  REQUIRE(e.substitutions.size() == 2);
  CHECK(e.substitutions.at(2).is_zero());
  CHECK(e.substitutions.at(0) == AffineForm::param(1));
  CHECK(to_string(e.reduced) == "c1*(x1^2 + x2^2)");
  CHECK_THROWS_AS(apply_equalities(v, {AffineForm::param(0), AffineForm::param(0) + AffineForm(Rational(1))}),
                  InconsistentEqualities);
}

TEST_CASE("substitution of a full assignment") {
  const ParamPoly v = build_template(TemplateSpec::default_for(2, 2));
  const Polynomial p = substitute(v, {{0, 1}, {1, 2}, {2, Rational(-1, 2)}});
  CHECK(to_string(p) == "x1^2 - 1/2*x1*x2 + 2*x2^2");
  CHECK_THROWS_AS(substitute(v, {{0, 1}}), MissingParameter);
}
