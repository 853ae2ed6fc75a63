// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include "lyra/lasalle.hpp"
#include "lyra/parse.hpp"
#include "lyra/smt.hpp"
#include "support.hpp"

using namespace lyra;

namespace {

QuantifiedFormula sample_query() {
  QuantifiedFormula q;
  q.free_constants = {"c0", "c1"};
  q.universal_vars = {"x1", "x2"};
  const auto names = q.joint_names();
  const Polynomial v = parse_polynomial("c0*x1^2 + c1*x2^2 - 1/3*c0*x1*x2", names);
  const Polynomial n = parse_polynomial("x1^2 + x2^2", names);
  q.assertions.push_back(Formula::atom(parse_polynomial("c0 - 1", names), Rel::Ge));
  q.body = Formula::implies(Formula::atom(n, Rel::Gt),
                            Formula::conj({Formula::atom(v, Rel::Gt),
                                           Formula::disj({Formula::atom(v, Rel::Ne), Formula::negate(Formula::atom(n, Rel::Le))})}));
  return q;
}

}  // namespace

TEST_CASE("emit and parse round trip") {
  const QuantifiedFormula q = sample_query();
  const std::string text = emit(q);
  CHECK(text.find("(forall ((x1 Real) (x2 Real))") != std::string::npos);
  CHECK(text.find("(declare-fun c0 () Real)") != std::string::npos);
  const QuantifiedFormula back = parse_smtlib(text);
  CHECK(back.free_constants == q.free_constants);
  CHECK(back.universal_vars == q.universal_vars);
  CHECK(emit(back) == text);

  std::mt19937_64 rng(4);
  for (int k = 0; k < 200; ++k) {
    const auto pt = test::random_point(rng, 4);
    CHECK(back.body->evaluate(pt) == q.body->evaluate(pt));
    CHECK(back.assertions.front().evaluate(pt) == q.assertions.front().evaluate(pt));
  }
}

TEST_CASE("existential queries have no quantifier block") {
  QuantifiedFormula q;
  q.free_constants = {"z1"};
  q.assertions.push_back(Formula::atom(parse_polynomial("z1^2 - 2", {"z1"}), Rel::Eq));
  const std::string text = emit(q);
  CHECK(text.find("forall") == std::string::npos);
  CHECK(text.find("QF_NRA") != std::string::npos);
}

TEST_CASE("rational literals are exact") {
  QuantifiedFormula q;
  q.free_constants = {"a"};
  q.assertions.push_back(Formula::atom(parse_polynomial("a - 9999/10000", {"a"}), Rel::Eq));
  const std::string text = emit(q);
  CHECK(text.find("9999") != std::string::npos);
  CHECK(text.find("0.9999") == std::string::npos);
  const auto back = parse_smtlib(text);
  CHECK(back.assertions.front().evaluate(std::vector<Rational>{Rational(9999, 10000)}));
}

TEST_CASE("model values") {
  auto one = [](const char* s) { return parse_sexprs(s).front(); };
  CHECK(model_value(one("1.0")) == 1);
  CHECK(model_value(one("(- 2)")) == -2);
  CHECK(model_value(one("(/ 1.0 3.0)")) == Rational(1, 3));
  CHECK(model_value(one("(- (/ 5 2))")) == Rational(-5, 2));
  CHECK(model_value(one("0.9999")) == Rational(9999, 10000));
  CHECK_THROWS_AS(model_value(one("(root-obj (+ (^ x 2) (- 2)) 1)")), NonRationalValue);
  CHECK(model_value(one("1.4142?"), true) == Rational(7071, 5000));
}

TEST_CASE("solver output parsing") {
  const SolverResult sat = parse_solver_output("sat\n((c0 (/ 1.0 3.0))\n (c1 2.0))\n");
  CHECK(sat.verdict == Verdict::Sat);
  CHECK(sat.model.at("c0") == Rational(1, 3));
  CHECK(sat.model.at("c1") == 2);
  CHECK(parse_solver_output("unsat\n").verdict == Verdict::Unsat);
  CHECK(parse_solver_output("unknown\n").verdict == Verdict::Unknown);
  const SolverResult irr = parse_solver_output("sat\n((z1 (root-obj (+ (^ x 2) (- 2)) 2)))\n");
  CHECK(irr.irrational_model);
}

TEST_CASE("LaSalle encodings") {
  const SystemFile e8 = test::benchmark(8);
  const Polynomial v = parse_polynomial("x1^4 + 2*x2^2", e8.variables);
  const LaSalleEncoding enc = build_lasalle(v, e8.field, 5, LaSalleVariant::SingleOrder);
  CHECK(enc.chain.size() == 5);
  CHECK(enc.quantified.universal_vars.size() == 2);
  // On the x1 axis the first Lie derivative vanishes and the fifth does not.
  CHECK(enc.formula.evaluate(std::vector<Rational>{1, 0}));
  CHECK_THROWS_AS(build_lasalle(v, e8.field, 1, LaSalleVariant::SingleOrder), std::invalid_argument);
}

TEST_CASE("solver round trip" * doctest::skip(!test::solver().has_value())) {
  QuantifiedFormula q;
  q.free_constants = {"a", "b"};
  const auto names = q.joint_names();
  q.assertions.push_back(Formula::atom(parse_polynomial("3*a - 1", names), Rel::Eq));
  q.assertions.push_back(Formula::atom(parse_polynomial("b - a", names), Rel::Gt));
  const SolverResult r = run_solver(emit(q), *test::solver(), 10.0);
  REQUIRE(r.verdict == Verdict::Sat);
  CHECK(r.model.at("a") == Rational(1, 3));
  CHECK(r.model.at("b") > Rational(1, 3));

  const SolverResult u = run_solver(emit(sample_query()), *test::solver(), 10.0);
  REQUIRE(u.verdict == Verdict::Sat);
  CHECK(u.model.at("c0") >= 1);
}
