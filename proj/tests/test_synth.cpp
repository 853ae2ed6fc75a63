// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include "lyra/lie.hpp"
#include "lyra/parse.hpp"
#include "lyra/synth.hpp"
#include "support.hpp"

using namespace lyra;

TEST_CASE("sample sets reject zero and duplicates") {
  SampleSet s(2);
  CHECK_FALSE(s.add({0, 0}));
  CHECK(s.add({1, 2}));
  CHECK_FALSE(s.add({1, 2}));
  s.add_uniform(50, 10, 3);
  CHECK(s.size() == 51);
  for (const auto& p : s.points()) {
    CHECK(p.size() == 2);
    CHECK(abs(p[0]) <= 10);
    CHECK_FALSE((p[0] == 0 && p[1] == 0));
  }
  SampleSet t(2);
  t.add_uniform(50, 10, 3);
  SampleSet u(2);
  u.add_uniform(50, 10, 3);
  CHECK(t.points() == u.points());
}

TEST_CASE("norm powers") {
  CHECK(norm_power({3, 4}, 2) == 25);
  CHECK(norm_power({3, 4}, 4) == 625);
  CHECK(norm_power({3, 4}, 1) >= 5);
  CHECK(norm_power({1, 1}, 1) * norm_power({1, 1}, 1) >= 2);
}

TEST_CASE("sample constraints are affine in the parameters") {
  const SystemFile e6 = test::benchmark(6);
  const ParamPoly v = build_template(*e6.template_spec);
  const ParamPoly vdot = lie_derivative(v, e6.field);
  SampleSet s(4);
  s.add_uniform(20, 10, 5);
  std::mt19937_64 rng(6);
  for (bool strengthened : {false, true}) {
    const ConstraintSet cs = build_sample_constraints(v, vdot, s.points(), Rational(1, 100), strengthened);
    REQUIRE(cs.rows.size() == 2 * s.size());
    for (int k = 0; k < 10; ++k) {
      Assignment a;
      for (int id : params_of(v)) a[id] = test::random_rational(rng);
      const Polynomial pv = substitute(v, a), pd = substitute(vdot, a);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& y = s.points()[i];
        // Row 2i constrains V(y), row 2i+1 constrains V'(y).
        const Rational direct_v = evaluate(pv, y), direct_d = evaluate(pd, y);
        const Rational rv = cs.rows[2 * i].evaluate(a), rd = cs.rows[2 * i + 1].evaluate(a);
        CHECK(cs.rows[2 * i].origin == "V");
        CHECK(cs.rows[2 * i + 1].origin == "dV");
        CHECK(rv - cs.rows[2 * i].constant == direct_v);
        CHECK(rd - cs.rows[2 * i + 1].constant == direct_d);
      }
    }
  }
}

TEST_CASE("method names and exit codes") {
  CHECK(parse_method("complete") == SynthMethod::Complete);
  CHECK(parse_method("lp-cegis") == SynthMethod::LpCegis);
  CHECK(parse_method("smt-cegis") == SynthMethod::SmtCegis);
  CHECK_THROWS_AS(parse_method("sos"), std::invalid_argument);
  CHECK(exit_code(CertificateStatus::GAS) == 0);
  CHECK(exit_code(CertificateStatus::GAS_LASALLE) == 0);
  CHECK(exit_code(CertificateStatus::NOT_GAS) == 0);
  CHECK(exit_code(CertificateStatus::UNKNOWN) == 2);
  CHECK(exit_code(CertificateStatus::TIMEOUT) == 2);
  CHECK(exit_code(CertificateStatus::TEMPLATE_INFEASIBLE) == 3);
}

TEST_CASE("invalid configurations") {
  SynthesisConfig c;
  c.mu = -1;
  CHECK_THROWS(c.validate());
  c = {};
  c.timeout_s = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.rounding_denominator = -5;
  CHECK_THROWS(c.validate());
  c = {};
  c.method = SynthMethod::LpCegis;
  CHECK(c.samples() == 3000);
  c.method = SynthMethod::SmtCegis;
  CHECK(c.samples() == 300);
}

TEST_CASE("LP-CEGIS with reduction certifies E1 without a solver") {
  const SystemFile e1 = test::benchmark(1);
  SynthesisConfig c;
  c.method = SynthMethod::LpCegis;
  c.solver.reset();
  const CertificateReport r = synthesize(e1.field, *e1.template_spec, c);
  REQUIRE(r.status == CertificateStatus::GAS);
  CHECK(to_string(*r.witness) == "1/100*x1^2 + 1/100*x2^2");
  CHECK(r.certified());
}

TEST_CASE("collapsed templates are TEMPLATE_INFEASIBLE") {
  const auto x = default_variable_names(2);
  const VectorField f({parse_polynomial("x2", x), parse_polynomial("x1^2", x)});
  TemplateSpec s = TemplateSpec::default_for(2, 2);
  s.cross_terms = false;
  SynthesisConfig c;
  const CertificateReport r = synthesize(f, s, c);
  CHECK(r.status == CertificateStatus::TEMPLATE_INFEASIBLE);
  CHECK_FALSE(r.witness.has_value());
}

TEST_CASE("report JSON schema") {
  const SystemFile e1 = test::benchmark(1);
  SynthesisConfig c;
  c.method = SynthMethod::LpCegis;
  CertificateReport r = synthesize(e1.field, *e1.template_spec, c);
  r.system = e1.name;
  r.variables = e1.variables;
  const nlohmann::json j = to_json(r);
  const std::map<std::string, nlohmann::json::value_t> schema = {
      {"status", nlohmann::json::value_t::string},
      {"system", nlohmann::json::value_t::string},
      {"method", nlohmann::json::value_t::string},
      {"mode", nlohmann::json::value_t::string},
      {"use_reduction", nlohmann::json::value_t::boolean},
      {"variables", nlohmann::json::value_t::array},
      {"template", nlohmann::json::value_t::string},
      {"reduced_template", nlohmann::json::value_t::string},
      {"witness", nlohmann::json::value_t::string},
      {"instability_witness_point", nlohmann::json::value_t::null},
      {"timings", nlohmann::json::value_t::object},
      {"cegis_iterations", nlohmann::json::value_t::number_unsigned},
      {"counterexamples_used", nlohmann::json::value_t::number_unsigned},
      {"lasalle_order", nlohmann::json::value_t::null},
      {"checks", nlohmann::json::value_t::array},
      {"history", nlohmann::json::value_t::array},
      {"diagnostic", nlohmann::json::value_t::string},
  };
  CHECK(j.size() == schema.size());
  for (const auto& [key, type] : schema) {
    CAPTURE(key);
    REQUIRE(j.contains(key));
    CHECK(j[key].type() == type);
  }
  for (const char* t : {"reduction", "solve", "verify", "total"}) CHECK(j["timings"][t].is_number());
  for (const auto& check : j["checks"]) {
    for (const char* k : {"check", "verdict", "method", "counterexample", "diagnostic", "seconds"}) CHECK(check.contains(k));
  }
  for (const auto& h : j["history"]) {
    for (const char* k : {"step", "candidate", "confirmed", "counterexample", "note"}) CHECK(h.contains(k));
  }
}

TEST_CASE("complete synthesis on E1" * doctest::skip(!test::solver().has_value())) {
  const SystemFile e1 = test::benchmark(1);
  SynthesisConfig c;
  c.solver = test::solver();
  const CertificateReport r = synthesize(e1.field, *e1.template_spec, c);
  REQUIRE(r.status == CertificateStatus::GAS);
  CHECK(to_string(*r.witness) == "x1^2 + x2^2");
}

TEST_CASE("instability synthesis" * doctest::skip(!test::solver().has_value())) {
  const auto x = default_variable_names(2);
  SynthesisConfig c;
  c.solver = test::solver();
  c.timeout_s = 20;
  TemplateSpec s = TemplateSpec::default_for(2, 2);
  s.min_degree = 1;
  s.parity = Parity::All;

  const VectorField saddle({parse_polynomial("x2", x), parse_polynomial("x1^3", x)});
  const CertificateReport r = synth_instability(saddle, s, c);
  REQUIRE(r.status == CertificateStatus::NOT_GAS);
  REQUIRE(r.instability_point.has_value());
  CHECK(evaluate(*r.witness, *r.instability_point) < 0);

  const VectorField stable({parse_polynomial("-x1", x), parse_polynomial("-x2", x)});
  const CertificateReport q = synth_instability(stable, s, c);
  CHECK(q.status != CertificateStatus::NOT_GAS);
}
