// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include "lyra/lie.hpp"
#include "lyra/parse.hpp"
#include "lyra/verify.hpp"
#include "support.hpp"

using namespace lyra;

namespace {

// Sylvester's criterion on a symmetric matrix, by exact cofactor expansion.
Rational det(const std::vector<std::vector<Rational>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Rational d = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Rational>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Rational> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(row);
    }
    d += (j % 2 ? -1 : 1) * m[0][j] * det(minor);
  }
  return d;
}

bool sylvester_pd(const std::vector<std::vector<Rational>>& m) {
  for (std::size_t k = 1; k <= m.size(); ++k) {
    std::vector<std::vector<Rational>> lead(k, std::vector<Rational>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) lead[i][j] = m[i][j];
    if (det(lead) <= 0) return false;
  }
  return true;
}

Polynomial form_of(const std::vector<std::vector<Rational>>& m) {
  const std::size_t n = m.size();
  Polynomial p(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p += variable(n, i) * variable(n, j) * m[i][j];
  return p;
}

Verifier offline() {
  VerifierOptions o;
  o.solver.reset();
  return Verifier(o);
}

Verifier online() {
  VerifierOptions o;
  o.solver = test::solver();
  o.timeout_s = 30;
  return Verifier(o);
}

}  // namespace

TEST_CASE("quadratic form test agrees with Sylvester's criterion") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> u(-4, 4);
  int pd = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 3;
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
      m[i][i] = u(rng) + 3;
      for (std::size_t j = 0; j < i; ++j) {
        m[i][j] = Rational(u(rng), 2);
        m[i][j].canonicalize();
        m[j][i] = m[i][j];
      }
    }
    const bool expect = sylvester_pd(m);
    pd += expect;
    const Polynomial p = form_of(m);
    CHECK(quadratic_form_definite(p, 1, true) == std::optional<bool>(expect));
    CHECK(quadratic_form_definite(-p, -1, true) == std::optional<bool>(expect));
  }
  CHECK(pd > 20);
  CHECK_FALSE(quadratic_form_definite(parse_polynomial("x1^4 + x2^2", {"x1", "x2"}), 1, true).has_value());
}

TEST_CASE("syntactic definiteness") {
  const auto x = default_variable_names(2);
  CHECK(syntactic_definite(parse_polynomial("x1^2 + 3*x2^4", x), 1, true));
  CHECK_FALSE(syntactic_definite(parse_polynomial("x1^2 + x1*x2 + x2^2", x), 1, true));
  CHECK_FALSE(syntactic_definite(parse_polynomial("x1^2", x), 1, true));
  CHECK(syntactic_definite(parse_polynomial("x1^2", x), 1, false));
  CHECK(syntactic_definite(parse_polynomial("-2*x1^4 - 2*x2^4", x), -1, true));
}

TEST_CASE("numeric falsifier returns exact violations") {
  const auto x = default_variable_names(2);
  const Polynomial p = parse_polynomial("x1^2 - 3*x1*x2 + x2^2", x);
  const auto pt = falsify_numeric(p, Rel::Lt);
  REQUIRE(pt.has_value());
  CHECK(evaluate(p, *pt) < 0);
  CHECK_FALSE(falsify_numeric(parse_polynomial("x1^2 + x2^4", x), Rel::Le).has_value());
}

TEST_CASE("E1 certificate verifies without a solver") {
  const SystemFile e1 = test::benchmark(1);
  const auto chk = verify_certificate(offline(), parse_polynomial("x1^2 + x2^2", e1.variables), e1.field,
                                      CertificateMode::Strict);
  CHECK(chk.confirmed);
  REQUIRE(chk.outcomes.size() == 3);
  CHECK(chk.outcomes[2].method == "syntactic");
}

TEST_CASE("near-miss candidates are rejected with confirmed counterexamples") {
  struct Case {
    int id;
    const char* v;
  };
  for (const Case c : {Case{3, "0.2*x1^2 + x2^2"}, Case{4, "0.2*x1^2 + x2^2"},
                       Case{3, "0.7424*x1^2 + 2.227*x2^2"}}) {
    CAPTURE(c.v);
    const SystemFile sys = test::benchmark(c.id);
    const Polynomial v = parse_polynomial(c.v, sys.variables);
    const auto chk = verify_certificate(offline(), v, sys.field, CertificateMode::Strict);
    CHECK_FALSE(chk.confirmed);
    REQUIRE(chk.counterexample.has_value());
    const Polynomial vdot = lie_derivative(v, sys.field);
    CHECK(evaluate(vdot, *chk.counterexample) >= 0);
  }
}

TEST_CASE("far-field violation needs the solver") {
  const SystemFile sys = test::benchmark(4);
  const Polynomial v = parse_polynomial("1.115*x1^2 + 4.603e-5*x1*x2 + 1.116*x2^2", sys.variables);
  CHECK_FALSE(verify_certificate(offline(), v, sys.field, CertificateMode::Strict).confirmed);
  if (!test::solver()) return;
  const auto chk = verify_certificate(online(), v, sys.field, CertificateMode::Strict);
  CHECK_FALSE(chk.confirmed);
  REQUIRE(chk.counterexample.has_value());
  CHECK(evaluate(lie_derivative(v, sys.field), *chk.counterexample) >= 0);
}

TEST_CASE("verified witnesses stay verified under positive scaling") {
  struct Case {
    int id;
    const char* v;
    CertificateMode mode;
  };
  std::vector<Case> cases = {{1, "x1^2 + x2^2", CertificateMode::Strict},
                             {2, "x1^2 + x2^2", CertificateMode::Strict},
                             {3, "1/3*x1^2 + x2^2", CertificateMode::Strict},
                             {4, "x1^2 + x2^2", CertificateMode::Strict}};
  if (test::solver()) {
    cases.push_back({5, "1/10*x1^2 + x2^2 + x3^2", CertificateMode::Strict});
    cases.push_back({8, "x1^4 + 2*x2^2", CertificateMode::WeakLaSalle});
    cases.push_back({9, "x1^6 + 3*x2^2", CertificateMode::WeakLaSalle});
    cases.push_back({10, "x1^2 + x2^2", CertificateMode::WeakLaSalle});
  }
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> num(1, 97), den(1, 89);
  const Verifier verifier = test::solver() ? online() : offline();
  for (const auto& c : cases) {
    CAPTURE(c.id);
    const SystemFile sys = test::benchmark(c.id);
    const Polynomial v = parse_polynomial(c.v, sys.variables);
    REQUIRE(verify_certificate(verifier, v, sys.field, c.mode).confirmed);
    for (int k = 0; k < 3; ++k) {
      Rational q(num(rng), den(rng));
      q.canonicalize();
      CHECK(verify_certificate(verifier, v * q, sys.field, c.mode).confirmed);
    }
  }
}

TEST_CASE("weak certificates on E8 do not pass the strict check") {
  const SystemFile e8 = test::benchmark(8);
  const Polynomial v = parse_polynomial("x1^4 + 2*x2^2", e8.variables);
  const auto strict = verify_certificate(offline(), v, e8.field, CertificateMode::Strict);
  CHECK_FALSE(strict.confirmed);
  const auto weak = verify_certificate(offline(), v, e8.field, CertificateMode::Weak);
  CHECK(weak.confirmed);
}

TEST_CASE("LaSalle scan on E8 stops at order five" * doctest::skip(!test::solver().has_value())) {
  const SystemFile e8 = test::benchmark(8);
  const Polynomial v = parse_polynomial("x1^4 + 2*x2^2", e8.variables);
  const VerificationOutcome o = online().check_lasalle(v, e8.field, 8);
  CHECK(o.valid());
  CHECK(o.order <= 5);
}

TEST_CASE("instability certificate for a saddle-like field") {
  const auto x = default_variable_names(2);
  const VectorField f({parse_polynomial("x2", x), parse_polynomial("x1^3", x)});
  const Polynomial v = parse_polynomial("-x1*x2", x);
  const Verifier verifier = test::solver() ? online() : offline();
  const VerificationOutcome ok = verifier.check_instability(v, f, {1, 1});
  CHECK(ok.valid());
  const VerificationOutcome bad = verifier.check_instability(v, f, {1, -1});
  CHECK_FALSE(bad.valid());
}
