// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include "lyra/parse.hpp"
#include "support.hpp"

using namespace lyra;
using lyra::test::random_point;
using lyra::test::random_poly;

namespace {

Rational naive_eval(const Polynomial& p, const std::vector<Rational>& x) {
  Rational s = 0;
  for (const auto& [alpha, c] : p.terms()) {
    Rational m = c;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (unsigned k = 0; k < alpha[i]; ++k) m *= x[i];
    s += m;
  }
  return s;
}

// d/dt p(x + t e_i) at t = 0 by exact Lagrange interpolation through deg+1 nodes.
Rational interpolated_partial(const Polynomial& p, std::vector<Rational> x, std::size_t i) {
  const unsigned deg = p.max_degree().value_or(0);
  std::vector<Rational> nodes, values;
  for (unsigned k = 0; k <= deg; ++k) {
    nodes.push_back(Rational(int(k) - int(deg / 2)));
    auto y = x;
    y[i] += nodes.back();
    values.push_back(naive_eval(p, y));
  }
  Rational out = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    // L_k'(0) = sum_{m != k} (1 / (t_k - t_m)) prod_{j != k, m} (0 - t_j) / (t_k - t_j)
    Rational dl = 0;
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      if (m == k) continue;
      Rational term = 1 / (nodes[k] - nodes[m]);
      for (std::size_t j = 0; j < nodes.size(); ++j)
        if (j != k && j != m) term *= (0 - nodes[j]) / (nodes[k] - nodes[j]);
      dl += term;
    }
    out += values[k] * dl;
  }
  return out;
}

}  // namespace

TEST_CASE("ring laws hold on 500 random triples") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const Polynomial p = random_poly(rng, n, 4, 5), q = random_poly(rng, n, 3, 4), r = random_poly(rng, n, 3, 3);
    const auto x = random_point(rng, n);
    CHECK(p + q == q + p);
    CHECK(p * q == q * p);
    CHECK((p + q) + r == p + (q + r));
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * (q + r) == p * q + p * r);
    CHECK((p - p).is_zero());
    CHECK(naive_eval(p * q, x) == naive_eval(p, x) * naive_eval(q, x));
    CHECK(evaluate(p + q, x) == naive_eval(p, x) + naive_eval(q, x));
    CHECK(evaluate(p * q, x) == naive_eval(p, x) * naive_eval(q, x));
  }
}

TEST_CASE("gradient agrees with interpolation and obeys the product rule") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Polynomial p = random_poly(rng, n, 5, 5), q = random_poly(rng, n, 3, 3);
    const auto x = random_point(rng, n);
    const auto gp = gradient(p), gq = gradient(q), gpq = gradient(p * q);
    REQUIRE(gp.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(evaluate(gp[i], x) == interpolated_partial(p, x, i));
      CHECK(gpq[i] == gp[i] * q + p * gq[i]);
    }
  }
}

TEST_CASE("Euler identity on homogeneous layers") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const Polynomial p = random_poly(rng, n, 6, 6);
    if (p.is_zero()) continue;
    const unsigned d = *p.max_degree();
    const Polynomial h = p.homogeneous_layer(d);
    const auto g = gradient(h);
    Polynomial euler(n);
    for (std::size_t i = 0; i < n; ++i) euler += variable(n, i) * g[i];
    CHECK(euler == h * Rational(d));
  }
}

TEST_CASE("layers and exponents") {
  const auto x = default_variable_names(2);
  const Polynomial p = parse_polynomial("x1^4*x2 - 3*x1^2 + x2^3 + 5*x1*x2", x);
  CHECK(p.min_degree() == 2u);
  CHECK(p.max_degree() == 5u);
  CHECK(p.highest_layer() == parse_polynomial("x1^4*x2", x));
  CHECK(p.lowest_layer() == parse_polynomial("-3*x1^2 + 5*x1*x2", x));
  CHECK(p.max_exponent(0) == 4);
  CHECK(p.max_exponent(1) == 3);
  CHECK(Polynomial(2).max_exponent(0) == 0);
}

TEST_CASE("printing and parsing round trip") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const Polynomial p = random_poly(rng, n, 5, 6);
    CHECK(parse_polynomial(to_string(p), default_variable_names(n)) == p);
  }
  CHECK(to_string(Polynomial(2)) == "0");
}

TEST_CASE("parser accepts decimals and rejects junk") {
  const auto x = default_variable_names(2);
  CHECK(parse_polynomial("0.2*x1^2 + x2^2", x) == parse_polynomial("1/5*x1^2 + x2^2", x));
  CHECK(parse_polynomial("(x1 + x2)^2", x) == parse_polynomial("x1^2 + 2*x1*x2 + x2^2", x));
  CHECK_THROWS_AS(parse_polynomial("x1 + y", x), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x1 +", x), ParseError);
  try {
    parse_polynomial("x1 + * x2", x, 7);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(e.column() >= 5);
  }
}

TEST_CASE("dimension mismatch is an error") {
  CHECK_THROWS_AS(variable(2, 0) + variable(3, 0), DimensionError);
  CHECK_THROWS_AS(variable(2, 0).derivative(2), DimensionError);
}

TEST_CASE("rationals") {
  CHECK(parse_rational("0.9999") == Rational(9999, 10000));
  CHECK(parse_rational("4.603e-5") == Rational(4603, 100000000));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK(round_to_denominator(0.3186, 100) == Rational(8, 25));
  const Rational s = sqrt_upper(Rational(2));
  CHECK(s * s >= 2);
  CHECK((s - Rational(1, 1000000)) * (s - Rational(1, 1000000)) < 2);
  CHECK(to_string(parse_rational("6/4")) == "3/2");
}
