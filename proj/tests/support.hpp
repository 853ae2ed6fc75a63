// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lyra/poly.hpp"
#include "lyra/smt.hpp"
#include "lyra/system_file.hpp"

namespace lyra::test {

inline std::string system_path(int id) { return std::string(LYRA_DATA_DIR) + "/e" + std::to_string(id) + ".sys"; }

inline SystemFile benchmark(int id) { return load_system(system_path(id)); }

/// c * x^alpha in n variables.
inline Polynomial term(Rational c, std::vector<unsigned> alpha) {
  return Polynomial::monomial(MultiIndex(std::move(alpha)), c);
}

inline Polynomial sum(std::initializer_list<Polynomial> parts) {
  Polynomial out(parts.begin()->dimension());
  for (const auto& p : parts) out += p;
  return out;
}

inline Rational random_rational(std::mt19937_64& rng, int num = 9, int den = 5) {
  std::uniform_int_distribution<int> n(-num, num), d(1, den);
  Rational r(n(rng), d(rng));
  r.canonicalize();
  return r;
}

inline Polynomial random_poly(std::mt19937_64& rng, std::size_t n, unsigned max_deg, std::size_t terms) {
  std::uniform_int_distribution<unsigned> e(0, max_deg);
  Polynomial p(n);
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<unsigned> alpha(n);
    unsigned budget = max_deg;
    for (auto& a : alpha) {
      a = std::min(budget, e(rng));
      budget -= a;
    }
    p.add_term(MultiIndex(alpha), random_rational(rng));
  }
  return p;
}

inline std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t n) {
  std::vector<Rational> x(n);
  for (auto& v : x) v = random_rational(rng, 7, 4);
  return x;
}

inline const std::optional<SolverConfig>& solver() {
  static const std::optional<SolverConfig> s = detect_solver();
  return s;
}

}  // namespace lyra::test
