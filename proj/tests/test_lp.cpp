// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include <cmath>
#include <random>

#include "lyra/lp.hpp"

using namespace lyra;

TEST_CASE("feasible hard rows") {
  LpProblem p;
  p.num_vars = 2;
  p.add_hard({1, 1}, 1);
  p.add_hard({1, -1}, 0);
  p.l1_weight = 1e-3;
  const LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] + r.x[1] >= 1 - 1e-9);
  CHECK(r.x[0] - r.x[1] >= -1e-9);
  CHECK(std::abs(r.x[0]) + std::abs(r.x[1]) == doctest::Approx(1.0));
  CHECK(r.slack == doctest::Approx(0.0));
}

TEST_CASE("box makes hard rows infeasible") {
  LpProblem p;
  p.num_vars = 1;
  p.bound = 10;
  p.add_hard({1}, 11);
  CHECK(solve_lp(p).status == LpStatus::Infeasible);
}

TEST_CASE("soft rows report their minimal violation") {
  LpProblem p;
  p.num_vars = 1;
  p.add_hard({1}, 1);
  p.add_soft({1}, -1);
  p.add_soft({1}, 3);
  const LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.slack == doctest::Approx(2.0));
  CHECK(r.x[0] == doctest::Approx(1.0));
}

TEST_CASE("L1 weight selects sparse solutions") {
  LpProblem p;
  p.num_vars = 3;
  p.add_hard({1, 1, 1}, 1);
  p.add_hard({1, 0, 0}, 0);
  p.add_hard({0, 1, 0}, 0);
  p.add_hard({0, 0, 1}, 0);
  p.add_hard({2, 1, 1}, 1.5);
  p.l1_weight = 1e-2;
  const LpResult r = solve_lp(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] + r.x[1] + r.x[2] == doctest::Approx(1.0));
  CHECK(r.x[0] >= 0.5 - 1e-9);
}

TEST_CASE("random problems: returned points satisfy the hard rows and the reported slack") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    LpProblem p;
    p.num_vars = 2 + trial % 4;
    std::vector<double> anchor(p.num_vars);
    for (auto& a : anchor) a = 2 * u(rng);
    for (int k = 0; k < 6; ++k) {
      std::vector<double> row(p.num_vars);
      double dot = 0;
      for (std::size_t i = 0; i < p.num_vars; ++i) dot += (row[i] = u(rng)) * anchor[i];
      p.add_hard(row, dot - 0.1);  // the anchor is strictly feasible
    }
    for (int k = 0; k < 6; ++k) {
      std::vector<double> row(p.num_vars);
      for (auto& v : row) v = u(rng);
      p.add_soft(row, u(rng));
    }
    const LpResult r = solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    double slack = 0;
    for (std::size_t j = 0; j < p.hard.size(); ++j) {
      double lhs = 0;
      for (std::size_t i = 0; i < p.num_vars; ++i) lhs += p.hard[j][i] * r.x[i];
      CHECK(lhs >= p.hard_rhs[j] - 1e-7);
    }
    for (std::size_t j = 0; j < p.soft.size(); ++j) {
      double lhs = 0;
      for (std::size_t i = 0; i < p.num_vars; ++i) {
        lhs += p.soft[j][i] * r.x[i];
      }
      slack += std::max(0.0, lhs - p.soft_rhs[j]);
    }
    for (double v : r.x) CHECK(std::abs(v) <= p.bound + 1e-7);
    CHECK(r.slack == doctest::Approx(slack));
    // The anchor is feasible, so the optimum can be no worse than its slack.
    double anchor_slack = 0;
    for (std::size_t j = 0; j < p.soft.size(); ++j) {
      double lhs = 0;
      for (std::size_t i = 0; i < p.num_vars; ++i) lhs += p.soft[j][i] * anchor[i];
      anchor_slack += std::max(0.0, lhs - p.soft_rhs[j]);
    }
    CHECK(r.slack <= anchor_slack + 1e-7);
  }
}
