// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lyra {

/// minimize sum_j s_j + l1_weight * sum_i |c_i|
///   subject to  hard_j . c >= hard_rhs_j
///               soft_j . c <= soft_rhs_j + s_j,  s_j >= 0
///               -bound <= c_i <= bound
///
/// Solved through its dual, which has one equality row per variable c_i and
/// is always feasible at zero; the primal solution is read off the simplex
/// multipliers.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<std::vector<double>> hard;
  std::vector<double> hard_rhs;
  std::vector<std::vector<double>> soft;
  std::vector<double> soft_rhs;
  double bound = 10.0;
  double l1_weight = 0.0;

  void add_hard(std::vector<double> row, double rhs);
  void add_soft(std::vector<double> row, double rhs);
};

enum class LpStatus {
  Optimal,         // minimum found; x is a primal optimum
  Infeasible,      // the hard rows and the box admit no point
  IterationLimit,  // gave up; x holds the last multipliers
};

std::string to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> x;
  /// Optimal total slack of the soft rows.
  double slack = 0.0;
  std::size_t iterations = 0;
};

/// Dense bounded simplex on the dual. Dantzig pricing, switching to Bland's
/// rule after a run of degenerate pivots.
LpResult solve_lp(const LpProblem& problem, std::size_t max_iterations = 0);

}  // namespace lyra
