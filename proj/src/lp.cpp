// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/lp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lyra {

void LpProblem::add_hard(std::vector<double> row, double rhs) {
  if (row.size() != num_vars) throw std::invalid_argument("LP row has wrong length");
  hard.push_back(std::move(row));
  hard_rhs.push_back(rhs);
}

void LpProblem::add_soft(std::vector<double> row, double rhs) {
  if (row.size() != num_vars) throw std::invalid_argument("LP row has wrong length");
  soft.push_back(std::move(row));
  soft_rhs.push_back(rhs);
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPriceTol = 1e-9;
constexpr double kPivotTol = 1e-11;

// Dual in standard form: maximize cost.w s.t. A w = 0, 0 <= w <= upper.
struct DualLp {
  Eigen::MatrixXd a;  // d x m
  Eigen::VectorXd cost;
  Eigen::VectorXd upper;
};

DualLp make_dual(const LpProblem& p) {
  const std::size_t d = p.num_vars;
  const std::size_t reg = p.l1_weight > 0.0 ? 2 * d : 0;
  const std::size_t m = p.hard.size() + p.soft.size() + 2 * d + reg;
  DualLp dual{Eigen::MatrixXd::Zero(static_cast<long>(d), static_cast<long>(m)), Eigen::VectorXd::Zero(long(m)),
              Eigen::VectorXd::Constant(long(m), kInf)};
  long col = 0;
  // Slack-bound columns first so that the initial basis is 0..d-1.
  for (std::size_t i = 0; i < d; ++i, ++col) {
    dual.a(long(i), col) = 1.0;
    dual.cost(col) = -p.bound;
  }
  for (std::size_t i = 0; i < d; ++i, ++col) {
    dual.a(long(i), col) = -1.0;
    dual.cost(col) = -p.bound;
  }
  for (std::size_t k = 0; k < reg; ++k, ++col) {
    dual.a(long(k % d), col) = k < d ? 1.0 : -1.0;
    dual.upper(col) = p.l1_weight;
  }
  for (std::size_t j = 0; j < p.hard.size(); ++j, ++col) {
    for (std::size_t i = 0; i < d; ++i) dual.a(long(i), col) = p.hard[j][i];
    dual.cost(col) = p.hard_rhs[j];
  }
  for (std::size_t j = 0; j < p.soft.size(); ++j, ++col) {
    for (std::size_t i = 0; i < d; ++i) dual.a(long(i), col) = -p.soft[j][i];
    dual.cost(col) = -p.soft_rhs[j];
    dual.upper(col) = 1.0;
  }
  return dual;
}

}  // namespace

LpResult solve_lp(const LpProblem& problem, std::size_t max_iterations) {
  const long d = static_cast<long>(problem.num_vars);
  LpResult res;
  if (d == 0) {
    res.status = LpStatus::Optimal;
    for (double r : problem.hard_rhs)
      if (r > 0) res.status = LpStatus::Infeasible;
    for (double r : problem.soft_rhs) res.slack += std::max(0.0, -r);
    return res;
  }
  DualLp lp = make_dual(problem);
  const long m = lp.a.cols();
  if (max_iterations == 0) max_iterations = 50 * static_cast<std::size_t>(m + d);

  std::vector<long> basis(static_cast<std::size_t>(d));
  std::vector<int> where(static_cast<std::size_t>(m), -1);  // basis row, or -1
  std::vector<bool> at_upper(static_cast<std::size_t>(m), false);
  for (long i = 0; i < d; ++i) {
    basis[std::size_t(i)] = i;
    where[std::size_t(i)] = int(i);
  }

  Eigen::MatrixXd binv(d, d);
  Eigen::VectorXd xb(d), pi(d);
  std::size_t degenerate_run = 0;

  auto refresh = [&] {
    Eigen::MatrixXd b(d, d);
    for (long i = 0; i < d; ++i) b.col(i) = lp.a.col(basis[std::size_t(i)]);
    binv = b.fullPivLu().inverse();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    for (long j = 0; j < m; ++j)
      if (at_upper[std::size_t(j)]) rhs -= lp.a.col(j) * lp.upper(j);
    xb = binv * rhs;
    Eigen::VectorXd cb(d);
    for (long i = 0; i < d; ++i) cb(i) = lp.cost(basis[std::size_t(i)]);
    pi = binv.transpose() * cb;
  };

  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    refresh();
    const bool bland = degenerate_run > 50;
    long entering = -1;
    double best = 0.0;
    for (long j = 0; j < m; ++j) {
      if (where[std::size_t(j)] >= 0) continue;
      const double rc = lp.cost(j) - pi.dot(lp.a.col(j));
      const double gain = at_upper[std::size_t(j)] ? -rc : rc;
      if (gain <= kPriceTol) continue;
      if (bland) {
        entering = j;
        break;
      }
      if (gain > best) {
        best = gain;
        entering = j;
      }
    }
    if (entering < 0) {
      res.status = LpStatus::Optimal;
      break;
    }
    const double dir = at_upper[std::size_t(entering)] ? -1.0 : 1.0;
    const Eigen::VectorXd col = binv * lp.a.col(entering);
    // Moving w_q by dir*t changes x_B by -dir*t*col.
    double step = lp.upper(entering);
    long leaving = -1;
    bool leaving_to_upper = false;
    for (long i = 0; i < d; ++i) {
      const double delta = -dir * col(i);
      const double ub = lp.upper(basis[std::size_t(i)]);
      double limit = kInf;
      bool to_upper = false;
      if (delta < -kPivotTol) {
        limit = std::max(0.0, xb(i)) / -delta;
      } else if (delta > kPivotTol && std::isfinite(ub)) {
        limit = std::max(0.0, ub - xb(i)) / delta;
        to_upper = true;
      } else {
        continue;
      }
      const bool better = limit < step - 1e-12 ||
                          (limit <= step + 1e-12 && leaving >= 0 && bland && basis[std::size_t(i)] < basis[std::size_t(leaving)]);
      if (leaving < 0 ? limit <= step : better) {
        step = limit;
        leaving = i;
        leaving_to_upper = to_upper;
      }
    }
    if (!std::isfinite(step)) {
      res.status = LpStatus::Infeasible;
      break;
    }
    degenerate_run = step < 1e-12 ? degenerate_run + 1 : 0;
    if (leaving < 0) {
      at_upper[std::size_t(entering)] = !at_upper[std::size_t(entering)];
      continue;
    }
    const long out = basis[std::size_t(leaving)];
    where[std::size_t(out)] = -1;
    at_upper[std::size_t(out)] = leaving_to_upper;
    basis[std::size_t(leaving)] = entering;
    where[std::size_t(entering)] = int(leaving);
    at_upper[std::size_t(entering)] = false;
  }
  if (res.status != LpStatus::Optimal) refresh();

  res.x.assign(pi.data(), pi.data() + d);
  for (std::size_t j = 0; j < problem.soft.size(); ++j) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < problem.num_vars; ++i) lhs += problem.soft[j][i] * res.x[i];
    res.slack += std::max(0.0, lhs - problem.soft_rhs[j]);
  }
  return res;
}

}  // namespace lyra
