// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "lyra/lie.hpp"
#include "lyra/template.hpp"

namespace lyra {

enum class ConstraintKind { Equality, Nonpositive };

/// Which necessary condition for global non-positivity produced a constraint.
enum class Rule {
  ExtremeLayer,       // R1: lowest/highest total degree must be even
  MaxExponent,        // R2: largest exponent of each variable must be even
  LayerMaxExponent,   // R3: R2 inside the lowest and highest layers
  PurePower,          // R4: extreme pure powers c*x_i^d need d even and c <= 0
};

std::string to_string(Rule r);

struct ReductionConstraint {
  ConstraintKind kind = ConstraintKind::Equality;
  AffineForm form;  // form = 0 or form <= 0
  Rule rule = Rule::ExtremeLayer;

  /// A parameter-free constraint that is false, e.g. "3 = 0" or "2 <= 0".
  bool violated_constant() const;
  /// A parameter-free constraint that holds trivially.
  bool trivially_true() const;
  std::string to_string() const;
};

/// Necessary conditions for p(x) <= 0 on all of R^n, read off the support of p.
/// Every stored coefficient is treated as generically nonzero. Constraints are
/// deduplicated on (kind, form); the first producing rule is kept.
std::vector<ReductionConstraint> extract_constraints(const ParamPoly& p);

enum class ReductionStatus {
  Reduced,     // fixpoint reached with a nonzero template
  Collapsed,   // every parameter was forced to zero
  Infeasible,  // a parameter-free constraint is violated
};

std::string to_string(ReductionStatus s);

struct ReductionResult {
  ReductionStatus status = ReductionStatus::Reduced;
  ParamPoly reduced_template;
  ParamPoly reduced_lie;
  /// Eliminated param -> expression in the surviving params.
  std::map<int, AffineForm> substitutions;
  std::vector<AffineForm> equalities_applied;
  /// Nonpositivity constraints expressed in surviving params.
  std::vector<ReductionConstraint> inequalities_pending;
  /// Rounds that applied at least one equality.
  int iterations = 0;
  std::string diagnostic;
};

/// Repeatedly computes V', extracts constraints and eliminates parameters with
/// the equalities until no equality is produced.
ReductionResult reduce_to_fixpoint(const ParamPoly& v, const VectorField& f, std::size_t term_cap = kDefaultTermCap);

}  // namespace lyra
