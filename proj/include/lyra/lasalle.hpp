// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <optional>
#include <vector>

#include "lyra/lie.hpp"
#include "lyra/smt.hpp"
#include "lyra/verify.hpp"

namespace lyra {

enum class LaSalleVariant {
  Disjunctive,  // (L1 = 0 and x != 0) => L2 != 0 or ... or Lr != 0
  SingleOrder,  // (L1 = 0 and x != 0) => Lr != 0
};

std::string to_string(LaSalleVariant v);

/// The implication whose validity shows that the largest invariant subset of
/// {V' = 0} is the origin. `chain` holds L_f^1 V ... L_f^r V already mapped
/// into the space of `norm`, which is the squared norm of the state block.
Formula lasalle_formula(const std::vector<Polynomial>& chain, const Polynomial& norm, unsigned r,
                        LaSalleVariant variant);

struct LaSalleEncoding {
  std::vector<Polynomial> chain;  // L_f^1 V ... L_f^r V
  unsigned r = 2;
  LaSalleVariant variant = LaSalleVariant::SingleOrder;
  /// Body over the n state variables; valid iff the condition holds.
  Formula formula = Formula::top();
  /// forall x . formula, as handed to a solver.
  QuantifiedFormula quantified;
};

/// Throws std::invalid_argument for r < 2 and TermCapExceeded from the chain.
LaSalleEncoding build_lasalle(const Polynomial& v, const VectorField& f, unsigned r, LaSalleVariant variant,
                              std::size_t term_cap = kDefaultTermCap);

/// Parametric body for inlining into synthesis: params occupy slots given by
/// `param_slot` and the state block starts at `state_offset`.
Formula build_lasalle_parametric(const ParamPoly& v, const VectorField& f, unsigned r, LaSalleVariant variant,
                                 const std::map<int, std::size_t>& param_slot, std::size_t state_offset,
                                 std::size_t joint_dimension, std::size_t term_cap = kDefaultTermCap);

struct LaSalleScan {
  bool verified = false;
  std::optional<unsigned> r_used;
  LaSalleVariant variant = LaSalleVariant::SingleOrder;
  std::vector<VerificationOutcome> attempts;
  bool timed_out = false;
};

/// Single orders r = 2..r_max, then the disjunctive form at r_max. Stops at
/// the first valid encoding.
LaSalleScan lasalle_scan(const Verifier& verifier, const Polynomial& v, const VectorField& f, unsigned r_max);

}  // namespace lyra
