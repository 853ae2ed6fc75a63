// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyra/poly.hpp"
#include "lyra/smt.hpp"

namespace lyra {

using Point = std::vector<Rational>;

enum class CheckTag { PD, RU, NSD, ND, LaSalle, Instab };
enum class Validity { Valid, Invalid, Unknown, Timeout };

std::string to_string(Validity v);

struct VerificationOutcome {
  Validity verdict = Validity::Unknown;
  CheckTag check = CheckTag::PD;
  /// Lie order for LaSalle checks.
  unsigned order = 0;
  /// Set iff verdict is Invalid; the violation has been re-checked exactly.
  Point counterexample;
  /// "syntactic", "quadratic-form", "smt", "numeric" or "none".
  std::string method = "none";
  std::string diagnostic;
  double seconds = 0.0;

  bool valid() const { return verdict == Validity::Valid; }
  /// "PD", "ND", "LASALLE(5)", ...
  std::string tag() const;
  std::string to_string(const std::vector<std::string>& names = {}) const;
};

enum class Strictness { NegativeDefinite, NegativeSemidefinite };

struct FalsifyOptions {
  std::size_t budget = 4000;
  std::uint64_t seed = 1;
  double halfwidth = 10.0;
  int ray_exponent = 20;
};

/// Searches for x != 0 with holds(p(x), goal). Candidates are screened in
/// double precision and every returned point is confirmed exactly.
std::optional<Point> falsify_numeric(const Polynomial& p, Rel goal, const FalsifyOptions& opts = {});

/// Searches for x != 0 (in n variables) at which `phi` is false.
std::optional<Point> falsify_formula(const Formula& phi, std::size_t n, const FalsifyOptions& opts = {});

/// Sufficient test for sign-definiteness from the support of p: all exponents
/// even and all coefficients of sign `sign` (+1 or -1). With `strict` every
/// variable must also carry a pure power.
bool syntactic_definite(const Polynomial& p, int sign, bool strict);

/// Exact definiteness test for homogeneous quadratic forms (LDL^T over the
/// rationals). Returns nullopt when p is not a quadratic form.
std::optional<bool> quadratic_form_definite(const Polynomial& p, int sign, bool strict);

struct VerifierOptions {
  std::optional<SolverConfig> solver;
  double timeout_s = 60.0;
  FalsifyOptions falsify;
  unsigned lasalle_r_max = 8;
};

class Verifier {
 public:
  explicit Verifier(VerifierOptions opts = {}) : opts_(std::move(opts)) {}

  const VerifierOptions& options() const { return opts_; }
  bool has_solver() const { return opts_.solver.has_value(); }

  /// V(x) > 0 for all x != 0.
  VerificationOutcome check_pd(const Polynomial& v) const;
  /// Sufficient radial unboundedness test; never returns Invalid.
  VerificationOutcome check_ru(const Polynomial& v) const;
  VerificationOutcome check_sign(const Polynomial& p, Strictness s) const;
  VerificationOutcome check_lasalle(const Polynomial& v, const VectorField& f, unsigned r_max) const;
  /// V(z) < V(0) and V'(x) <= 0 wherever V(x) <= 0.
  VerificationOutcome check_instability(const Polynomial& v, const VectorField& f, const Point& z) const;

  /// Validity of "forall x . phi" over n state variables.
  VerificationOutcome check_valid(const Formula& phi, std::size_t n, CheckTag tag, unsigned order = 0) const;

 private:
  VerificationOutcome smt_valid(const Formula& phi, std::size_t n, VerificationOutcome out) const;

  VerifierOptions opts_;
};

enum class CertificateMode { Strict, Weak, WeakLaSalle };

std::string to_string(CertificateMode m);

struct CertificateCheck {
  /// Every condition required by the mode was confirmed.
  bool confirmed = false;
  /// Confirmed via the LaSalle route rather than a strict decrease.
  bool via_lasalle = false;
  unsigned lasalle_order = 0;
  std::vector<VerificationOutcome> outcomes;
  /// First confirmed counterexample, if any check failed with one.
  std::optional<Point> counterexample;
  /// Some check timed out.
  bool timed_out = false;
};

/// PD, RU, then ND (Strict), NSD (Weak) or NSD plus a LaSalle scan
/// (WeakLaSalle). Weak confirms stability only, not global attraction.
CertificateCheck verify_certificate(const Verifier& verifier, const Polynomial& v, const VectorField& f,
                                    CertificateMode mode);

}  // namespace lyra
