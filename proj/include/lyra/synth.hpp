// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyra/smt.hpp"
#include "lyra/symred.hpp"
#include "lyra/template.hpp"
#include "lyra/verify.hpp"

namespace lyra {

enum class SynthMethod { Complete, LpCegis, SmtCegis };
std::string to_string(SynthMethod m);
SynthMethod parse_method(const std::string& s);

enum class CertificateStatus { GAS, GAS_LASALLE, NOT_GAS, UNKNOWN, TIMEOUT, TEMPLATE_INFEASIBLE };
std::string to_string(CertificateStatus s);

/// Exit code contract of the command line tool.
int exit_code(CertificateStatus s);

struct SynthesisConfig {
  SynthMethod method = SynthMethod::Complete;
  CertificateMode mode = CertificateMode::Strict;
  bool use_reduction = true;
  Rational mu = Rational(1, 100);
  /// 0 selects the method default: 3000 for LP, 300 for SMT samples.
  std::size_t n_samples = 0;
  unsigned cegis_steps = 10;
  /// Candidates are rounded to k / rounding_denominator; 0 disables rounding.
  std::int64_t rounding_denominator = 200;
  Rational domain_halfwidth = 10;
  double timeout_s = 60.0;
  std::uint64_t seed = 1;
  double lp_bound = 10.0;
  unsigned lasalle_r_max = 8;
  /// Put the LaSalle condition into the synthesis query at this order instead
  /// of checking it afterwards.
  std::optional<unsigned> inline_lasalle_r;
  /// Retry with inlined LaSalle orders when the post-hoc scan fails.
  bool lasalle_inline_fallback = true;
  std::size_t term_cap = kDefaultTermCap;
  std::optional<SolverConfig> solver;

  void validate() const;
  std::size_t samples() const;
  Verifier verifier() const;
};

/// Linear constraint sum_i coeffs[i] * c_i + constant (rel) 0.
struct LinearRow {
  std::map<int, Rational> coeffs;
  Rational constant = 0;
  Rel rel = Rel::Le;
  std::string origin;  // "V", "dV" or "pending"

  Rational evaluate(const Assignment& a) const;
  bool satisfied(const Assignment& a) const { return holds(evaluate(a), rel); }
};

struct ConstraintSet {
  std::vector<LinearRow> rows;
};

/// Nonzero, duplicate-free sample points.
class SampleSet {
 public:
  explicit SampleSet(std::size_t dimension) : dim_(dimension) {}
  /// False when p is zero or already present.
  bool add(const Point& p);
  void add_uniform(std::size_t count, const Rational& halfwidth, std::uint64_t seed);
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::size_t dim_;
  std::vector<Point> points_;
};

/// |y|^d for the Euclidean norm: exact for even d, rounded up otherwise.
Rational norm_power(const Point& y, unsigned d);

/// Affine value of a parametric polynomial at a point.
AffineForm evaluate(const ParamPoly& v, const Point& y);

/// Two rows per sample: V(y) > 0 and V'(y) < 0, or with strengthened margins
/// V(y) >= mu min(|y|^lV, |y|^kV) and V'(y) <= -mu min(|y|^lV', |y|^kV').
/// With weak_decrease the second row becomes V'(y) <= 0.
ConstraintSet build_sample_constraints(const ParamPoly& v, const ParamPoly& vdot, const std::vector<Point>& samples,
                                       const Rational& mu, bool strengthened, bool weak_decrease = false);

struct CandidateRecord {
  unsigned step = 0;
  Polynomial candidate;
  Assignment params;
  bool confirmed = false;
  std::vector<VerificationOutcome> outcomes;
  std::optional<Point> counterexample;
  std::string note;
};

struct Timings {
  double reduction = 0.0;
  double solve = 0.0;
  double verify = 0.0;
  double total = 0.0;
};

struct CertificateReport {
  CertificateStatus status = CertificateStatus::UNKNOWN;
  std::optional<Polynomial> witness;
  std::optional<Point> instability_point;
  std::string method;
  std::string mode;
  bool use_reduction = true;
  std::string system;
  std::vector<std::string> variables;
  std::string template_text;
  std::string reduced_template;
  Timings timings;
  unsigned cegis_iterations = 0;
  std::size_t counterexamples_used = 0;
  std::optional<unsigned> lasalle_order;
  std::vector<VerificationOutcome> checks;
  std::vector<CandidateRecord> history;
  std::string diagnostic;

  bool certified() const;
};

nlohmann::json to_json(const CertificateReport& r);
nlohmann::json to_json(const VerificationOutcome& o, const std::vector<std::string>& names);

/// Eq.-style complete synthesis: exists c . forall x . conditions(mode).
CertificateReport synth_complete(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config);

/// Sample-based CEGIS with an LP (config.method == LpCegis) or SMT backend.
CertificateReport cegis(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config);

/// Dispatch on config.method.
CertificateReport synthesize(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config);

/// exists c, z . V(z) < V(0) and forall x . (V(x) <= 0 => V'(x) <= 0).
CertificateReport synth_instability(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config);

}  // namespace lyra
