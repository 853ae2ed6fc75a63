// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyra/synth.hpp"

namespace lyra {

struct RandomSystemSpec {
  std::size_t dimension = 2;
  unsigned max_degree = 2;
  unsigned terms_per_dim = 3;
  /// Coefficients are uniform over the nonzero integers in [-bound, bound].
  int coefficient_bound = 3;

  void validate() const;
};

/// Each component is a sum of `terms_per_dim` monomials drawn uniformly from
/// the exponent vectors of degree 1..max_degree; repeated monomials merge.
VectorField gen_system(const RandomSystemSpec& spec, std::uint64_t seed);

enum class ScreenResult { Keep, ExcludedTrivial, ExcludedZeroComponent };
std::string to_string(ScreenResult s);

/// Eigenvalues with real part above this are treated as trivially unstable.
inline constexpr double kEigenTolerance = 1e-9;

ScreenResult screen(const VectorField& f);

/// Jacobian of f at the origin.
std::vector<std::vector<double>> linearization(const VectorField& f);

enum class TrialClass {
  UNSTABLE_PROVEN,
  STABLE_PROVEN,
  TIMEOUT_BOTH,
  EXCLUDED_TRIVIAL,
  EXCLUDED_ZERO_COMPONENT,
  UNDECIDED,
};
std::string to_string(TrialClass c);

class SoundnessViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Combines the two directions. Throws SoundnessViolation when both
/// produced a certificate.
TrialClass classify(CertificateStatus stable, CertificateStatus unstable);

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  VectorField system;
  std::size_t distinct_terms = 0;
  TrialClass classification = TrialClass::UNDECIDED;
  std::optional<CertificateStatus> stable_status;
  std::optional<CertificateStatus> unstable_status;
  double stable_seconds = 0.0;
  double unstable_seconds = 0.0;
  std::optional<Polynomial> stable_witness;
  std::optional<Polynomial> unstable_witness;
  std::string stable_diagnostic;
  std::string unstable_diagnostic;
};

nlohmann::json to_json(const TrialRecord& r);

struct Table3Options {
  std::vector<std::size_t> dims = {2};
  std::vector<unsigned> degs = {2};
  std::size_t trials_per_cell = 100;
  double timeout_s = 1.0;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: hardware concurrency
  bool use_reduction = true;
  /// Draws per kept system before a cell gives up filling.
  std::size_t max_draw_factor = 100;
  RandomSystemSpec base;
  std::optional<SolverConfig> solver;
};

struct CellStats {
  std::size_t dimension = 0;
  unsigned max_degree = 0;
  std::size_t trials = 0;
  std::size_t drawn = 0;
  std::size_t excluded_trivial = 0;
  std::size_t excluded_zero = 0;
  std::size_t unstable = 0;
  std::size_t stable = 0;
  std::size_t timeout_both = 0;
  std::size_t undecided = 0;
  double unstable_pct = 0.0;
  double stable_pct = 0.0;
  double timeout_pct = 0.0;
  double mean_unstable_seconds = 0.0;
  double mean_stable_seconds = 0.0;
  std::vector<TrialRecord> records;
};

nlohmann::json to_json(const CellStats& c, bool with_records = false);

/// Templates of the two directions.
TemplateSpec stability_template(std::size_t n);
TemplateSpec instability_template(std::size_t n);

/// Runs both directions on one screened system.
TrialRecord run_trial(const VectorField& f, const Table3Options& options);

/// Per (dim, deg) cell: draws seeded systems until `trials_per_cell` pass
/// screening, then runs both directions on a worker pool.
std::vector<CellStats> run_table3(const Table3Options& options);

/// Seed of draw `k` in cell (n, deg).
std::uint64_t trial_seed(std::uint64_t base, std::size_t n, unsigned deg, std::size_t k);

}  // namespace lyra
