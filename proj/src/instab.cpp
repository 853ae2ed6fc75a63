// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/instab.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <random>
#include <mutex>
#include <thread>

namespace lyra {

void RandomSystemSpec::validate() const {
  if (dimension < 2 || dimension > 10) throw std::invalid_argument("dimension must lie in 2..10");
  if (max_degree < 1) throw std::invalid_argument("max degree must be positive");
  if (terms_per_dim < 1) throw std::invalid_argument("terms per component must be positive");
  if (coefficient_bound < 1) throw std::invalid_argument("coefficient bound must be positive");
}

namespace {

void exponent_vectors(std::size_t n, unsigned degree, std::vector<unsigned>& cur, std::vector<MultiIndex>& out) {
  if (cur.size() + 1 == n) {
    cur.push_back(degree);
    out.emplace_back(cur);
    cur.pop_back();
    return;
  }
  for (unsigned d = degree + 1; d-- > 0;) {
    cur.push_back(d);
    exponent_vectors(n, degree - d, cur, out);
    cur.pop_back();
  }
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

VectorField gen_system(const RandomSystemSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.dimension;
  std::vector<MultiIndex> monomials;
  for (unsigned d = 1; d <= spec.max_degree; ++d) {
    std::vector<unsigned> cur;
    exponent_vectors(n, d, cur, monomials);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, monomials.size() - 1);
  std::uniform_int_distribution<int> coeff(1, 2 * spec.coefficient_bound);
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial p(n);
    for (unsigned t = 0; t < spec.terms_per_dim; ++t) {
      const MultiIndex& alpha = monomials[pick(rng)];
      int c = coeff(rng) - spec.coefficient_bound;
      if (c <= 0) --c;
      p.add_term(alpha, Rational(c));
    }
    comps.push_back(std::move(p));
  }
  return VectorField(std::move(comps));
}

std::string to_string(ScreenResult s) {
  switch (s) {
    case ScreenResult::Keep: return "KEEP";
    case ScreenResult::ExcludedTrivial: return "EXCLUDED_TRIVIAL";
    case ScreenResult::ExcludedZeroComponent: return "EXCLUDED_ZERO_COMPONENT";
  }
  return "?";
}

std::vector<std::vector<double>> linearization(const VectorField& f) {
  const std::size_t n = f.dimension();
  std::vector<std::vector<double>> j(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) j[i][k] = to_double(f[i].coefficient(MultiIndex::unit(n, k)));
  return j;
}

ScreenResult screen(const VectorField& f) {
  for (std::size_t i = 0; i < f.dimension(); ++i)
    if (f[i].is_zero()) return ScreenResult::ExcludedZeroComponent;
  const auto j = linearization(f);
  const long n = static_cast<long>(f.dimension());
  Eigen::MatrixXd m(n, n);
  for (long r = 0; r < n; ++r)
    for (long c = 0; c < n; ++c) m(r, c) = j[std::size_t(r)][std::size_t(c)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  for (long k = 0; k < n; ++k)
    if (es.eigenvalues()(k).real() > kEigenTolerance) return ScreenResult::ExcludedTrivial;
  return ScreenResult::Keep;
}

std::string to_string(TrialClass c) {
  switch (c) {
    case TrialClass::UNSTABLE_PROVEN: return "UNSTABLE_PROVEN";
    case TrialClass::STABLE_PROVEN: return "STABLE_PROVEN";
    case TrialClass::TIMEOUT_BOTH: return "TIMEOUT_BOTH";
    case TrialClass::EXCLUDED_TRIVIAL: return "EXCLUDED_TRIVIAL";
    case TrialClass::EXCLUDED_ZERO_COMPONENT: return "EXCLUDED_ZERO_COMPONENT";
    case TrialClass::UNDECIDED: return "UNDECIDED";
  }
  return "?";
}

TrialClass classify(CertificateStatus stable, CertificateStatus unstable) {
  const bool s = stable == CertificateStatus::GAS || stable == CertificateStatus::GAS_LASALLE;
  const bool u = unstable == CertificateStatus::NOT_GAS;
  if (s && u) throw SoundnessViolation("system certified both stable and not GAS");
  if (u) return TrialClass::UNSTABLE_PROVEN;
  if (s) return TrialClass::STABLE_PROVEN;
  if (stable == CertificateStatus::TIMEOUT && unstable == CertificateStatus::TIMEOUT) return TrialClass::TIMEOUT_BOTH;
  return TrialClass::UNDECIDED;
}

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j;
  j["index"] = r.index;
  j["seed"] = r.seed;
  nlohmann::json f = nlohmann::json::array();
  for (std::size_t i = 0; i < r.system.dimension(); ++i) f.push_back(to_string(r.system[i]));
  j["system"] = f;
  j["distinct_terms"] = r.distinct_terms;
  j["classification"] = to_string(r.classification);
  j["stable_status"] = r.stable_status ? nlohmann::json(to_string(*r.stable_status)) : nlohmann::json(nullptr);
  j["unstable_status"] = r.unstable_status ? nlohmann::json(to_string(*r.unstable_status)) : nlohmann::json(nullptr);
  j["stable_seconds"] = r.stable_seconds;
  j["unstable_seconds"] = r.unstable_seconds;
  j["stable_witness"] = r.stable_witness ? nlohmann::json(to_string(*r.stable_witness)) : nlohmann::json(nullptr);
  j["unstable_witness"] = r.unstable_witness ? nlohmann::json(to_string(*r.unstable_witness)) : nlohmann::json(nullptr);
  j["stable_diagnostic"] = r.stable_diagnostic;
  j["unstable_diagnostic"] = r.unstable_diagnostic;
  return j;
}

nlohmann::json to_json(const CellStats& c, bool with_records) {
  nlohmann::json j = {{"dimension", c.dimension},
                      {"max_degree", c.max_degree},
                      {"trials", c.trials},
                      {"drawn", c.drawn},
                      {"excluded_trivial", c.excluded_trivial},
                      {"excluded_zero_component", c.excluded_zero},
                      {"unstable", c.unstable},
                      {"stable", c.stable},
                      {"timeout_both", c.timeout_both},
                      {"undecided", c.undecided},
                      {"unstable_pct", c.unstable_pct},
                      {"stable_pct", c.stable_pct},
                      {"timeout_pct", c.timeout_pct},
                      {"mean_unstable_seconds", c.mean_unstable_seconds},
                      {"mean_stable_seconds", c.mean_stable_seconds},
                      {"coefficient_law", "uniform nonzero integers in [-3, 3]"}};
  if (with_records) {
    j["records"] = nlohmann::json::array();
    for (const auto& r : c.records) j["records"].push_back(to_json(r));
  }
  return j;
}

TemplateSpec stability_template(std::size_t n) { return TemplateSpec::default_for(n, 2); }

TemplateSpec instability_template(std::size_t n) {
  TemplateSpec s;
  s.dimension = n;
  s.min_degree = 1;
  s.max_degree = 2;
  s.parity = Parity::All;
  s.cross_terms = true;
  return s;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, unsigned deg, std::size_t k) {
  return splitmix(splitmix(splitmix(base) ^ n) ^ (std::uint64_t(deg) << 32) ^ k);
}

TrialRecord run_trial(const VectorField& f, const Table3Options& options) {
  TrialRecord rec;
  rec.system = f;
  for (std::size_t i = 0; i < f.dimension(); ++i) rec.distinct_terms += f[i].size();
  const ScreenResult sr = screen(f);
  if (sr == ScreenResult::ExcludedTrivial) {
    rec.classification = TrialClass::EXCLUDED_TRIVIAL;
    return rec;
  }
  if (sr == ScreenResult::ExcludedZeroComponent) {
    rec.classification = TrialClass::EXCLUDED_ZERO_COMPONENT;
    return rec;
  }
  SynthesisConfig cfg;
  cfg.method = SynthMethod::Complete;
  cfg.mode = CertificateMode::Strict;
  cfg.use_reduction = options.use_reduction;
  cfg.timeout_s = options.timeout_s;
  cfg.solver = options.solver;
  cfg.lasalle_inline_fallback = false;

  CertificateReport s = synth_complete(f, stability_template(f.dimension()), cfg);
  rec.stable_status = s.status;
  rec.stable_seconds = s.timings.total;
  rec.stable_witness = s.witness;
  rec.stable_diagnostic = s.diagnostic;

  const CertificateReport u = synth_instability(f, instability_template(f.dimension()), cfg);
  rec.unstable_status = u.status;
  rec.unstable_seconds = u.timings.total;
  rec.unstable_witness = u.witness;
  rec.unstable_diagnostic = u.diagnostic;

  rec.classification = classify(s.status, u.status);
  return rec;
}

std::vector<CellStats> run_table3(const Table3Options& options) {
  std::vector<CellStats> out;
  if (options.trials_per_cell == 0) return out;
  const unsigned workers =
      options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t n : options.dims) {
    for (unsigned deg : options.degs) {
      CellStats cell;
      cell.dimension = n;
      cell.max_degree = deg;
      RandomSystemSpec spec = options.base;
      spec.dimension = n;
      spec.max_degree = deg;

      std::vector<std::pair<std::uint64_t, VectorField>> kept;
      const std::size_t max_draws = options.trials_per_cell * options.max_draw_factor;
      for (std::size_t k = 0; kept.size() < options.trials_per_cell && k < max_draws; ++k) {
        const std::uint64_t seed = trial_seed(options.seed, n, deg, k);
        VectorField f = gen_system(spec, seed);
        ++cell.drawn;
        switch (screen(f)) {
          case ScreenResult::ExcludedTrivial: ++cell.excluded_trivial; break;
          case ScreenResult::ExcludedZeroComponent: ++cell.excluded_zero; break;
          case ScreenResult::Keep: kept.emplace_back(seed, std::move(f)); break;
        }
      }

      cell.records.resize(kept.size());
      std::atomic<std::size_t> next{0};
      std::exception_ptr failure;
      std::mutex failure_mutex;
      auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < kept.size();) {
          try {
            TrialRecord r = run_trial(kept[i].second, options);
            r.index = i;
            r.seed = kept[i].first;
            cell.records[i] = std::move(r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < std::min<std::size_t>(workers, kept.size()); ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
      if (failure) std::rethrow_exception(failure);

      cell.trials = kept.size();
      double tu = 0.0, ts = 0.0;
      for (const auto& r : cell.records) {
        switch (r.classification) {
          case TrialClass::UNSTABLE_PROVEN:
            ++cell.unstable;
            tu += r.unstable_seconds;
            break;
          case TrialClass::STABLE_PROVEN:
            ++cell.stable;
            ts += r.stable_seconds;
            break;
          case TrialClass::TIMEOUT_BOTH: ++cell.timeout_both; break;
          default: ++cell.undecided; break;
        }
      }
      if (cell.trials) {
        const double t = static_cast<double>(cell.trials);
        cell.unstable_pct = 100.0 * double(cell.unstable) / t;
        cell.stable_pct = 100.0 * double(cell.stable) / t;
        cell.timeout_pct = 100.0 * double(cell.timeout_both) / t;
      }
      if (cell.unstable) cell.mean_unstable_seconds = tu / double(cell.unstable);
      if (cell.stable) cell.mean_stable_seconds = ts / double(cell.stable);
      out.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace lyra
