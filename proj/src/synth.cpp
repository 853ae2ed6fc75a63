// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>

#include "lyra/lasalle.hpp"
#include "lyra/lie.hpp"
#include "lyra/lp.hpp"

namespace lyra {

std::string to_string(SynthMethod m) {
  switch (m) {
    case SynthMethod::Complete: return "complete";
    case SynthMethod::LpCegis: return "lp-cegis";
    case SynthMethod::SmtCegis: return "smt-cegis";
  }
  return "?";
}

SynthMethod parse_method(const std::string& s) {
  if (s == "complete") return SynthMethod::Complete;
  if (s == "lp-cegis" || s == "lp") return SynthMethod::LpCegis;
  if (s == "smt-cegis" || s == "smt-sample" || s == "smt") return SynthMethod::SmtCegis;
  throw std::invalid_argument("unknown synthesis method '" + s + "'");
}

std::string to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::GAS: return "GAS";
    case CertificateStatus::GAS_LASALLE: return "GAS_LASALLE";
    case CertificateStatus::NOT_GAS: return "NOT_GAS";
    case CertificateStatus::UNKNOWN: return "UNKNOWN";
    case CertificateStatus::TIMEOUT: return "TIMEOUT";
    case CertificateStatus::TEMPLATE_INFEASIBLE: return "TEMPLATE_INFEASIBLE";
  }
  return "?";
}

int exit_code(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::GAS:
    case CertificateStatus::GAS_LASALLE:
    case CertificateStatus::NOT_GAS: return 0;
    case CertificateStatus::UNKNOWN:
    case CertificateStatus::TIMEOUT: return 2;
    case CertificateStatus::TEMPLATE_INFEASIBLE: return 3;
  }
  return 2;
}

bool CertificateReport::certified() const {
  return status == CertificateStatus::GAS || status == CertificateStatus::GAS_LASALLE ||
         status == CertificateStatus::NOT_GAS;
}

void SynthesisConfig::validate() const {
  if (sgn(mu) <= 0) throw std::invalid_argument("mu must be positive");
  if (cegis_steps < 1) throw std::invalid_argument("cegis_steps must be at least 1");
  if (rounding_denominator < 0) throw std::invalid_argument("rounding denominator must be non-negative");
  if (sgn(domain_halfwidth) <= 0) throw std::invalid_argument("domain half-width must be positive");
  if (timeout_s <= 0) throw std::invalid_argument("timeout must be positive");
  if (lasalle_r_max < 2) throw std::invalid_argument("LaSalle r_max must be at least 2");
  if (inline_lasalle_r && *inline_lasalle_r < 2) throw std::invalid_argument("LaSalle order must be at least 2");
}

std::size_t SynthesisConfig::samples() const {
  if (n_samples) return n_samples;
  return method == SynthMethod::LpCegis ? 3000 : 300;
}

Verifier SynthesisConfig::verifier() const {
  VerifierOptions o;
  o.solver = solver;
  o.timeout_s = timeout_s;
  o.falsify.seed = seed;
  o.lasalle_r_max = lasalle_r_max;
  return Verifier(o);
}

// ---------------------------------------------------------------------------
// Samples and constraint rows

Rational LinearRow::evaluate(const Assignment& a) const {
  Rational v = constant;
  for (const auto& [id, c] : coeffs) {
    auto it = a.find(id);
    if (it == a.end()) throw MissingParameter("row references unassigned parameter " + Param{id}.name());
    v += c * it->second;
  }
  return v;
}

bool SampleSet::add(const Point& p) {
  if (p.size() != dim_) throw DimensionError("sample has wrong dimension");
  if (std::all_of(p.begin(), p.end(), [](const Rational& x) { return is_zero(x); })) return false;
  if (std::find(points_.begin(), points_.end(), p) != points_.end()) return false;
  points_.push_back(p);
  return true;
}

void SampleSet::add_uniform(std::size_t count, const Rational& halfwidth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const long grid = 1000;
  const Rational scaled = halfwidth * grid;
  mpz_class hi_z = scaled.get_num() / scaled.get_den();
  const long hi = hi_z.get_si();
  std::uniform_int_distribution<long> coord(-hi, hi);
  std::size_t added = 0;
  for (std::size_t tries = 0; added < count && tries < 20 * count + 100; ++tries) {
    Point p(dim_);
    for (auto& x : p) {
      x = Rational(coord(rng), grid);
      x.canonicalize();
    }
    if (add(p)) ++added;
  }
}

Rational norm_power(const Point& y, unsigned d) {
  Rational sq = 0;
  for (const auto& x : y) sq += x * x;
  if (d % 2 == 0) return pow(sq, d / 2);
  return pow(sqrt_upper(sq), d);
}

AffineForm evaluate(const ParamPoly& v, const Point& y) {
  if (y.size() != v.dimension()) throw DimensionError("evaluation point has wrong dimension");
  AffineForm out;
  std::vector<std::vector<Rational>> powers(y.size());
  for (const auto& [alpha, form] : v.terms()) {
    Rational m = 1;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!alpha[i]) continue;
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(Rational(1));
      while (cache.size() <= alpha[i]) cache.push_back(cache.back() * y[i]);
      m *= cache[alpha[i]];
    }
    out += form * m;
  }
  return out;
}

namespace {

LinearRow row_from(const AffineForm& form, Rel rel, std::string origin) {
  LinearRow r;
  r.coeffs = form.terms();
  r.constant = form.constant();
  r.rel = rel;
  r.origin = std::move(origin);
  return r;
}

Rational margin(const Point& y, const ParamPoly& p, const Rational& mu) {
  if (p.is_zero()) return 0;
  Rational a = norm_power(y, *p.min_degree()), b = norm_power(y, *p.max_degree());
  return mu * (a < b ? a : b);
}

}  // namespace

ConstraintSet build_sample_constraints(const ParamPoly& v, const ParamPoly& vdot, const std::vector<Point>& samples,
                                       const Rational& mu, bool strengthened, bool weak_decrease) {
  ConstraintSet cs;
  for (const auto& y : samples) {
    if (std::all_of(y.begin(), y.end(), [](const Rational& x) { return is_zero(x); })) continue;
    AffineForm vy = evaluate(v, y);
    AffineForm dy = evaluate(vdot, y);
    if (strengthened) {
      cs.rows.push_back(row_from(vy - AffineForm(margin(y, v, mu)), Rel::Ge, "V"));
      if (weak_decrease)
        cs.rows.push_back(row_from(dy, Rel::Le, "dV"));
      else
        cs.rows.push_back(row_from(dy + AffineForm(margin(y, vdot, mu)), Rel::Le, "dV"));
    } else {
      cs.rows.push_back(row_from(vy, Rel::Gt, "V"));
      cs.rows.push_back(row_from(dy, weak_decrease ? Rel::Le : Rel::Lt, "dV"));
    }
  }
  return cs;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const VerificationOutcome& o, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["check"] = o.tag();
  j["verdict"] = to_string(o.verdict);
  j["method"] = o.method;
  if (o.verdict == Validity::Invalid) {
    nlohmann::json pt = nlohmann::json::object();
    auto n = names.empty() ? default_variable_names(o.counterexample.size()) : names;
    for (std::size_t i = 0; i < o.counterexample.size(); ++i) pt[n[i]] = to_string(o.counterexample[i]);
    j["counterexample"] = pt;
  } else {
    j["counterexample"] = nullptr;
  }
  j["diagnostic"] = o.diagnostic;
  j["seconds"] = o.seconds;
  return j;
}

nlohmann::json to_json(const CertificateReport& r) {
  auto point_json = [&](const Point& p) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : p) a.push_back(to_string(x));
    return a;
  };
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["system"] = r.system;
  j["method"] = r.method;
  j["mode"] = r.mode;
  j["use_reduction"] = r.use_reduction;
  j["variables"] = r.variables;
  j["template"] = r.template_text;
  j["reduced_template"] = r.reduced_template;
  j["witness"] = r.witness ? nlohmann::json(to_string(*r.witness, r.variables)) : nlohmann::json(nullptr);
  j["instability_witness_point"] = r.instability_point ? point_json(*r.instability_point) : nlohmann::json(nullptr);
  j["timings"] = {{"reduction", r.timings.reduction},
                  {"solve", r.timings.solve},
                  {"verify", r.timings.verify},
                  {"total", r.timings.total}};
  j["cegis_iterations"] = r.cegis_iterations;
  j["counterexamples_used"] = r.counterexamples_used;
  j["lasalle_order"] = r.lasalle_order ? nlohmann::json(*r.lasalle_order) : nlohmann::json(nullptr);
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c, r.variables));
  j["history"] = nlohmann::json::array();
  for (const auto& h : r.history) {
    nlohmann::json e;
    e["step"] = h.step;
    e["candidate"] = to_string(h.candidate, r.variables);
    e["confirmed"] = h.confirmed;
    e["counterexample"] = h.counterexample ? point_json(*h.counterexample) : nlohmann::json(nullptr);
    e["note"] = h.note;
    j["history"].push_back(e);
  }
  j["diagnostic"] = r.diagnostic;
  return j;
}

// ---------------------------------------------------------------------------
// Shared pieces

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Prepared {
  ParamPoly v;
  ParamPoly vdot;
  std::vector<ReductionConstraint> pending;
  std::vector<int> params;
  bool feasible = true;
  std::string diagnostic;
};

Prepared prepare(const VectorField& f, const TemplateSpec& spec, bool use_reduction, std::size_t term_cap,
                 CertificateReport& rep) {
  const auto t0 = Clock::now();
  if (spec.dimension != f.dimension()) throw DimensionError("template and vector field dimensions differ");
  Prepared p;
  ParamPoly tmpl = build_template(spec);
  rep.template_text = to_string(tmpl, rep.variables);
  if (use_reduction) {
    ReductionResult red = reduce_to_fixpoint(tmpl, f, term_cap);
    p.v = red.reduced_template;
    p.vdot = red.reduced_lie;
    p.pending = red.inequalities_pending;
    if (red.status != ReductionStatus::Reduced) {
      p.feasible = false;
      p.diagnostic = red.diagnostic;
    }
  } else {
    p.v = tmpl;
    p.vdot = lie_derivative(tmpl, f);
  }
  rep.reduced_template = to_string(p.v, rep.variables);
  auto ids = params_of(p.v);
  p.params.assign(ids.begin(), ids.end());
  rep.timings.reduction = since(t0);
  return p;
}

void init_report(CertificateReport& rep, const VectorField& f, const SynthesisConfig& config, const char* method) {
  rep.method = method;
  rep.mode = to_string(config.mode);
  rep.use_reduction = config.use_reduction;
  if (rep.variables.empty()) rep.variables = default_variable_names(f.dimension());
}

std::map<int, std::size_t> slots_for(const std::vector<int>& params) {
  std::map<int, std::size_t> s;
  for (std::size_t i = 0; i < params.size(); ++i) s[params[i]] = i;
  return s;
}

Polynomial form_poly(const AffineForm& form, const std::map<int, std::size_t>& slots, std::size_t joint) {
  Polynomial p = Polynomial::constant(joint, form.constant());
  for (const auto& [id, c] : form.terms()) p += variable(joint, slots.at(id)) * c;
  return p;
}

/// The solver's answer substituted back: matrix instances at random points
/// of the universal block must hold.
bool model_gate(const QuantifiedFormula& q, const Point& constants, std::uint64_t seed, std::string& why) {
  Point joint = constants;
  joint.resize(q.dimension(), Rational(0));
  for (const auto& a : q.assertions)
    if (!a.evaluate(joint)) {
      why = "model violates an asserted constraint";
      return false;
    }
  if (!q.body || q.universal_vars.empty()) return true;
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::uniform_int_distribution<long> coord(-640, 640);
  for (int k = 0; k < 100; ++k) {
    for (std::size_t i = constants.size(); i < joint.size(); ++i) {
      joint[i] = Rational(coord(rng), 64);
      joint[i].canonicalize();
    }
    if (!q.body->evaluate(joint)) {
      why = "model fails the quantified condition at a sampled point";
      return false;
    }
  }
  return true;
}

Assignment assignment_from(const SolverResult& r, const std::vector<int>& params) {
  Assignment a;
  for (int id : params) {
    auto it = r.model.find(Param{id}.name());
    a[id] = it == r.model.end() ? Rational(0) : it->second;
  }
  return a;
}

/// Maps a verification result onto a report status.
void conclude(CertificateReport& rep, const Verifier& verifier, const Polynomial& cand, const VectorField& f,
              CertificateMode mode, const CertificateCheck& chk) {
  rep.checks = chk.outcomes;
  if (chk.confirmed) {
    switch (mode) {
      case CertificateMode::Strict:
        rep.status = CertificateStatus::GAS;
        rep.witness = cand;
        return;
      case CertificateMode::WeakLaSalle:
        rep.status = CertificateStatus::GAS_LASALLE;
        rep.lasalle_order = chk.lasalle_order;
        rep.witness = cand;
        return;
      case CertificateMode::Weak: {
        VerificationOutcome nd = verifier.check_sign(lie_derivative(cand, f), Strictness::NegativeDefinite);
        rep.checks.push_back(nd);
        if (nd.valid()) {
          rep.status = CertificateStatus::GAS;
          rep.witness = cand;
        } else {
          rep.status = CertificateStatus::UNKNOWN;
          rep.diagnostic = "weak Lyapunov function " + to_string(cand, rep.variables) +
                           " verified; global attraction needs the LaSalle mode";
        }
        return;
      }
    }
  }
  rep.status = chk.timed_out ? CertificateStatus::TIMEOUT : CertificateStatus::UNKNOWN;
  if (rep.diagnostic.empty()) rep.diagnostic = "candidate " + to_string(cand, rep.variables) + " not verified";
}

bool lasalle_only_failure(const CertificateCheck& chk) {
  return !chk.outcomes.empty() && chk.outcomes.back().check == CheckTag::LaSalle && !chk.outcomes.back().valid();
}

}  // namespace

// ---------------------------------------------------------------------------
// Complete synthesis

CertificateReport synth_complete(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  CertificateReport rep;
  init_report(rep, f, config, "complete");
  auto finish = [&]() -> CertificateReport& {
    rep.timings.total = since(t0);
    return rep;
  };

  Prepared prep = prepare(f, spec, config.use_reduction, config.term_cap, rep);
  if (!prep.feasible) {
    rep.status = CertificateStatus::TEMPLATE_INFEASIBLE;
    rep.diagnostic = prep.diagnostic;
    return finish();
  }
  if (!config.solver) {
    rep.status = CertificateStatus::UNKNOWN;
    rep.diagnostic = "complete synthesis needs an SMT backend";
    return finish();
  }

  const std::size_t n = f.dimension(), p = prep.params.size(), joint = p + n;
  const auto slots = slots_for(prep.params);
  QuantifiedFormula q;
  for (int id : prep.params) q.free_constants.push_back(Param{id}.name());
  q.universal_vars = default_variable_names(n);
  const Polynomial v = embed(prep.v, slots, p, joint);
  const Polynomial vdot = embed(prep.vdot, slots, p, joint);
  const Polynomial norm = embed(squared_norm(n), p, joint);
  if (config.mode == CertificateMode::Strict) {
    q.body = Formula::implies(Formula::atom(norm, Rel::Gt),
                              Formula::conj({Formula::atom(v, Rel::Gt), Formula::atom(vdot, Rel::Lt)}));
  } else {
    std::vector<Formula> parts = {Formula::implies(Formula::atom(norm, Rel::Gt), Formula::atom(v, Rel::Gt)),
                                  Formula::atom(vdot, Rel::Le)};
    if (config.mode == CertificateMode::WeakLaSalle && config.inline_lasalle_r)
      parts.push_back(build_lasalle_parametric(prep.v, f, *config.inline_lasalle_r, LaSalleVariant::SingleOrder,
                                               slots, p, joint, config.term_cap));
    q.body = Formula::conj(std::move(parts));
  }
  for (const auto& c : prep.pending) q.assertions.push_back(Formula::atom(form_poly(c.form, slots, joint), Rel::Le));

  const auto ts = Clock::now();
  SolverResult sr;
  try {
    sr = run_solver(emit(q), *config.solver, config.timeout_s);
  } catch (const std::exception& e) {
    rep.status = CertificateStatus::UNKNOWN;
    rep.diagnostic = e.what();
    return finish();
  }
  rep.timings.solve = since(ts);
  switch (sr.verdict) {
    case Verdict::Unsat:
      rep.status = CertificateStatus::TEMPLATE_INFEASIBLE;
      rep.diagnostic = "no instance of the template satisfies the " + rep.mode + " conditions";
      return finish();
    case Verdict::Timeout:
      rep.status = CertificateStatus::TIMEOUT;
      rep.diagnostic = sr.diagnostic;
      return finish();
    case Verdict::Unknown:
      rep.status = CertificateStatus::UNKNOWN;
      rep.diagnostic = sr.diagnostic.empty() ? "solver returned unknown" : sr.diagnostic;
      return finish();
    case Verdict::Sat: break;
  }

  Assignment a = assignment_from(sr, prep.params);
  Point constants;
  for (int id : prep.params) constants.push_back(a[id]);
  std::string why;
  if (!model_gate(q, constants, config.seed, why)) {
    rep.status = CertificateStatus::UNKNOWN;
    rep.diagnostic = why;
    return finish();
  }
  const Polynomial cand = substitute(prep.v, a);
  const auto tv = Clock::now();
  const Verifier verifier = config.verifier();
  CertificateCheck chk = verify_certificate(verifier, cand, f, config.mode);
  rep.history.push_back({1, cand, a, chk.confirmed, chk.outcomes, chk.counterexample, "solver model"});
  conclude(rep, verifier, cand, f, config.mode, chk);
  rep.timings.verify = since(tv);

  if (!rep.certified() && config.mode == CertificateMode::WeakLaSalle && !config.inline_lasalle_r &&
      config.lasalle_inline_fallback && lasalle_only_failure(chk)) {
    for (unsigned r = 2; r <= config.lasalle_r_max; ++r) {
      SynthesisConfig inner = config;
      inner.inline_lasalle_r = r;
      CertificateReport sub = synth_complete(f, spec, inner);
      rep.timings.solve += sub.timings.solve;
      rep.timings.verify += sub.timings.verify;
      for (auto& h : sub.history) {
        h.note = "inlined LaSalle order " + std::to_string(r);
        rep.history.push_back(std::move(h));
      }
      if (sub.certified() || sub.status == CertificateStatus::TIMEOUT) {
        sub.history = rep.history;
        sub.timings = rep.timings;
        sub.timings.reduction = rep.timings.reduction;
        rep = std::move(sub);
        break;
      }
    }
  }
  return finish();
}

// ---------------------------------------------------------------------------
// CEGIS

namespace {

enum class RowSolve { Ok, Infeasible, Timeout, Unknown };

RowSolve solve_rows_lp(const ConstraintSet& cs, const std::vector<int>& params, double bound,
                       const std::vector<bool>& pinned, std::vector<double>& x, std::string& note) {
  std::map<int, std::size_t> col;
  for (std::size_t i = 0; i < params.size(); ++i) col[params[i]] = i;
  LpProblem lp;
  lp.num_vars = params.size();
  lp.bound = bound;
  for (const auto& r : cs.rows) {
    std::vector<double> a(params.size(), 0.0);
    double scale = 0.0;
    for (const auto& [id, c] : r.coeffs) {
      a[col.at(id)] = c.get_d();
      scale = std::max(scale, std::abs(a[col.at(id)]));
    }
    const double k = r.constant.get_d();
    if (scale == 0.0) {
      if (!holds(r.constant, r.rel)) {
        note = "constant row violated";
        return RowSolve::Infeasible;
      }
      continue;
    }
    for (auto& v : a) v /= scale;
    const bool upper = r.rel == Rel::Le || r.rel == Rel::Lt;
    if (r.origin == "dV") {
      lp.add_soft(a, -k / scale);  // a.c + k <= 0
    } else if (upper) {
      for (auto& v : a) v = -v;  // -(a.c) >= k
      lp.add_hard(a, k / scale);
    } else {
      lp.add_hard(a, -k / scale);  // a.c + k >= 0
    }
  }
  for (std::size_t i = 0; i < pinned.size(); ++i) {
    if (!pinned[i]) continue;
    std::vector<double> e(params.size(), 0.0);
    e[i] = 1.0;
    lp.add_hard(e, 0.0);
    e[i] = -1.0;
    lp.add_hard(e, 0.0);
  }
  LpResult res = solve_lp(lp);
  x = res.x;
  if (res.status == LpStatus::Optimal && res.slack <= 1e-9) {
    // Second phase: the smallest coefficients satisfying every row.
    LpProblem tight = lp;
    for (std::size_t j = 0; j < lp.soft.size(); ++j) {
      std::vector<double> neg = lp.soft[j];
      for (auto& v : neg) v = -v;
      tight.add_hard(std::move(neg), -lp.soft_rhs[j]);
    }
    tight.soft.clear();
    tight.soft_rhs.clear();
    tight.l1_weight = 1.0;
    LpResult small = solve_lp(tight);
    if (small.status == LpStatus::Optimal) x = small.x;
    return RowSolve::Ok;
  }
  if (res.status == LpStatus::Infeasible) {
    note = "LP infeasible";
    return RowSolve::Infeasible;
  }
  if (res.status == LpStatus::IterationLimit) {
    note = "LP iteration limit";
    return RowSolve::Unknown;
  }
  if (res.slack > 1e-9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "decrease rows infeasible (slack %.3g)", res.slack);
    note = buf;
    return RowSolve::Infeasible;
  }
  return RowSolve::Ok;
}

RowSolve solve_rows_smt(const ConstraintSet& cs, const std::vector<int>& params, const SynthesisConfig& config,
                        Assignment& out, std::string& note) {
  const std::size_t p = params.size();
  const auto slots = slots_for(params);
  QuantifiedFormula q;
  for (int id : params) q.free_constants.push_back(Param{id}.name());
  for (const auto& r : cs.rows) {
    AffineForm form(r.constant);
    for (const auto& [id, c] : r.coeffs) form += AffineForm::param(id, c);
    Polynomial poly = form_poly(form, slots, p);
    if (poly.is_zero() || (poly.size() == 1 && poly.terms().begin()->first.degree() == 0)) {
      if (!holds(form.constant(), r.rel)) {
        note = "constant row violated";
        return RowSolve::Infeasible;
      }
      continue;
    }
    q.assertions.push_back(Formula::atom(std::move(poly), r.rel));
  }
  SolverResult sr;
  try {
    sr = run_solver(emit(q), *config.solver, config.timeout_s);
  } catch (const std::exception& e) {
    note = e.what();
    return RowSolve::Unknown;
  }
  switch (sr.verdict) {
    case Verdict::Sat: out = assignment_from(sr, params); return RowSolve::Ok;
    case Verdict::Unsat: note = "sample constraints unsatisfiable"; return RowSolve::Infeasible;
    case Verdict::Timeout: note = "solver timeout"; return RowSolve::Timeout;
    case Verdict::Unknown: note = sr.diagnostic; return RowSolve::Unknown;
  }
  return RowSolve::Unknown;
}

Assignment rationalize(const std::vector<double>& x, const std::vector<int>& params, std::int64_t denominator) {
  Assignment a;
  for (std::size_t i = 0; i < params.size(); ++i)
    a[params[i]] = denominator > 0 ? round_to_denominator(x[i], denominator) : from_double(x[i]);
  return a;
}

/// Scales an exact solver assignment to max |c| = 1 and rounds it; the exact
/// scaled values are kept when rounding would zero every coefficient.
Assignment normalize_and_round(Assignment a, std::int64_t denominator) {
  Rational m = 0;
  for (const auto& [id, c] : a) m = std::max(m, Rational(abs(c)));
  if (sgn(m) == 0) return a;
  for (auto& [id, c] : a) c /= m;
  if (denominator <= 0) return a;
  Assignment r;
  bool nonzero = false;
  for (const auto& [id, c] : a) {
    r[id] = round_to_denominator(c.get_d(), denominator);
    nonzero = nonzero || !is_zero(r[id]);
  }
  return nonzero ? r : a;
}

/// Copies of a counterexample with coordinate subsets scaled by 2, 4 and 8.
std::vector<Point> amplify(const Point& y) {
  std::vector<Point> out;
  const std::size_t n = y.size();
  if (n > 12) return out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask)
    for (int f : {2, 4, 8}) {
      Point z = y;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) z[i] *= f;
      out.push_back(std::move(z));
    }
  return out;
}

}  // namespace

CertificateReport cegis(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config) {
  config.validate();
  const bool use_lp = config.method == SynthMethod::LpCegis;
  const auto t0 = Clock::now();
  CertificateReport rep;
  init_report(rep, f, config, use_lp ? "lp-cegis" : "smt-cegis");
  auto finish = [&]() -> CertificateReport& {
    rep.timings.total = since(t0);
    return rep;
  };

  Prepared prep = prepare(f, spec, config.use_reduction, config.term_cap, rep);
  if (!prep.feasible) {
    rep.status = CertificateStatus::TEMPLATE_INFEASIBLE;
    rep.diagnostic = prep.diagnostic;
    return finish();
  }
  if (!use_lp && !config.solver) {
    rep.status = CertificateStatus::UNKNOWN;
    rep.diagnostic = "SMT-sample CEGIS needs an SMT backend";
    return finish();
  }

  const std::size_t n = f.dimension();
  const bool weak = config.mode != CertificateMode::Strict;
  const Verifier verifier = config.verifier();
  SampleSet samples(n);
  samples.add_uniform(config.samples(), config.domain_halfwidth, config.seed);
  unsigned infeasible_steps = 0;
  bool timed_out = false;

  for (unsigned step = 1; step <= config.cegis_steps; ++step) {
    rep.cegis_iterations = step;
    const auto ts = Clock::now();
    Assignment a;
    std::string note;
    RowSolve st = RowSolve::Unknown;
    Rational mu = config.mu;
    for (int attempt = 0; attempt < (use_lp ? 2 : 1); ++attempt) {
      ConstraintSet cs = build_sample_constraints(prep.v, prep.vdot, samples.points(), mu, use_lp, weak);
      for (const auto& c : prep.pending) cs.rows.push_back(row_from(c.form, Rel::Le, "pending"));
      if (use_lp) {
        std::vector<double> x;
        std::vector<bool> pinned(prep.params.size(), false);
        st = solve_rows_lp(cs, prep.params, config.lp_bound, pinned, x, note);
        if (st == RowSolve::Ok && config.rounding_denominator > 0) {
          // Coefficients that round to zero are pinned there and the rest re-solved.
          for (std::size_t round = 0; round < x.size(); ++round) {
            bool any = false;
            for (std::size_t i = 0; i < x.size(); ++i)
              if (!pinned[i] && std::abs(x[i]) * double(config.rounding_denominator) < 0.5) pinned[i] = any = true;
            std::vector<double> x2;
            std::string note2;
            if (!any || solve_rows_lp(cs, prep.params, config.lp_bound, pinned, x2, note2) != RowSolve::Ok) break;
            x = x2;
          }
        }
        if (st == RowSolve::Ok) {
          a = rationalize(x, prep.params, config.rounding_denominator);
        }
      } else {
        st = solve_rows_smt(cs, prep.params, config, a, note);
        if (st == RowSolve::Ok) a = normalize_and_round(a, config.rounding_denominator);
      }
      if (st != RowSolve::Infeasible) break;
      mu /= 2;
    }
    rep.timings.solve += since(ts);

    if (st == RowSolve::Timeout) timed_out = true;
    if (st != RowSolve::Ok) {
      if (st == RowSolve::Infeasible) ++infeasible_steps;
      CandidateRecord rec;
      rec.step = step;
      rec.candidate = Polynomial(n);
      rec.note = note;
      rep.history.push_back(std::move(rec));
      samples = SampleSet(n);
      samples.add_uniform(config.samples(), config.domain_halfwidth, config.seed + step);
      continue;
    }

    const Polynomial cand = substitute(prep.v, a);
    CandidateRecord rec;
    rec.step = step;
    rec.candidate = cand;
    rec.params = a;
    if (cand.is_zero()) {
      rec.note = "zero candidate";
      rep.history.push_back(std::move(rec));
      samples.add_uniform(std::max<std::size_t>(10, config.samples() / 10), config.domain_halfwidth,
                          config.seed + 7919 * step);
      continue;
    }
    const auto tv = Clock::now();
    CertificateCheck chk = verify_certificate(verifier, cand, f, config.mode);
    rep.timings.verify += since(tv);
    rec.confirmed = chk.confirmed;
    rec.outcomes = chk.outcomes;
    rec.counterexample = chk.counterexample;
    rep.history.push_back(rec);
    if (chk.timed_out) timed_out = true;

    if (chk.confirmed) {
      CertificateReport trial = rep;
      conclude(trial, verifier, cand, f, config.mode, chk);
      if (trial.certified()) {
        rep = std::move(trial);
        return finish();
      }
    }
    bool progressed = false;
    if (chk.counterexample) {
      if (samples.add(*chk.counterexample)) {
        ++rep.counterexamples_used;
        progressed = true;
      }
      for (const auto& y : amplify(*chk.counterexample)) progressed = samples.add(y) || progressed;
    }
    if (!progressed) {
      samples.add_uniform(std::max<std::size_t>(10, config.samples() / 10), config.domain_halfwidth,
                          config.seed + 7919 * step);
    }
  }

  if (infeasible_steps == config.cegis_steps) {
    rep.status = CertificateStatus::TEMPLATE_INFEASIBLE;
    rep.diagnostic = "sample constraints infeasible at every step";
  } else {
    rep.status = timed_out ? CertificateStatus::TIMEOUT : CertificateStatus::UNKNOWN;
    rep.diagnostic = "no verified candidate after " + std::to_string(config.cegis_steps) + " CEGIS steps";
  }
  if (!rep.history.empty()) rep.checks = rep.history.back().outcomes;
  return finish();
}

CertificateReport synthesize(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config) {
  return config.method == SynthMethod::Complete ? synth_complete(f, spec, config) : cegis(f, spec, config);
}

// ---------------------------------------------------------------------------
// Instability

CertificateReport synth_instability(const VectorField& f, const TemplateSpec& spec, const SynthesisConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  CertificateReport rep;
  init_report(rep, f, config, "instability");
  rep.mode = "instability";
  auto finish = [&]() -> CertificateReport& {
    rep.timings.total = since(t0);
    return rep;
  };

  Prepared prep = prepare(f, spec, config.use_reduction, config.term_cap, rep);
  if (!prep.feasible) {
    rep.status = CertificateStatus::TEMPLATE_INFEASIBLE;
    rep.diagnostic = prep.diagnostic;
    return finish();
  }
  if (!config.solver) {
    rep.status = CertificateStatus::UNKNOWN;
    rep.diagnostic = "instability synthesis needs an SMT backend";
    return finish();
  }

  const std::size_t n = f.dimension(), p = prep.params.size(), joint = p + 2 * n;
  const auto slots = slots_for(prep.params);
  QuantifiedFormula q;
  for (int id : prep.params) q.free_constants.push_back(Param{id}.name());
  for (std::size_t i = 0; i < n; ++i) q.free_constants.push_back("z" + std::to_string(i + 1));
  q.universal_vars = default_variable_names(n);
  q.assertions.push_back(Formula::atom(embed(prep.v, slots, p, joint), Rel::Lt));
  q.body = Formula::implies(Formula::atom(embed(prep.v, slots, p + n, joint), Rel::Le),
                            Formula::atom(embed(prep.vdot, slots, p + n, joint), Rel::Le));

  const auto ts = Clock::now();
  SolverResult sr;
  try {
    sr = run_solver(emit(q), *config.solver, config.timeout_s);
  } catch (const std::exception& e) {
    rep.status = CertificateStatus::UNKNOWN;
    rep.diagnostic = e.what();
    return finish();
  }
  rep.timings.solve = since(ts);
  switch (sr.verdict) {
    case Verdict::Unsat:
      rep.status = CertificateStatus::TEMPLATE_INFEASIBLE;
      rep.diagnostic = "no instability certificate of this template shape";
      return finish();
    case Verdict::Timeout:
      rep.status = CertificateStatus::TIMEOUT;
      rep.diagnostic = sr.diagnostic;
      return finish();
    case Verdict::Unknown:
      rep.status = CertificateStatus::UNKNOWN;
      rep.diagnostic = sr.diagnostic.empty() ? "solver returned unknown" : sr.diagnostic;
      return finish();
    case Verdict::Sat: break;
  }

  Assignment a = assignment_from(sr, prep.params);
  Point constants, z;
  for (int id : prep.params) constants.push_back(a[id]);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = sr.model.find("z" + std::to_string(i + 1));
    z.push_back(it == sr.model.end() ? Rational(0) : it->second);
  }
  constants.insert(constants.end(), z.begin(), z.end());
  std::string why;
  if (!model_gate(q, constants, config.seed, why)) {
    rep.status = CertificateStatus::UNKNOWN;
    rep.diagnostic = why;
    return finish();
  }
  const Polynomial cand = substitute(prep.v, a);
  const auto tv = Clock::now();
  VerifierOptions vo = config.verifier().options();
  vo.falsify.budget = 10000;
  const Verifier verifier(vo);
  VerificationOutcome out = verifier.check_instability(cand, f, z);
  rep.timings.verify = since(tv);
  rep.checks.push_back(out);
  rep.history.push_back({1, cand, a, out.valid(), {out}, std::nullopt, "solver model"});
  if (out.valid()) {
    rep.status = CertificateStatus::NOT_GAS;
    rep.witness = cand;
    rep.instability_point = z;
  } else {
    rep.status = out.verdict == Validity::Timeout ? CertificateStatus::TIMEOUT : CertificateStatus::UNKNOWN;
    rep.diagnostic = "instability candidate not verified";
  }
  return finish();
}

}  // namespace lyra
