// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "lyra/lasalle.hpp"
#include "lyra/lie.hpp"

namespace lyra {

std::string to_string(Validity v) {
  switch (v) {
    case Validity::Valid: return "VALID";
    case Validity::Invalid: return "INVALID";
    case Validity::Unknown: return "UNKNOWN";
    case Validity::Timeout: return "TIMEOUT";
  }
  return "?";
}

std::string to_string(CertificateMode m) {
  switch (m) {
    case CertificateMode::Strict: return "strict";
    case CertificateMode::Weak: return "weak";
    case CertificateMode::WeakLaSalle: return "weak+lasalle";
  }
  return "?";
}

std::string VerificationOutcome::tag() const {
  switch (check) {
    case CheckTag::PD: return "PD";
    case CheckTag::RU: return "RU";
    case CheckTag::NSD: return "NSD";
    case CheckTag::ND: return "ND";
    case CheckTag::LaSalle: return "LASALLE(" + std::to_string(order) + ")";
    case CheckTag::Instab: return "INSTAB";
  }
  return "?";
}

std::string VerificationOutcome::to_string(const std::vector<std::string>& names) const {
  std::string s = tag() + ": " + lyra::to_string(verdict);
  if (verdict == Validity::Invalid) {
    auto n = names.empty() ? default_variable_names(counterexample.size()) : names;
    s += " at (";
    for (std::size_t i = 0; i < counterexample.size(); ++i)
      s += (i ? ", " : "") + n[i] + "=" + lyra::to_string(counterexample[i]);
    s += ")";
  }
  s += " [" + method + "]";
  if (!diagnostic.empty()) s += " " + diagnostic;
  return s;
}

// ---------------------------------------------------------------------------
// Numeric falsification

namespace {

/// Deterministic stream of nonzero rational probe points.
class ProbeStream {
 public:
  ProbeStream(std::size_t n, const FalsifyOptions& opts) : n_(n), opts_(opts), rng_(opts.seed) {
    build_directions();
    for (int j : {0, 1, 2, 3, 5, 8, 12, -1, -3, -6, -12})
      if (std::abs(j) <= opts.ray_exponent) scales_.push_back(j);
    if (opts.ray_exponent > 12) {
      scales_.push_back(opts.ray_exponent);
      scales_.push_back(-opts.ray_exponent);
    }
  }

  Point next() {
    const std::size_t structured = directions_.size() * scales_.size() * 2;
    std::size_t k = count_++;
    if (k < structured && k < opts_.budget / 2) {
      const auto& d = directions_[(k / 2) % directions_.size()];
      int j = scales_[(k / 2) / directions_.size()];
      return scaled(d, j, k % 2 ? -1 : 1);
    }
    if (k % 2 == 0) {
      std::uniform_int_distribution<long> coord(-static_cast<long>(opts_.halfwidth * 64),
                                                static_cast<long>(opts_.halfwidth * 64));
      for (;;) {
        Point p(n_);
        bool nonzero = false;
        for (auto& x : p) {
          long v = coord(rng_);
          nonzero = nonzero || v != 0;
          x = Rational(v, 64);
          x.canonicalize();
        }
        if (nonzero) return p;
      }
    }
    std::uniform_int_distribution<long> dir(-16, 16);
    std::uniform_int_distribution<int> exp(-opts_.ray_exponent, opts_.ray_exponent);
    for (;;) {
      std::vector<long> d(n_);
      bool nonzero = false;
      for (auto& x : d) {
        x = dir(rng_);
        nonzero = nonzero || x != 0;
      }
      if (nonzero) return scaled(d, exp(rng_), 1);
    }
  }

 private:
  void build_directions() {
    if (n_ <= 4) {
      std::vector<long> d(n_, -1);
      for (;;) {
        bool nonzero = false;
        for (long x : d) nonzero = nonzero || x != 0;
        if (nonzero) directions_.push_back(d);
        std::size_t i = 0;
        while (i < n_ && d[i] == 1) d[i++] = -1;
        if (i == n_) break;
        ++d[i];
      }
      return;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (long si : {1L, -1L}) {
        std::vector<long> d(n_, 0);
        d[i] = si;
        directions_.push_back(d);
        for (std::size_t j = i + 1; j < n_; ++j)
          for (long sj : {1L, -1L}) {
            auto e = d;
            e[j] = sj;
            directions_.push_back(e);
          }
      }
    }
  }

  Point scaled(const std::vector<long>& d, int j, int sign) const {
    mpz_class p2;
    mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(std::abs(j)));
    Rational lambda = j >= 0 ? Rational(p2) : Rational(mpz_class(1), p2);
    Point p(n_);
    for (std::size_t i = 0; i < n_; ++i) p[i] = lambda * Rational(d[i] * sign);
    return p;
  }

  std::size_t n_;
  FalsifyOptions opts_;
  std::mt19937_64 rng_;
  std::vector<std::vector<long>> directions_;
  std::vector<int> scales_;
  std::size_t count_ = 0;
};

struct DoubleTerm {
  std::vector<unsigned> exps;
  double coeff;
};

std::vector<DoubleTerm> to_double_terms(const Polynomial& p) {
  std::vector<DoubleTerm> out;
  for (const auto& [alpha, c] : p.terms())
    out.push_back({std::vector<unsigned>(alpha.exponents().begin(), alpha.exponents().end()), c.get_d()});
  return out;
}

bool plausible(const std::vector<DoubleTerm>& terms, const std::vector<double>& x, Rel goal) {
  double value = 0, magnitude = 0;
  for (const auto& t : terms) {
    double m = t.coeff;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (t.exps[i]) m *= std::pow(x[i], static_cast<int>(t.exps[i]));
    value += m;
    magnitude += std::abs(m);
  }
  if (!std::isfinite(value)) return true;
  const double slack = 1e-9 * magnitude;
  switch (goal) {
    case Rel::Lt:
    case Rel::Le: return value <= slack;
    case Rel::Gt:
    case Rel::Ge: return value >= -slack;
    case Rel::Eq: return std::abs(value) <= slack;
    case Rel::Ne: return true;
  }
  return true;
}

}  // namespace

std::optional<Point> falsify_numeric(const Polynomial& p, Rel goal, const FalsifyOptions& opts) {
  const std::size_t n = p.dimension();
  if (n == 0) return std::nullopt;
  const auto terms = to_double_terms(p);
  ProbeStream probes(n, opts);
  std::vector<double> xd(n);
  for (std::size_t k = 0; k < opts.budget; ++k) {
    Point x = probes.next();
    for (std::size_t i = 0; i < n; ++i) xd[i] = x[i].get_d();
    if (!plausible(terms, xd, goal)) continue;
    if (holds(evaluate(p, x), goal)) return x;
  }
  return std::nullopt;
}

std::optional<Point> falsify_formula(const Formula& phi, std::size_t n, const FalsifyOptions& opts) {
  if (n == 0) return std::nullopt;
  ProbeStream probes(n, opts);
  for (std::size_t k = 0; k < opts.budget; ++k) {
    Point x = probes.next();
    if (!phi.evaluate(x)) return x;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sufficient provers

bool syntactic_definite(const Polynomial& p, int sign, bool strict) {
  std::vector<bool> pure(p.dimension(), false);
  for (const auto& [alpha, c] : p.terms()) {
    if (sgn(c) != sign) return false;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      if (alpha[i] % 2 != 0) return false;
    if (alpha.degree() == 0) return false;
    if (auto v = alpha.pure_variable()) pure[*v] = true;
  }
  if (!strict) return true;
  for (bool b : pure)
    if (!b) return false;
  return true;
}

std::optional<bool> quadratic_form_definite(const Polynomial& p, int sign, bool strict) {
  const std::size_t n = p.dimension();
  for (const auto& [alpha, c] : p.terms())
    if (alpha.degree() != 2) return std::nullopt;
  std::vector<std::vector<Rational>> q(n, std::vector<Rational>(n, Rational(0)));
  for (const auto& [alpha, c] : p.terms()) {
    Rational s = c * sign;
    if (auto v = alpha.pure_variable()) {
      q[*v][*v] = s;
    } else {
      std::size_t i = n, j = n;
      for (std::size_t k = 0; k < n; ++k)
        if (alpha[k]) (i == n ? i : j) = k;
      q[i][j] = s / 2;
      q[j][i] = s / 2;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Rational pivot = q[k][k];
    if (sgn(pivot) < 0) return false;
    if (sgn(pivot) == 0) {
      if (strict) return false;
      for (std::size_t j = k + 1; j < n; ++j)
        if (!is_zero(q[k][j])) return false;
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (is_zero(q[i][k])) continue;
      Rational factor = q[i][k] / pivot;
      for (std::size_t j = k; j < n; ++j) q[i][j] -= factor * q[k][j];
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Verifier

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

VerificationOutcome make(CheckTag tag, Validity v, std::string method, std::string diagnostic = {}) {
  VerificationOutcome o;
  o.check = tag;
  o.verdict = v;
  o.method = std::move(method);
  o.diagnostic = std::move(diagnostic);
  return o;
}

VerificationOutcome invalid_at(CheckTag tag, Point x, std::string method) {
  auto o = make(tag, Validity::Invalid, std::move(method));
  o.counterexample = std::move(x);
  return o;
}

Point model_point(const SolverResult& r, const std::vector<std::string>& names) {
  Point x;
  for (const auto& name : names) {
    auto it = r.model.find(name);
    x.push_back(it == r.model.end() ? Rational(0) : it->second);
  }
  return x;
}

}  // namespace

VerificationOutcome Verifier::smt_valid(const Formula& phi, std::size_t n, VerificationOutcome out) const {
  QuantifiedFormula q;
  q.free_constants = default_variable_names(n);
  q.assertions.push_back(Formula::negate(phi));
  const std::string text = emit(q);
  out.method = "smt";
  try {
    SolverResult r = run_solver(text, *opts_.solver, opts_.timeout_s);
    switch (r.verdict) {
      case Verdict::Unsat:
        out.verdict = Validity::Valid;
        return out;
      case Verdict::Timeout:
        out.verdict = Validity::Timeout;
        out.diagnostic = r.diagnostic;
        return out;
      case Verdict::Sat:
        break;
      case Verdict::Unknown:
        if (!r.irrational_model) {
          out.verdict = Validity::Unknown;
          out.diagnostic = r.diagnostic.empty() ? "solver returned unknown" : r.diagnostic;
          return out;
        }
        break;
    }
    Point x = model_point(r, q.free_constants);
    if (r.irrational_model) {
      // Algebraic model: ask again for decimal approximations and confirm one.
      const std::string approx = "(set-option :pp.decimal true)\n(set-option :pp.decimal_precision 30)\n" + text;
      SolverResult a = run_solver(approx, *opts_.solver, opts_.timeout_s);
      a = parse_solver_output(a.transcript, true);
      x = model_point(a, q.free_constants);
    }
    bool nonzero = false;
    for (const auto& xi : x) nonzero = nonzero || !is_zero(xi);
    if (nonzero && !phi.evaluate(x)) {
      out.verdict = Validity::Invalid;
      out.counterexample = std::move(x);
      return out;
    }
    out.verdict = Validity::Unknown;
    out.diagnostic = "solver counterexample could not be confirmed exactly";
    return out;
  } catch (const std::exception& e) {
    out.verdict = Validity::Unknown;
    out.diagnostic = e.what();
    return out;
  }
}

VerificationOutcome Verifier::check_valid(const Formula& phi, std::size_t n, CheckTag tag, unsigned order) const {
  const auto t0 = Clock::now();
  VerificationOutcome out;
  if (auto x = falsify_formula(phi, n, opts_.falsify)) {
    out = invalid_at(tag, std::move(*x), "numeric");
  } else if (has_solver()) {
    out.check = tag;
    out = smt_valid(phi, n, out);
  } else {
    out = make(tag, Validity::Unknown, "numeric", "no SMT backend; no counterexample found");
  }
  out.check = tag;
  out.order = order;
  out.seconds = since(t0);
  return out;
}

VerificationOutcome Verifier::check_pd(const Polynomial& v) const {
  const auto t0 = Clock::now();
  const std::size_t n = v.dimension();
  VerificationOutcome out;
  if (syntactic_definite(v, 1, true)) {
    out = make(CheckTag::PD, Validity::Valid, "syntactic");
  } else if (quadratic_form_definite(v, 1, true) == std::optional<bool>(true)) {
    out = make(CheckTag::PD, Validity::Valid, "quadratic-form");
  } else if (auto x = falsify_numeric(v, Rel::Le, opts_.falsify)) {
    out = invalid_at(CheckTag::PD, std::move(*x), "numeric");
  } else if (has_solver()) {
    Formula phi = Formula::implies(Formula::atom(squared_norm(n), Rel::Gt), Formula::atom(v, Rel::Gt));
    out.check = CheckTag::PD;
    out = smt_valid(phi, n, out);
  } else {
    out = make(CheckTag::PD, Validity::Unknown, "numeric", "no SMT backend; no counterexample found");
  }
  out.check = CheckTag::PD;
  out.seconds = since(t0);
  return out;
}

VerificationOutcome Verifier::check_ru(const Polynomial& v) const {
  const auto t0 = Clock::now();
  bool pure_only = !v.is_zero();
  for (const auto& [alpha, c] : v.terms()) pure_only = pure_only && alpha.pure_variable().has_value();
  VerificationOutcome out;
  if (pure_only && syntactic_definite(v, 1, true)) {
    out = make(CheckTag::RU, Validity::Valid, "syntactic", "pure even powers with positive coefficients");
  } else {
    VerificationOutcome top = check_pd(v.highest_layer());
    if (top.valid()) {
      out = make(CheckTag::RU, Validity::Valid, top.method, "highest layer is positive definite");
    } else {
      out = make(CheckTag::RU, top.verdict == Validity::Timeout ? Validity::Timeout : Validity::Unknown, top.method,
                 "highest layer not shown positive definite");
    }
  }
  out.seconds = since(t0);
  return out;
}

VerificationOutcome Verifier::check_sign(const Polynomial& p, Strictness s) const {
  const auto t0 = Clock::now();
  const bool strict = s == Strictness::NegativeDefinite;
  const CheckTag tag = strict ? CheckTag::ND : CheckTag::NSD;
  const std::size_t n = p.dimension();
  VerificationOutcome out;
  if (syntactic_definite(p, -1, strict)) {
    out = make(tag, Validity::Valid, "syntactic");
  } else if (quadratic_form_definite(p, -1, strict) == std::optional<bool>(true)) {
    out = make(tag, Validity::Valid, "quadratic-form");
  } else if (auto x = falsify_numeric(p, strict ? Rel::Ge : Rel::Gt, opts_.falsify)) {
    out = invalid_at(tag, std::move(*x), "numeric");
  } else if (has_solver()) {
    Formula phi = strict ? Formula::implies(Formula::atom(squared_norm(n), Rel::Gt), Formula::atom(p, Rel::Lt))
                         : Formula::atom(p, Rel::Le);
    out.check = tag;
    out = smt_valid(phi, n, out);
  } else {
    out = make(tag, Validity::Unknown, "numeric", "no SMT backend; no counterexample found");
  }
  out.check = tag;
  out.seconds = since(t0);
  return out;
}

VerificationOutcome Verifier::check_lasalle(const Polynomial& v, const VectorField& f, unsigned r_max) const {
  const auto t0 = Clock::now();
  LaSalleScan scan = lasalle_scan(*this, v, f, r_max);
  VerificationOutcome out;
  if (scan.verified) {
    out = scan.attempts.back();
    out.diagnostic = to_string(scan.variant) + " encoding";
  } else {
    out = make(CheckTag::LaSalle, scan.timed_out ? Validity::Timeout : Validity::Unknown,
               scan.attempts.empty() ? "none" : scan.attempts.back().method,
               "no order up to " + std::to_string(r_max) + " verified");
    out.order = r_max;
  }
  out.check = CheckTag::LaSalle;
  out.seconds = since(t0);
  return out;
}

VerificationOutcome Verifier::check_instability(const Polynomial& v, const VectorField& f, const Point& z) const {
  const auto t0 = Clock::now();
  if (z.size() != v.dimension()) throw DimensionError("instability witness point has wrong dimension");
  const Point origin(v.dimension(), Rational(0));
  VerificationOutcome out;
  if (evaluate(v, z) >= evaluate(v, origin)) {
    out = invalid_at(CheckTag::Instab, z, "exact");
    out.diagnostic = "V(z) >= V(0)";
  } else if (!opts_.solver &&
             (out = check_sign(lie_derivative(v, f), Strictness::NegativeSemidefinite)).valid()) {
    out.check = CheckTag::Instab;
  } else {
    Formula phi = Formula::implies(Formula::atom(v, Rel::Le), Formula::atom(lie_derivative(v, f), Rel::Le));
    out = check_valid(phi, v.dimension(), CheckTag::Instab);
  }
  out.seconds = since(t0);
  return out;
}

CertificateCheck verify_certificate(const Verifier& verifier, const Polynomial& v, const VectorField& f,
                                    CertificateMode mode) {
  CertificateCheck res;
  auto record = [&](VerificationOutcome o) {
    if (o.verdict == Validity::Timeout) res.timed_out = true;
    if (o.verdict == Validity::Invalid && !res.counterexample) res.counterexample = o.counterexample;
    const bool ok = o.valid();
    res.outcomes.push_back(std::move(o));
    return ok;
  };
  if (!record(verifier.check_pd(v))) return res;
  if (!record(verifier.check_ru(v))) return res;
  const Polynomial vdot = lie_derivative(v, f);
  switch (mode) {
    case CertificateMode::Strict:
      res.confirmed = record(verifier.check_sign(vdot, Strictness::NegativeDefinite));
      return res;
    case CertificateMode::Weak:
      res.confirmed = record(verifier.check_sign(vdot, Strictness::NegativeSemidefinite));
      return res;
    case CertificateMode::WeakLaSalle: {
      if (!record(verifier.check_sign(vdot, Strictness::NegativeSemidefinite))) return res;
      VerificationOutcome l = verifier.check_lasalle(v, f, verifier.options().lasalle_r_max);
      const unsigned order = l.order;
      if (record(std::move(l))) {
        res.confirmed = true;
        res.via_lasalle = true;
        res.lasalle_order = order;
      }
      return res;
    }
  }
  return res;
}

}  // namespace lyra
