// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lyra/instab.hpp"
#include "lyra/symred.hpp"
#include "lyra/synth.hpp"
#include "lyra/system_file.hpp"

#ifndef LYRA_DATA_DIR
#define LYRA_DATA_DIR "data/systems"
#endif

namespace {

using namespace lyra;

constexpr int kUsage = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TemplateFlags {
  std::optional<unsigned> min_degree;
  std::optional<unsigned> max_degree;
  std::optional<std::string> parity;
  std::optional<bool> cross;

  void attach(CLI::App* app) {
    app->add_option("--min-deg", min_degree, "Lowest template degree");
    app->add_option("--deg,--max-deg", max_degree, "Highest template degree");
    app->add_option("--parity", parity, "even or all")->check(CLI::IsMember({"even", "all"}));
    app->add_flag("--cross,!--no-cross", cross, "Include cross terms");
  }

  TemplateSpec resolve(const SystemFile& sys) const {
    TemplateSpec s = sys.template_spec.value_or(TemplateSpec::default_for(sys.field.dimension(), 2));
    if (max_degree) {
      s.max_degree = *max_degree;
      if (!min_degree && s.min_degree > s.max_degree) s.min_degree = std::min(2u, *max_degree);
    }
    if (min_degree) s.min_degree = *min_degree;
    if (parity) s.parity = *parity == "all" ? Parity::All : Parity::EvenOnly;
    if (cross) s.cross_terms = *cross;
    s.validate();
    return s;
  }
};

CertificateMode parse_mode(const std::string& s) {
  if (s == "strict") return CertificateMode::Strict;
  if (s == "weak") return CertificateMode::Weak;
  if (s == "lasalle" || s == "weak+lasalle") return CertificateMode::WeakLaSalle;
  throw UsageError("unknown mode '" + s + "'");
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string seconds(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", t);
  return buf;
}

// Inclusive ranges and lists: "2..4", "2,3,6", "5".
template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      if (auto dots = item.find(".."); dots != std::string::npos) {
        const unsigned long lo = std::stoul(item.substr(0, dots)), hi = std::stoul(item.substr(dots + 2));
        if (lo > hi) throw UsageError("empty range '" + item + "'");
        for (unsigned long v = lo; v <= hi; ++v) out.push_back(static_cast<T>(v));
      } else {
        out.push_back(static_cast<T>(std::stoul(item)));
      }
    } catch (const std::logic_error&) {
      throw UsageError("malformed list item '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty selection '" + text + "'");
  return out;
}

SystemFile load(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("cannot open '" + path + "'");
  return load_system(path);
}

// ---------------------------------------------------------------------------
// reduce

struct ReduceArgs {
  std::string file;
  TemplateFlags tmpl;
  bool json = false;
};

int cmd_reduce(const ReduceArgs& a) {
  const SystemFile sys = load(a.file);
  const TemplateSpec spec = a.tmpl.resolve(sys);
  const auto t0 = std::chrono::steady_clock::now();
  const ParamPoly tmpl = build_template(spec);
  const ReductionResult r = reduce_to_fixpoint(tmpl, sys.field);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (a.json) {
    nlohmann::json j;
    j["system"] = sys.name;
    j["status"] = to_string(r.status);
    j["template"] = to_string(tmpl, sys.variables);
    j["reduced_template"] = to_string(r.reduced_template, sys.variables);
    nlohmann::json subs = nlohmann::json::object();
    for (const auto& [id, form] : r.substitutions) subs[Param{id}.name()] = form.to_string();
    j["substitutions"] = subs;
    j["pending"] = nlohmann::json::array();
    for (const auto& c : r.inequalities_pending) j["pending"].push_back(c.to_string());
    j["iterations"] = r.iterations;
    j["seconds"] = dt;
    j["diagnostic"] = r.diagnostic;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "system:    " << sys.name << "\n";
    std::cout << "template:  V = " << to_string(tmpl, sys.variables) << "\n";
    for (const auto& [id, form] : r.substitutions) std::cout << "  " << Param{id}.name() << " -> " << form.to_string() << "\n";
    for (const auto& c : r.inequalities_pending) std::cout << "  pending: " << c.to_string() << "\n";
    if (r.status == ReductionStatus::Reduced) {
      std::cout << "V = " << to_string(r.reduced_template, sys.variables) << "\n";
    } else {
      std::cout << "TEMPLATE_INFEASIBLE: " << r.diagnostic << "\n";
    }
    std::cout << "rounds: " << r.iterations << ", " << seconds(dt) << "\n";
  }
  return r.status == ReductionStatus::Reduced ? 0 : exit_code(CertificateStatus::TEMPLATE_INFEASIBLE);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string file;
  TemplateFlags tmpl;
  std::string method = "complete";
  bool sr = true;
  std::string mode = "strict";
  bool lasalle = false;
  std::size_t samples = 0;
  unsigned cegis_steps = 10;
  std::string mu = "1/100";
  std::string domain = "10";
  unsigned lasalle_r = 8;
  std::optional<unsigned> inline_lasalle;
  double timeout = 60.0;
  bool round = true;
  std::int64_t denominator = 200;
  std::uint64_t seed = 1;
  bool json = false;
  std::string config;
};

void apply_config_file(SynthArgs& a) {
  if (a.config.empty()) return;
  std::ifstream in(a.config);
  if (!in) throw UsageError("cannot open config file " + a.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + a.config + ": " + e.what());
  }
  auto rational_text = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  for (const auto& [key, v] : j.items()) {
    if (key == "method") a.method = v.get<std::string>();
    else if (key == "sr") a.sr = v.get<bool>();
    else if (key == "mode") a.mode = v.get<std::string>();
    else if (key == "samples") a.samples = v.get<std::size_t>();
    else if (key == "cegis_steps") a.cegis_steps = v.get<unsigned>();
    else if (key == "mu") a.mu = rational_text(v);
    else if (key == "domain") a.domain = rational_text(v);
    else if (key == "lasalle_r") a.lasalle_r = v.get<unsigned>();
    else if (key == "timeout") a.timeout = v.get<double>();
    else if (key == "round") a.round = v.get<bool>();
    else if (key == "denominator") a.denominator = v.get<std::int64_t>();
    else if (key == "seed") a.seed = v.get<std::uint64_t>();
    else throw UsageError("config file " + a.config + ": unknown key '" + key + "'");
  }
}

SynthesisConfig to_config(const SynthArgs& a) {
  SynthesisConfig c;
  try {
    c.method = parse_method(a.method);
    c.mu = parse_rational(a.mu);
    c.domain_halfwidth = parse_rational(a.domain);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  c.mode = a.lasalle ? CertificateMode::WeakLaSalle : parse_mode(a.mode);
  c.use_reduction = a.sr;
  c.n_samples = a.samples;
  c.cegis_steps = a.cegis_steps;
  c.lasalle_r_max = a.lasalle_r;
  c.inline_lasalle_r = a.inline_lasalle;
  c.timeout_s = a.timeout;
  c.rounding_denominator = a.round ? a.denominator : 0;
  c.seed = a.seed;
  c.solver = detect_solver();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

void print_report(const CertificateReport& r) {
  std::cout << "system:    " << r.system << "\n";
  std::cout << "method:    " << r.method << (r.use_reduction ? " (reduced)" : "") << ", mode " << r.mode << "\n";
  std::cout << "template:  " << r.template_text << "\n";
  if (r.use_reduction) std::cout << "reduced:   " << r.reduced_template << "\n";
  std::cout << "status:    " << to_string(r.status) << "\n";
  if (r.witness) std::cout << "V =        " << to_string(*r.witness, r.variables) << "\n";
  if (r.instability_point) {
    std::cout << "z =        (";
    for (std::size_t i = 0; i < r.instability_point->size(); ++i)
      std::cout << (i ? ", " : "") << to_string((*r.instability_point)[i]);
    std::cout << ")\n";
  }
  if (r.lasalle_order) std::cout << "lasalle:   order " << *r.lasalle_order << "\n";
  for (const auto& c : r.checks) std::cout << "  " << c.to_string(r.variables) << "\n";
  if (r.cegis_iterations)
    std::cout << "cegis:     " << r.cegis_iterations << " steps, " << r.counterexamples_used << " counterexamples\n";
  if (!r.diagnostic.empty()) std::cout << "note:      " << r.diagnostic << "\n";
  std::cout << "time:      " << seconds(r.timings.total) << " (reduction " << seconds(r.timings.reduction) << ", solve "
            << seconds(r.timings.solve) << ", verify " << seconds(r.timings.verify) << ")\n";
}

int cmd_synth(SynthArgs a, bool instability) {
  apply_config_file(a);
  const SystemFile sys = load(a.file);
  const TemplateSpec spec = a.tmpl.resolve(sys);
  const SynthesisConfig cfg = to_config(a);
  CertificateReport r = instability ? synth_instability(sys.field, spec, cfg) : synthesize(sys.field, spec, cfg);
  r.system = sys.name;
  r.variables = sys.variables;
  if (a.json) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    print_report(r);
  }
  return exit_code(r.status);
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string file;
  std::string candidate;
  std::string mode = "strict";
  double timeout = 60.0;
  unsigned lasalle_r = 8;
  bool json = false;
};

int cmd_verify(const VerifyArgs& a) {
  const SystemFile sys = load(a.file);
  Polynomial v;
  try {
    v = parse_polynomial(a.candidate, sys.variables);
  } catch (const ParseError& e) {
    throw UsageError("candidate: " + std::string(e.what()));
  }
  VerifierOptions vo;
  vo.solver = detect_solver();
  vo.timeout_s = a.timeout;
  vo.lasalle_r_max = a.lasalle_r;
  const Verifier verifier(vo);
  const CertificateCheck chk = verify_certificate(verifier, v, sys.field, parse_mode(a.mode));

  if (a.json) {
    nlohmann::json j;
    j["system"] = sys.name;
    j["candidate"] = to_string(v, sys.variables);
    j["mode"] = a.mode;
    j["confirmed"] = chk.confirmed;
    j["checks"] = nlohmann::json::array();
    for (const auto& o : chk.outcomes) j["checks"].push_back(to_json(o, sys.variables));
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "V = " << to_string(v, sys.variables) << "\n";
    for (const auto& o : chk.outcomes) std::cout << "  " << o.to_string(sys.variables) << "\n";
    std::cout << (chk.confirmed ? "VALID" : "NOT CONFIRMED") << "\n";
  }
  if (chk.confirmed) return 0;
  return 2;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string suite = "e1-e10";
  std::string data_dir = LYRA_DATA_DIR;
  std::string methods = "complete,lp-cegis,smt-cegis";
  bool with_baseline = true;
  double timeout = 10.0;
  unsigned workers = 0;
  std::uint64_t seed = 1;
  bool json = false;
};

std::vector<int> parse_suite(const std::string& s) {
  std::vector<int> ids;
  std::stringstream ss(s);
  std::string item;
  auto id_of = [&](const std::string& t) {
    if (t.size() < 2 || (t[0] != 'e' && t[0] != 'E')) throw UsageError("bad suite item '" + t + "'");
    try {
      return std::stoi(t.substr(1));
    } catch (const std::logic_error&) {
      throw UsageError("bad suite item '" + t + "'");
    }
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (auto dash = item.find('-'); dash != std::string::npos) {
      const int lo = id_of(item.substr(0, dash)), hi = id_of(item.substr(dash + 1));
      for (int k = lo; k <= hi; ++k) ids.push_back(k);
    } else {
      ids.push_back(id_of(item));
    }
  }
  if (ids.empty()) throw UsageError("empty suite selection");
  return ids;
}

int cmd_bench(const BenchArgs& a) {
  struct Job {
    std::size_t system;
    SynthMethod method;
    bool sr;
    CertificateReport report;
  };
  std::vector<SystemFile> systems;
  for (int id : parse_suite(a.suite)) {
    const auto path = std::filesystem::path(a.data_dir) / ("e" + std::to_string(id) + ".sys");
    if (!std::filesystem::exists(path)) throw UsageError("no system file " + path.string());
    systems.push_back(load(path.string()));
  }
  std::vector<SynthMethod> methods;
  std::stringstream ms(a.methods);
  for (std::string m; std::getline(ms, m, ',');)
    if (!m.empty()) {
      try {
        methods.push_back(parse_method(m));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  if (methods.empty()) throw UsageError("no methods selected");

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < systems.size(); ++s)
    for (SynthMethod m : methods) {
      jobs.push_back({s, m, true, {}});
      if (a.with_baseline) jobs.push_back({s, m, false, {}});
    }

  const auto solver = detect_solver();
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      Job& job = jobs[k];
      const SystemFile& sys = systems[job.system];
      SynthesisConfig cfg;
      cfg.method = job.method;
      cfg.use_reduction = job.sr;
      cfg.mode = sys.expect == std::optional<std::string>("GAS_LASALLE") ? CertificateMode::WeakLaSalle
                                                                           : CertificateMode::Strict;
      cfg.timeout_s = a.timeout;
      cfg.seed = a.seed;
      cfg.solver = solver;
      try {
        const TemplateSpec spec = sys.template_spec.value_or(TemplateSpec::default_for(sys.field.dimension(), 2));
        job.report = synthesize(sys.field, spec, cfg);
        job.report.system = sys.name;
        job.report.variables = sys.variables;
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(a.workers ? a.workers : std::thread::hardware_concurrency(), unsigned(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  if (a.json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& j : jobs) out.push_back(to_json(j.report));
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::vector<std::string> columns;
  for (SynthMethod m : methods) {
    columns.push_back(to_string(m) + "-SR");
    if (a.with_baseline) columns.push_back(to_string(m));
  }
  constexpr std::size_t kCol = 28;
  std::cout << pad("system", 8) << pad("expect", 13);
  for (const auto& c : columns) std::cout << pad(c, kCol);
  std::cout << "\n";
  std::size_t k = 0;
  for (const auto& sys : systems) {
    std::cout << pad(sys.name, 8) << pad(sys.expect.value_or("-"), 13);
    for (std::size_t c = 0; c < columns.size(); ++c, ++k) {
      const auto& r = jobs[k].report;
      std::cout << pad(to_string(r.status) + " " + seconds(r.timings.total), kCol);
    }
    std::cout << "\n";
  }
  std::cout << "\nwitnesses:\n";
  for (const auto& job : jobs) {
    if (job.report.witness)
      std::cout << "  " << pad(job.report.system, 6) << pad(job.report.method + (job.sr ? "-SR" : ""), 16)
                << to_string(*job.report.witness, job.report.variables) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// instab

struct InstabArgs {
  std::string dims = "2";
  std::string degs = "2";
  std::size_t trials = 100;
  double timeout = 1.0;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool sr = true;
  bool json = false;
  bool records = false;
};

int cmd_instab(const InstabArgs& a) {
  Table3Options o;
  o.dims = parse_list<std::size_t>(a.dims);
  o.degs = parse_list<unsigned>(a.degs);
  o.trials_per_cell = a.trials;
  o.timeout_s = a.timeout;
  o.seed = a.seed;
  o.workers = a.workers;
  o.use_reduction = a.sr;
  o.solver = detect_solver();
  if (!o.solver) std::cerr << "lyra: no SMT solver found; every trial will be undecided\n";
  const auto cells = run_table3(o);

  if (a.json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : cells) out.push_back(to_json(c, a.records));
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << pad("n", 4) << pad("deg", 5) << pad("unstable%", 11) << pad("t.o.%", 8) << pad("time(s)", 10)
            << pad("stable%", 9) << pad("time(s)", 10) << pad("systems", 9) << "drawn\n";
  for (const auto& c : cells) {
    char row[160];
    std::snprintf(row, sizeof row, "%-4zu%-5u%-11.1f%-8.1f%-10.3f%-9.1f%-10.3f%-9zu%zu\n", c.dimension, c.max_degree,
                  c.unstable_pct, c.timeout_pct, c.mean_unstable_seconds, c.stable_pct, c.mean_stable_seconds, c.trials,
                  c.drawn);
    std::cout << row;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov certificate synthesis for polynomial vector fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lyra 0.1.0");

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Symbolically reduce a Lyapunov template");
  reduce->add_option("system", ra.file, "System file")->required();
  ra.tmpl.attach(reduce);
  reduce->add_flag("--json", ra.json, "Print JSON");

  SynthArgs sa;
  bool instability = false;
  auto* synth = app.add_subcommand("synth", "Synthesize a certificate");
  synth->add_option("system", sa.file, "System file")->required();
  sa.tmpl.attach(synth);
  synth->add_option("--method", sa.method, "complete, lp-cegis or smt-cegis")->capture_default_str();
  synth->add_flag("--sr,!--no-sr", sa.sr, "Symbolic reduction")->capture_default_str();
  synth->add_option("--mode", sa.mode, "strict, weak or lasalle")->capture_default_str();
  synth->add_flag("--lasalle", sa.lasalle, "Shorthand for --mode lasalle");
  synth->add_flag("--instability", instability, "Search for an instability certificate");
  synth->add_option("--samples", sa.samples, "Initial samples (0: 3000 for LP, 300 for SMT)");
  synth->add_option("--cegis-steps", sa.cegis_steps)->capture_default_str();
  synth->add_option("--mu", sa.mu, "Margin for the LP constraints")->capture_default_str();
  synth->add_option("--domain", sa.domain, "Sampling box half-width")->capture_default_str();
  synth->add_option("--lasalle-r", sa.lasalle_r, "Highest Lie order in the LaSalle scan")->capture_default_str();
  synth->add_option("--lasalle-inline", sa.inline_lasalle, "Encode the LaSalle condition at this order");
  synth->add_option("--timeout", sa.timeout, "Seconds per solver call")->capture_default_str();
  synth->add_flag("--round,!--no-round", sa.round, "Round LP coefficients")->capture_default_str();
  synth->add_option("--denominator", sa.denominator, "Rounding denominator")->capture_default_str();
  synth->add_option("--seed", sa.seed)->capture_default_str();
  synth->add_flag("--json", sa.json, "Print the JSON report");
  synth->add_option("--config", sa.config, "JSON file whose keys override the flags");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Verify a candidate V");
  verify->add_option("system", va.file, "System file")->required();
  verify->add_option("--candidate,-V", va.candidate, "Polynomial in the system's variables")->required();
  verify->add_option("--mode", va.mode, "strict, weak or lasalle")->capture_default_str();
  verify->add_option("--timeout", va.timeout)->capture_default_str();
  verify->add_option("--lasalle-r", va.lasalle_r)->capture_default_str();
  verify->add_flag("--json", va.json);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run the E1-E10 benchmark table");
  bench->add_option("--suite", ba.suite, "e.g. e1-e10 or e1,e3,e8")->capture_default_str();
  bench->add_option("--data", ba.data_dir, "Directory holding eN.sys")->capture_default_str();
  bench->add_option("--methods", ba.methods)->capture_default_str();
  bench->add_flag("!--sr-only", ba.with_baseline, "Skip the runs without reduction");
  bench->add_option("--timeout", ba.timeout)->capture_default_str();
  bench->add_option("--workers", ba.workers, "0: one per core");
  bench->add_option("--seed", ba.seed)->capture_default_str();
  bench->add_flag("--json", ba.json);

  InstabArgs ia;
  auto* instab = app.add_subcommand("instab", "Random stability/instability experiment");
  instab->add_option("--dims", ia.dims, "e.g. 2..4 or 2,6")->capture_default_str();
  instab->add_option("--degs", ia.degs, "e.g. 2,3")->capture_default_str();
  instab->add_option("--trials", ia.trials, "Kept systems per cell")->capture_default_str();
  instab->add_option("--timeout", ia.timeout, "Seconds per solver call")->capture_default_str();
  instab->add_option("--seed", ia.seed)->capture_default_str();
  instab->add_option("--workers", ia.workers, "0: one per core");
  instab->add_flag("--sr,!--no-sr", ia.sr)->capture_default_str();
  instab->add_flag("--json", ia.json);
  instab->add_flag("--records", ia.records, "Include per-trial records in JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*reduce) return cmd_reduce(ra);
    if (*synth) return cmd_synth(sa, instability);
    if (*verify) return cmd_verify(va);
    if (*bench) return cmd_bench(ba);
    if (*instab) return cmd_instab(ia);
  } catch (const UsageError& e) {
    std::cerr << "lyra: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "lyra: " << e.what() << "\n";
    return kUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "lyra: " << e.what() << "\n";
    return kUsage;
  } catch (const SolverConfigError& e) {
    std::cerr << "lyra: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "lyra: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "lyra: " << e.what() << "\n";
    return 2;
  }
  return kUsage;
}
