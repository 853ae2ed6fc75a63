// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>

namespace lyra {

// ---------------------------------------------------------------------------
// Formula

bool holds(const Rational& v, Rel rel) {
  const int s = sgn(v);
  switch (rel) {
    case Rel::Lt: return s < 0;
    case Rel::Le: return s <= 0;
    case Rel::Gt: return s > 0;
    case Rel::Ge: return s >= 0;
    case Rel::Eq: return s == 0;
    case Rel::Ne: return s != 0;
  }
  return false;
}

Formula Formula::atom(Polynomial p, Rel rel) {
  Formula f(Kind::Atom);
  f.poly_ = std::move(p);
  f.rel_ = rel;
  return f;
}

Formula Formula::conj(std::vector<Formula> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  Formula f(Kind::And);
  f.kids_ = std::move(parts);
  return f;
}

Formula Formula::disj(std::vector<Formula> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  Formula f(Kind::Or);
  f.kids_ = std::move(parts);
  return f;
}

Formula Formula::negate(Formula inner) {
  Formula f(Kind::Not);
  f.kids_.push_back(std::move(inner));
  return f;
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  Formula f(Kind::Implies);
  f.kids_.push_back(std::move(lhs));
  f.kids_.push_back(std::move(rhs));
  return f;
}

bool Formula::evaluate(std::span<const Rational> point) const {
  switch (kind_) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: return holds(lyra::evaluate(poly_, point), rel_);
    case Kind::And:
      for (const auto& k : kids_)
        if (!k.evaluate(point)) return false;
      return true;
    case Kind::Or:
      for (const auto& k : kids_)
        if (k.evaluate(point)) return true;
      return false;
    case Kind::Not: return !kids_[0].evaluate(point);
    case Kind::Implies: return !kids_[0].evaluate(point) || kids_[1].evaluate(point);
  }
  return false;
}

void Formula::collect_atoms(std::vector<std::pair<Polynomial, Rel>>& out) const {
  if (kind_ == Kind::Atom) out.emplace_back(poly_, rel_);
  for (const auto& k : kids_) k.collect_atoms(out);
}

std::vector<std::string> QuantifiedFormula::joint_names() const {
  std::vector<std::string> names = free_constants;
  names.insert(names.end(), universal_vars.begin(), universal_vars.end());
  return names;
}

Polynomial embed(const ParamPoly& v, const std::map<int, std::size_t>& param_slot, std::size_t state_offset,
                 std::size_t joint_dimension) {
  if (state_offset + v.dimension() > joint_dimension) throw DimensionError("state block does not fit joint space");
  Polynomial out(joint_dimension);
  for (const auto& [alpha, form] : v.terms()) {
    MultiIndex base(joint_dimension);
    for (std::size_t i = 0; i < alpha.size(); ++i) base[state_offset + i] = alpha[i];
    if (!is_zero(form.constant())) out.add_term(base, form.constant());
    for (const auto& [id, c] : form.terms()) {
      auto it = param_slot.find(id);
      if (it == param_slot.end()) throw MissingParameter("parameter " + Param{id}.name() + " has no SMT slot");
      MultiIndex m = base;
      m[it->second] += 1;
      out.add_term(m, c);
    }
  }
  return out;
}

Polynomial embed(const Polynomial& p, std::size_t state_offset, std::size_t joint_dimension) {
  if (state_offset + p.dimension() > joint_dimension) throw DimensionError("state block does not fit joint space");
  Polynomial out(joint_dimension);
  for (const auto& [alpha, c] : p.terms()) {
    MultiIndex m(joint_dimension);
    for (std::size_t i = 0; i < alpha.size(); ++i) m[state_offset + i] = alpha[i];
    out.add_term(m, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission

namespace {

std::string literal(const Rational& r) {
  auto mag = [](const mpz_class& z) { return mpz_class(abs(z)).get_str() + ".0"; };
  std::string body = r.get_den() == 1 ? mag(r.get_num()) : "(/ " + mag(r.get_num()) + " " + mag(r.get_den()) + ")";
  return sgn(r) < 0 ? "(- " + body + ")" : body;
}

std::string term(const Polynomial& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0.0";
  std::vector<std::string> summands;
  for (const auto& [alpha, c] : p.terms()) {
    std::vector<std::string> factors;
    if (c != 1 || alpha.degree() == 0) factors.push_back(literal(c));
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (unsigned e = 0; e < alpha[i]; ++e) factors.push_back(names.at(i));
    if (factors.size() == 1) {
      summands.push_back(factors.front());
    } else {
      std::string s = "(*";
      for (const auto& f : factors) s += " " + f;
      summands.push_back(s + ")");
    }
  }
  if (summands.size() == 1) return summands.front();
  std::string s = "(+";
  for (const auto& t : summands) s += " " + t;
  return s + ")";
}

std::string rel_symbol(Rel r) {
  switch (r) {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Gt: return ">";
    case Rel::Ge: return ">=";
    case Rel::Eq:
    case Rel::Ne: return "=";
  }
  return "=";
}

std::string formula_text(const Formula& f, const std::vector<std::string>& names) {
  using K = Formula::Kind;
  auto nary = [&](const char* op, const char* empty) {
    if (f.children().empty()) return std::string(empty);
    std::string s = std::string("(") + op;
    for (const auto& k : f.children()) s += " " + formula_text(k, names);
    return s + ")";
  };
  switch (f.kind()) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Atom: {
      std::string a = "(" + rel_symbol(f.rel()) + " " + term(f.poly(), names) + " 0.0)";
      return f.rel() == Rel::Ne ? "(not " + a + ")" : a;
    }
    case K::And: return nary("and", "true");
    case K::Or: return nary("or", "false");
    case K::Not: return "(not " + formula_text(f.children()[0], names) + ")";
    case K::Implies:
      return "(=> " + formula_text(f.children()[0], names) + " " + formula_text(f.children()[1], names) + ")";
  }
  return "true";
}

}  // namespace

std::string emit(const QuantifiedFormula& q) {
  const auto names = q.joint_names();
  const bool quantified = !q.universal_vars.empty() && q.body.has_value();
  std::ostringstream out;
  out << "(set-option :produce-models true)\n";
  out << "(set-logic " << (quantified ? "NRA" : "QF_NRA") << ")\n";
  for (const auto& c : q.free_constants) out << "(declare-fun " << c << " () Real)\n";

  std::vector<std::string> parts;
  for (const auto& a : q.assertions) parts.push_back(formula_text(a, names));
  if (quantified) {
    std::string binder;
    for (const auto& v : q.universal_vars) binder += (binder.empty() ? "(" : " (") + v + " Real)";
    parts.push_back("(forall (" + binder + ") " + formula_text(*q.body, names) + ")");
  } else if (q.body) {
    parts.push_back(formula_text(*q.body, names));
  }
  if (parts.empty()) {
    out << "(assert true)\n";
  } else if (parts.size() == 1) {
    out << "(assert " << parts.front() << ")\n";
  } else {
    out << "(assert (and";
    for (const auto& p : parts) out << "\n  " << p;
    out << "))\n";
  }
  out << "(check-sat)\n";
  if (!q.free_constants.empty()) {
    out << "(get-value (";
    for (std::size_t i = 0; i < q.free_constants.size(); ++i) out << (i ? " " : "") << q.free_constants[i];
    out << "))\n";
  }
  out << "(exit)\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// S-expressions

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else if (text[pos] == ';') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  std::vector<std::vector<SExpr>> stack(1);
  for (skip(); pos < text.size(); skip()) {
    char c = text[pos];
    if (c == '(') {
      stack.emplace_back();
      ++pos;
    } else if (c == ')') {
      if (stack.size() < 2) throw std::runtime_error("unbalanced ')' in S-expression");
      SExpr e;
      e.is_atom = false;
      e.list = std::move(stack.back());
      stack.pop_back();
      stack.back().push_back(std::move(e));
      ++pos;
    } else if (c == '"' || c == '|') {
      std::size_t end = text.find(c, pos + 1);
      // "" is an escaped quote inside SMT-LIB strings
      while (c == '"' && end != std::string_view::npos && end + 1 < text.size() && text[end + 1] == '"')
        end = text.find(c, end + 2);
      if (end == std::string_view::npos) throw std::runtime_error("unterminated literal in S-expression");
      stack.back().push_back(SExpr{std::string(text.substr(pos, end - pos + 1)), {}, true});
      pos = end + 1;
    } else {
      std::size_t start = pos;
      while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
             text[pos] != ')')
        ++pos;
      stack.back().push_back(SExpr{std::string(text.substr(start, pos - start)), {}, true});
    }
  }
  if (stack.size() != 1) throw std::runtime_error("unbalanced '(' in S-expression");
  return std::move(stack.front());
}

Rational model_value(const SExpr& e, bool allow_approximate) {
  if (e.is_atom) {
    try {
      if (allow_approximate && e.atom.size() > 1 && e.atom.back() == '?')
        return parse_rational(std::string_view(e.atom).substr(0, e.atom.size() - 1));
      return parse_rational(e.atom);
    } catch (const std::invalid_argument&) {
      throw NonRationalValue("non-numeric model value '" + e.atom + "'");
    }
  }
  if (e.list.empty() || !e.list[0].is_atom) throw NonRationalValue("malformed model value");
  const std::string& op = e.list[0].atom;
  std::vector<Rational> args;
  for (std::size_t i = 1; i < e.list.size(); ++i) args.push_back(model_value(e.list[i], allow_approximate));
  if (args.empty()) throw NonRationalValue("operator '" + op + "' without arguments");
  if (op == "-") {
    if (args.size() == 1) return -args[0];
    Rational r = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) r -= args[i];
    return r;
  }
  if (op == "+") {
    Rational r = 0;
    for (const auto& a : args) r += a;
    return r;
  }
  if (op == "*") {
    Rational r = 1;
    for (const auto& a : args) r *= a;
    return r;
  }
  if (op == "/") {
    Rational r = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (is_zero(args[i])) throw NonRationalValue("division by zero in model value");
      r /= args[i];
    }
    return r;
  }
  throw NonRationalValue("non-rational model value '(" + op + " ...)'");
}

// ---------------------------------------------------------------------------
// Re-parsing emitted text

namespace {

class SmtReader {
 public:
  explicit SmtReader(std::vector<std::string> names) : names_(std::move(names)) {}

  Polynomial poly(const SExpr& e) const {
    const std::size_t n = names_.size();
    if (e.is_atom) {
      for (std::size_t i = 0; i < n; ++i)
        if (names_[i] == e.atom) return variable(n, i);
      return Polynomial::constant(n, parse_rational(e.atom));
    }
    const std::string& op = head(e);
    std::vector<Polynomial> args;
    for (std::size_t i = 1; i < e.list.size(); ++i) args.push_back(poly(e.list[i]));
    if (args.empty()) throw std::runtime_error("operator '" + op + "' without arguments");
    if (op == "+") {
      Polynomial r(n);
      for (const auto& a : args) r += a;
      return r;
    }
    if (op == "-") {
      if (args.size() == 1) return -args[0];
      Polynomial r = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) r -= args[i];
      return r;
    }
    if (op == "*") {
      Polynomial r = Polynomial::constant(n, Rational(1));
      for (const auto& a : args) r = r * a;
      return r;
    }
    if (op == "/") {
      Polynomial r = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i].size() != 1 || args[i].terms().begin()->first.degree() != 0)
          throw std::runtime_error("division by non-constant term");
        r *= Rational(1 / args[i].terms().begin()->second);
      }
      return r;
    }
    throw std::runtime_error("unsupported term operator '" + op + "'");
  }

  Formula formula(const SExpr& e) const {
    if (e.is_atom) {
      if (e.atom == "true") return Formula::top();
      if (e.atom == "false") return Formula::bottom();
      throw std::runtime_error("unexpected atom '" + e.atom + "' in formula position");
    }
    const std::string& op = head(e);
    auto kids = [&] {
      std::vector<Formula> out;
      for (std::size_t i = 1; i < e.list.size(); ++i) out.push_back(formula(e.list[i]));
      return out;
    };
    if (op == "and") return Formula::conj(kids());
    if (op == "or") return Formula::disj(kids());
    if (op == "=>") {
      auto k = kids();
      return Formula::implies(std::move(k.at(0)), std::move(k.at(1)));
    }
    if (op == "not") {
      const SExpr& inner = e.list.at(1);
      if (!inner.is_atom && head(inner) == "=") {
        Formula a = formula(inner);
        return Formula::atom(a.poly(), Rel::Ne);
      }
      return Formula::negate(formula(inner));
    }
    static const std::map<std::string, Rel> rels = {
        {"<", Rel::Lt}, {"<=", Rel::Le}, {">", Rel::Gt}, {">=", Rel::Ge}, {"=", Rel::Eq}};
    auto it = rels.find(op);
    if (it == rels.end() || e.list.size() != 3) throw std::runtime_error("unsupported formula operator '" + op + "'");
    return Formula::atom(poly(e.list[1]) - poly(e.list[2]), it->second);
  }

  static const std::string& head(const SExpr& e) {
    if (e.list.empty() || !e.list[0].is_atom) throw std::runtime_error("expected operator application");
    return e.list[0].atom;
  }

 private:
  std::vector<std::string> names_;
};

}  // namespace

QuantifiedFormula parse_smtlib(std::string_view text) {
  QuantifiedFormula q;
  const SExpr* asserted = nullptr;
  auto commands = parse_sexprs(text);
  for (const auto& cmd : commands) {
    if (cmd.is_atom || cmd.list.empty()) continue;
    const std::string& op = SmtReader::head(cmd);
    if (op == "declare-fun" || op == "declare-const") {
      q.free_constants.push_back(cmd.list.at(1).atom);
    } else if (op == "assert") {
      if (asserted) throw std::runtime_error("expected a single assert");
      asserted = &cmd.list.at(1);
    }
  }
  if (!asserted) return q;

  std::vector<const SExpr*> parts;
  const SExpr* quantified = nullptr;
  auto is_forall = [](const SExpr& e) { return !e.is_atom && !e.list.empty() && e.list[0].atom == "forall"; };
  if (!asserted->is_atom && !asserted->list.empty() && asserted->list[0].atom == "and") {
    for (std::size_t i = 1; i < asserted->list.size(); ++i) {
      if (is_forall(asserted->list[i]))
        quantified = &asserted->list[i];
      else
        parts.push_back(&asserted->list[i]);
    }
  } else if (is_forall(*asserted)) {
    quantified = asserted;
  } else {
    parts.push_back(asserted);
  }
  if (quantified)
    for (const auto& binding : quantified->list.at(1).list) q.universal_vars.push_back(binding.list.at(0).atom);

  SmtReader reader(q.joint_names());
  for (const auto* p : parts) {
    if (p->is_atom && p->atom == "true") continue;
    q.assertions.push_back(reader.formula(*p));
  }
  if (quantified) q.body = reader.formula(quantified->list.at(2));
  return q;
}

// ---------------------------------------------------------------------------
// Solver processes

SolverConfig SolverConfig::from_environment() {
  SolverConfig c;
  if (const char* bin = std::getenv("LYRA_SOLVER"); bin && *bin) c.binary = bin;
  if (const char* args = std::getenv("LYRA_SOLVER_ARGS"); args) {
    c.args.clear();
    std::istringstream in(args);
    for (std::string a; in >> a;) c.args.push_back(a);
  }
  return c;
}

std::string SolverConfig::resolved_binary() const {
  namespace fs = std::filesystem;
  if (binary.empty()) throw SolverConfigError("no solver binary configured");
  if (binary.find('/') != std::string::npos) {
    if (::access(binary.c_str(), X_OK) == 0) return binary;
    throw SolverConfigError("solver binary '" + binary + "' is not executable");
  }
  const char* path = std::getenv("PATH");
  std::istringstream dirs(path ? path : "");
  for (std::string dir; std::getline(dirs, dir, ':');) {
    if (dir.empty()) continue;
    fs::path candidate = fs::path(dir) / binary;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  throw SolverConfigError("solver binary '" + binary + "' not found on PATH (set LYRA_SOLVER)");
}

bool SolverConfig::available() const {
  try {
    resolved_binary();
    return true;
  } catch (const SolverConfigError&) {
    return false;
  }
}

std::optional<SolverConfig> detect_solver() {
  auto c = SolverConfig::from_environment();
  if (!c.available()) return std::nullopt;
  return c;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "SAT";
    case Verdict::Unsat: return "UNSAT";
    case Verdict::Unknown: return "UNKNOWN";
    case Verdict::Timeout: return "TIMEOUT";
  }
  return "?";
}

ProcessResult run_process(const std::string& binary, const std::vector<std::string>& args, const std::string& input,
                          double timeout_s) {
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw std::runtime_error(std::string("pipe failed: ") + std::strerror(errno));

  std::vector<char*> argv;
  argv.push_back(const_cast<char*>(binary.c_str()));
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) close(fd);
    execv(binary.c_str(), argv.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  for (int fd : {in_pipe[1], out_pipe[0], err_pipe[0]}) fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK);

  ProcessResult res;
  int in_fd = in_pipe[1], out_fd = out_pipe[0], err_fd = err_pipe[0];
  std::size_t written = 0;
  if (input.empty()) {
    close(in_fd);
    in_fd = -1;
  }
  const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(timeout_s));
  char buf[65536];
  while (out_fd >= 0 || err_fd >= 0) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      res.timed_out = true;
      break;
    }
    int wait_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    std::vector<pollfd> fds;
    if (in_fd >= 0) fds.push_back({in_fd, POLLOUT, 0});
    if (out_fd >= 0) fds.push_back({out_fd, POLLIN, 0});
    if (err_fd >= 0) fds.push_back({err_fd, POLLIN, 0});
    int ready = poll(fds.data(), fds.size(), wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const auto& p : fds) {
      if (p.revents == 0) continue;
      if (p.fd == in_fd) {
        ssize_t n = write(in_fd, input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN) written = input.size();
        if (written >= input.size()) {
          close(in_fd);
          in_fd = -1;
        }
      } else {
        ssize_t n = read(p.fd, buf, sizeof buf);
        if (n > 0) {
          (p.fd == out_fd ? res.out : res.err).append(buf, static_cast<std::size_t>(n));
        } else if (n == 0 || errno != EAGAIN) {
          close(p.fd);
          (p.fd == out_fd ? out_fd : err_fd) = -1;
        }
      }
    }
  }
  for (int fd : {in_fd, out_fd, err_fd})
    if (fd >= 0) close(fd);
  if (res.timed_out) kill(pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  res.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

SolverResult parse_solver_output(const std::string& out, bool allow_approximate) {
  SolverResult r;
  r.transcript = out;
  std::vector<SExpr> items;
  try {
    items = parse_sexprs(out);
  } catch (const std::exception& e) {
    r.diagnostic = std::string("unparseable solver output: ") + e.what();
    return r;
  }
  std::size_t i = 0;
  for (; i < items.size(); ++i) {
    if (!items[i].is_atom) continue;
    const auto& a = items[i].atom;
    if (a == "sat") r.verdict = Verdict::Sat;
    else if (a == "unsat") r.verdict = Verdict::Unsat;
    else if (a == "unknown") r.verdict = Verdict::Unknown;
    else if (a == "timeout") r.verdict = Verdict::Timeout;
    else continue;
    break;
  }
  if (i == items.size()) {
    r.diagnostic = "no verdict in solver output";
    return r;
  }
  if (r.verdict != Verdict::Sat) return r;
  for (std::size_t j = i + 1; j < items.size(); ++j) {
    const auto& e = items[j];
    if (e.is_atom || e.list.empty()) continue;
    if (e.list[0].is_atom) {
      if (e.list[0].atom == "error") r.diagnostic += e.list.size() > 1 ? e.list[1].atom : "solver error";
      continue;
    }
    for (const auto& pair : e.list) {
      if (pair.is_atom || pair.list.size() != 2 || !pair.list[0].is_atom) continue;
      try {
        r.model[pair.list[0].atom] = model_value(pair.list[1], allow_approximate);
      } catch (const NonRationalValue& ex) {
        r.irrational_model = true;
        r.diagnostic = ex.what();
      }
    }
  }
  if (r.irrational_model) r.verdict = Verdict::Unknown;
  return r;
}

SolverResult run_solver(const std::string& text, const SolverConfig& config, double timeout_s) {
  const std::string binary = config.resolved_binary();
  const auto start = std::chrono::steady_clock::now();
  ProcessResult p = run_process(binary, config.args, text, timeout_s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  SolverResult r;
  if (p.timed_out) {
    r.verdict = Verdict::Timeout;
    r.transcript = p.out;
    r.diagnostic = "killed after " + std::to_string(timeout_s) + " s";
  } else {
    r = parse_solver_output(p.out);
    if (p.exit_status == 127 && p.out.empty()) r.diagnostic = "solver could not be executed";
    if (!p.err.empty()) r.diagnostic += (r.diagnostic.empty() ? "" : "; ") + p.err;
  }
  r.seconds = secs;
  return r;
}

}  // namespace lyra
