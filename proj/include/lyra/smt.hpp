// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lyra/poly.hpp"
#include "lyra/template.hpp"

namespace lyra {

enum class Rel { Lt, Le, Gt, Ge, Eq, Ne };

/// Quantifier-free boolean combination of atoms "p rel 0" with exact rational
/// coefficients. Polynomials live in the joint variable space of the
/// enclosing QuantifiedFormula.
class Formula {
 public:
  enum class Kind { True, False, Atom, And, Or, Not, Implies };

  static Formula top() { return Formula(Kind::True); }
  static Formula bottom() { return Formula(Kind::False); }
  static Formula atom(Polynomial p, Rel rel);
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula negate(Formula f);
  static Formula implies(Formula lhs, Formula rhs);

  Kind kind() const { return kind_; }
  const Polynomial& poly() const { return poly_; }
  Rel rel() const { return rel_; }
  const std::vector<Formula>& children() const { return kids_; }

  bool evaluate(std::span<const Rational> point) const;
  void collect_atoms(std::vector<std::pair<Polynomial, Rel>>& out) const;

 private:
  explicit Formula(Kind k) : kind_(k) {}

  Kind kind_ = Kind::True;
  Polynomial poly_;
  Rel rel_ = Rel::Eq;
  std::vector<Formula> kids_;
};

bool holds(const Rational& value, Rel rel);

/// exists free_constants . (assertions /\ forall universal_vars . body).
/// Joint variable order: free constants first, then universal variables.
struct QuantifiedFormula {
  std::vector<std::string> free_constants;
  std::vector<std::string> universal_vars;
  std::vector<Formula> assertions;
  std::optional<Formula> body;

  std::size_t dimension() const { return free_constants.size() + universal_vars.size(); }
  std::vector<std::string> joint_names() const;
};

/// Joint-space image of a parametric polynomial: parameter p becomes variable
/// param_slot.at(p), state variable i becomes state_offset + i.
Polynomial embed(const ParamPoly& v, const std::map<int, std::size_t>& param_slot, std::size_t state_offset,
                 std::size_t joint_dimension);
Polynomial embed(const Polynomial& p, std::size_t state_offset, std::size_t joint_dimension);

/// SMT-LIB v2 text: declarations, one assert, check-sat, get-value.
std::string emit(const QuantifiedFormula& q);

/// Inverse of emit for the fragment emit produces.
QuantifiedFormula parse_smtlib(std::string_view text);

/// Generic S-expression, used for solver output and re-parsing.
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_atom = true;
};
std::vector<SExpr> parse_sexprs(std::string_view text);

class NonRationalValue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact value of a model term such as "1.0", "(- 2)", "(/ 1.0 3.0)", "0.9999".
/// With allow_approximate, decimal approximations printed as "1.2599?" are
/// accepted and read as the truncated decimal.
Rational model_value(const SExpr& e, bool allow_approximate = false);

class SolverConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  std::string binary = "z3";
  std::vector<std::string> args = {"-in", "-smt2"};

  /// LYRA_SOLVER (binary) and LYRA_SOLVER_ARGS (space separated) override the defaults.
  static SolverConfig from_environment();
  /// Absolute path of the binary, or SolverConfigError if it cannot be found.
  std::string resolved_binary() const;
  bool available() const;
};

/// Solver from the environment if its binary exists.
std::optional<SolverConfig> detect_solver();

enum class Verdict { Sat, Unsat, Unknown, Timeout };
std::string to_string(Verdict v);

struct SolverResult {
  Verdict verdict = Verdict::Unknown;
  std::map<std::string, Rational> model;
  /// The solver answered sat but some value was not rational.
  bool irrational_model = false;
  double seconds = 0.0;
  std::string transcript;
  std::string diagnostic;
};

/// Runs one solver process on `text`; the process is killed after timeout_s.
SolverResult run_solver(const std::string& text, const SolverConfig& config, double timeout_s);

/// Interprets raw solver stdout.
SolverResult parse_solver_output(const std::string& out, bool allow_approximate = false);

struct ProcessResult {
  bool timed_out = false;
  int exit_status = 0;
  std::string out;
  std::string err;
};
ProcessResult run_process(const std::string& binary, const std::vector<std::string>& args, const std::string& input,
                          double timeout_s);

}  // namespace lyra
