// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/lasalle.hpp"

#include <stdexcept>

namespace lyra {

std::string to_string(LaSalleVariant v) {
  return v == LaSalleVariant::Disjunctive ? "disjunctive" : "single-order";
}

Formula lasalle_formula(const std::vector<Polynomial>& chain, const Polynomial& norm, unsigned r,
                        LaSalleVariant variant) {
  if (r < 2) throw std::invalid_argument("LaSalle order must be at least 2");
  if (chain.size() < r) throw std::invalid_argument("Lie chain shorter than the LaSalle order");
  Formula antecedent = Formula::conj({Formula::atom(chain[0], Rel::Eq), Formula::atom(norm, Rel::Gt)});
  Formula consequent = Formula::atom(chain[r - 1], Rel::Ne);
  if (variant == LaSalleVariant::Disjunctive) {
    std::vector<Formula> parts;
    for (unsigned k = 2; k <= r; ++k) parts.push_back(Formula::atom(chain[k - 1], Rel::Ne));
    consequent = Formula::disj(std::move(parts));
  }
  return Formula::implies(std::move(antecedent), std::move(consequent));
}

LaSalleEncoding build_lasalle(const Polynomial& v, const VectorField& f, unsigned r, LaSalleVariant variant,
                              std::size_t term_cap) {
  if (r < 2) throw std::invalid_argument("LaSalle order must be at least 2");
  LieChain<Rational> chain(v, f, term_cap);
  chain.order(r);
  LaSalleEncoding enc;
  enc.chain = chain.derivatives();
  enc.r = r;
  enc.variant = variant;
  enc.formula = lasalle_formula(enc.chain, squared_norm(v.dimension()), r, variant);
  enc.quantified.universal_vars = default_variable_names(v.dimension());
  enc.quantified.body = enc.formula;
  return enc;
}

Formula build_lasalle_parametric(const ParamPoly& v, const VectorField& f, unsigned r, LaSalleVariant variant,
                                 const std::map<int, std::size_t>& param_slot, std::size_t state_offset,
                                 std::size_t joint_dimension, std::size_t term_cap) {
  if (r < 2) throw std::invalid_argument("LaSalle order must be at least 2");
  LieChain<AffineForm> chain(v, f, term_cap);
  chain.order(r);
  std::vector<Polynomial> embedded;
  for (const auto& d : chain.derivatives()) embedded.push_back(embed(d, param_slot, state_offset, joint_dimension));
  return lasalle_formula(embedded, embed(squared_norm(v.dimension()), state_offset, joint_dimension), r, variant);
}

LaSalleScan lasalle_scan(const Verifier& verifier, const Polynomial& v, const VectorField& f, unsigned r_max) {
  if (r_max < 2) throw std::invalid_argument("LaSalle r_max must be at least 2");
  LaSalleScan scan;
  LieChain<Rational> chain(v, f);
  const Polynomial norm = squared_norm(v.dimension());

  auto attempt = [&](unsigned r, LaSalleVariant variant) {
    VerificationOutcome out;
    out.check = CheckTag::LaSalle;
    out.order = r;
    try {
      chain.order(r);
    } catch (const TermCapExceeded& e) {
      out.diagnostic = e.what();
      scan.attempts.push_back(out);
      return false;
    }
    // An empty antecedent makes every order valid.
    if (syntactic_definite(chain.order(1), -1, true)) {
      out.verdict = Validity::Valid;
      out.method = "syntactic";
      out.diagnostic = "V' is negative definite";
    } else {
      out = verifier.check_valid(lasalle_formula(chain.derivatives(), norm, r, variant), v.dimension(),
                                 CheckTag::LaSalle, r);
    }
    if (out.verdict == Validity::Timeout) scan.timed_out = true;
    scan.attempts.push_back(out);
    if (!out.valid()) return false;
    scan.verified = true;
    scan.r_used = r;
    scan.variant = variant;
    return true;
  };

  for (unsigned r = 2; r <= r_max; ++r)
    if (attempt(r, LaSalleVariant::SingleOrder)) return scan;
  if (r_max > 2) attempt(r_max, LaSalleVariant::Disjunctive);
  return scan;
}

}  // namespace lyra
