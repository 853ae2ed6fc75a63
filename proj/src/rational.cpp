// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace lyra {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  bool negative = false;
  std::string_view s = text;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) fail();
    mpz_class d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    value = Rational(mpz_class(std::string(num), 10), d);
    value.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      auto exp_text = s.substr(e + 1);
      bool exp_neg = false;
      if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_neg = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) fail();
      exponent = std::stol(std::string(exp_text));
      if (exp_neg) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string_view int_part = s, frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      int_part = s.substr(0, dot);
      frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) fail();
    if (!int_part.empty() && !all_digits(int_part)) fail();
    if (!frac_part.empty() && !all_digits(frac_part)) fail();
    std::string digits = std::string(int_part) + std::string(frac_part);
    if (digits.empty()) fail();
    value = Rational(mpz_class(digits, 10)) * pow10(exponent - static_cast<long>(frac_part.size()));
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot convert non-finite double to rational");
  Rational r(v);
  r.canonicalize();
  return r;
}

Rational round_to_denominator(double v, std::int64_t denominator) {
  if (denominator <= 0) throw std::invalid_argument("rounding denominator must be positive");
  if (!std::isfinite(v)) throw std::invalid_argument("cannot round non-finite double");
  double scaled = std::nearbyint(v * static_cast<double>(denominator));
  Rational r(mpz_class(scaled), mpz_class(static_cast<long>(denominator)));
  r.canonicalize();
  return r;
}

Rational sqrt_upper(const Rational& r, int digits) {
  if (sgn(r) < 0) throw std::invalid_argument("sqrt_upper of a negative rational");
  // ceil(sqrt(r) * 10^digits) via integer sqrt of ceil(r * 10^(2 digits)).
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Rational scaled = r * Rational(scale * scale);
  mpz_class ceil_scaled;
  mpz_cdiv_q(ceil_scaled.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), ceil_scaled.get_mpz_t());
  if (root * root < ceil_scaled) root += 1;
  Rational out(root, scale);
  out.canonicalize();
  return out;
}

Rational pow(const Rational& base, unsigned exp) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exp);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exp);
  out.canonicalize();
  return out;
}

double to_double(const Rational& r) { return r.get_d(); }

}  // namespace lyra
