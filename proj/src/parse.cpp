// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/parse.hpp"

#include <cctype>
#include <optional>

namespace lyra {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;
};

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names, std::size_t line)
      : text_(text), names_(names), line_(line) {
    advance();
  }

  Polynomial parse() {
    Polynomial p = expr();
    if (cur_.kind != Tok::End) error("unexpected '" + cur_.text + "'");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const { throw ParseError(line_, cur_.column, msg); }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t col = pos_ + 1;
    if (pos_ >= text_.size()) {
      cur_ = {Tok::End, "<end>", col};
      return;
    }
    char c = text_[pos_];
    auto single = [&](Tok k) {
      cur_ = {k, std::string(1, c), col};
      ++pos_;
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        ++pos_;
      // exponent part, only when followed by a digit (so "2e" stays an error-free juxtaposition)
      if (pos_ + 1 < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t q = pos_ + 1;
        if (q < text_.size() && (text_[q] == '-' || text_[q] == '+')) ++q;
        if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
          pos_ = q;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
      }
      cur_ = {Tok::Number, std::string(text_.substr(start, pos_ - start)), col};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      cur_ = {Tok::Ident, std::string(text_.substr(start, pos_ - start)), col};
      return;
    }
    cur_ = {Tok::End, std::string(1, c), col};
    error(std::string("unexpected character '") + c + "'");
  }

  std::size_t dim() const { return names_.size(); }

  Polynomial expr() {
    Polynomial p = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      bool minus = cur_.kind == Tok::Minus;
      advance();
      Polynomial t = term();
      p = minus ? p - t : p + t;
    }
    return p;
  }

  bool starts_atom() const {
    return cur_.kind == Tok::Number || cur_.kind == Tok::Ident || cur_.kind == Tok::LParen;
  }

  Polynomial term() {
    Polynomial p = unary();
    for (;;) {
      if (cur_.kind == Tok::Star) {
        advance();
        p = p * unary();
      } else if (cur_.kind == Tok::Slash) {
        advance();
        const std::size_t col = cur_.column;
        Polynomial d = unary();
        auto c = as_constant(d);
        if (!c) throw ParseError(line_, col, "division by a non-constant expression");
        if (is_zero(*c)) throw ParseError(line_, col, "division by zero");
        p *= Rational(1 / *c);
      } else if (starts_atom()) {
        p = p * unary();
      } else {
        return p;
      }
    }
  }

  Polynomial unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return -unary();
    }
    if (cur_.kind == Tok::Plus) {
      advance();
      return unary();
    }
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (cur_.kind == Tok::Caret) {
      advance();
      if (cur_.kind != Tok::Number || cur_.text.find_first_not_of("0123456789") != std::string::npos)
        error("exponent must be a non-negative integer");
      if (cur_.text.size() > 4) error("exponent too large");
      unsigned e = static_cast<unsigned>(std::stoul(cur_.text));
      advance();
      return lyra::pow(base, e);
    }
    return base;
  }

  Polynomial atom() {
    switch (cur_.kind) {
      case Tok::Number: {
        Rational v;
        try {
          v = parse_rational(cur_.text);
        } catch (const std::invalid_argument&) {
          error("malformed number '" + cur_.text + "'");
        }
        advance();
        return Polynomial::constant(dim(), v);
      }
      case Tok::Ident: {
        for (std::size_t i = 0; i < names_.size(); ++i) {
          if (names_[i] == cur_.text) {
            advance();
            return variable(dim(), i);
          }
        }
        error("unknown variable '" + cur_.text + "'");
      }
      case Tok::LParen: {
        advance();
        Polynomial p = expr();
        if (cur_.kind != Tok::RParen) error("expected ')'");
        advance();
        return p;
      }
      case Tok::End: error("unexpected end of expression");
      default: error("unexpected '" + cur_.text + "'");
    }
  }

  std::optional<Rational> as_constant(const Polynomial& p) const {
    if (p.is_zero()) return Rational(0);
    if (p.size() == 1 && p.terms().begin()->first.degree() == 0) return p.terms().begin()->second;
    return std::nullopt;
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  std::size_t line_;
  std::size_t pos_ = 0;
  Token cur_{Tok::End, "", 1};
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& names, std::size_t line) {
  return Parser(text, names, line).parse();
}

}  // namespace lyra
