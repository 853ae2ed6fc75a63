// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lyra/poly.hpp"

namespace lyra {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Parses the rendering grammar of `to_string(Polynomial)`:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/' | <juxtaposition>) unary)*
///   unary  := ('+' | '-') unary | power
///   power  := atom ('^' integer)?
///   atom   := number | identifier | '(' expr ')'
/// Numbers may be integers, decimals or use an exponent; division is only by
/// constants. Identifiers are resolved against `names` (their index is the
/// variable index). `line` is only used to label errors.
Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& names, std::size_t line = 1);

}  // namespace lyra
