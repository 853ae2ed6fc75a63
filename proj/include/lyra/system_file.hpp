// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyra/parse.hpp"
#include "lyra/poly.hpp"
#include "lyra/template.hpp"

namespace lyra {

/// A polynomial system description.
///
///     # comment
///     name: E1
///     vars: x1 x2
///     f1: -x1^3 + x1^5*x2
///     f2: -x2^3 - x1^6
///     expect: GAS
///     template: 2..2 even cross
///
/// `vars` must precede the component lines; `name`, `expect` and `template`
/// are optional.
struct SystemFile {
  std::string name;
  std::vector<std::string> variables;
  VectorField field;
  std::optional<std::string> expect;
  std::optional<TemplateSpec> template_spec;
};

/// Errors carry line and column. A field with f(0) != 0 is rejected.
SystemFile parse_system(std::string_view text);
SystemFile load_system(const std::string& path);

/// Parses "2..4 even nocross" (degree range, then optional parity and cross
/// keywords) for a system of the given dimension.
TemplateSpec parse_template_line(std::string_view text, std::size_t dimension, std::size_t line = 1);

}  // namespace lyra
