// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include "lyra/system_file.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace lyra {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool valid_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

TemplateSpec parse_template_line(std::string_view text, std::size_t dimension, std::size_t line) {
  auto w = words(text);
  if (w.empty()) throw ParseError(line, 1, "empty template line");
  TemplateSpec spec;
  spec.dimension = dimension;
  const auto& range = w[0];
  try {
    auto dots = range.find("..");
    if (dots == std::string::npos) {
      spec.min_degree = spec.max_degree = static_cast<unsigned>(std::stoul(range));
    } else {
      spec.min_degree = static_cast<unsigned>(std::stoul(range.substr(0, dots)));
      spec.max_degree = static_cast<unsigned>(std::stoul(range.substr(dots + 2)));
    }
  } catch (const std::exception&) {
    throw ParseError(line, 1, "bad degree range '" + range + "'");
  }
  spec.parity = Parity::EvenOnly;
  spec.cross_terms = spec.max_degree <= 2;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] == "even") spec.parity = Parity::EvenOnly;
    else if (w[i] == "all") spec.parity = Parity::All;
    else if (w[i] == "cross") spec.cross_terms = true;
    else if (w[i] == "nocross") spec.cross_terms = false;
    else throw ParseError(line, 1, "unknown template keyword '" + w[i] + "'");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, 1, e.what());
  }
  return spec;
}

SystemFile parse_system(std::string_view text) {
  SystemFile sys;
  std::map<std::size_t, Polynomial> comps;
  std::optional<std::pair<std::size_t, std::string>> tmpl;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (trim(raw).empty()) continue;
    auto colon = raw.find(':');
    if (colon == std::string_view::npos) throw ParseError(lineno, 1, "expected 'key: value'");
    const std::string key{trim(raw.substr(0, colon))};
    const std::string_view value = trim(raw.substr(colon + 1));
    const std::size_t value_col = static_cast<std::size_t>(value.data() - raw.data()) + 1;
    if (key == "name") {
      sys.name = std::string(value);
    } else if (key == "expect") {
      sys.expect = std::string(value);
    } else if (key == "template") {
      tmpl = {lineno, std::string(value)};
    } else if (key == "vars") {
      if (!sys.variables.empty()) throw ParseError(lineno, 1, "duplicate 'vars' line");
      sys.variables = words(value);
      if (sys.variables.empty()) throw ParseError(lineno, value_col, "no variables declared");
      for (std::size_t i = 0; i < sys.variables.size(); ++i) {
        if (!valid_identifier(sys.variables[i]))
          throw ParseError(lineno, value_col, "invalid variable name '" + sys.variables[i] + "'");
        for (std::size_t j = 0; j < i; ++j)
          if (sys.variables[i] == sys.variables[j])
            throw ParseError(lineno, value_col, "duplicate variable '" + sys.variables[i] + "'");
      }
    } else if (key.size() > 1 && key[0] == 'f' && key.find_first_not_of("0123456789", 1) == std::string::npos) {
      if (sys.variables.empty()) throw ParseError(lineno, 1, "component before 'vars'");
      const std::size_t idx = std::stoul(key.substr(1));
      if (idx < 1 || idx > sys.variables.size())
        throw ParseError(lineno, 1, "component index " + key + " out of range");
      if (comps.count(idx)) throw ParseError(lineno, 1, "duplicate component " + key);
      Polynomial p;
      try {
        p = parse_polynomial(value, sys.variables, lineno);
      } catch (const ParseError& e) {
        throw ParseError(e.line(), value_col + e.column() - 1, e.message());
      }
      if (!is_zero(p.coefficient(MultiIndex(sys.variables.size()))))
        throw ParseError(lineno, value_col, "component " + key + " does not vanish at the origin");
      comps.emplace(idx, std::move(p));
    } else {
      throw ParseError(lineno, 1, "unknown key '" + key + "'");
    }
  }
  if (sys.variables.empty()) throw ParseError(lineno, 1, "missing 'vars' line");
  std::vector<Polynomial> fs;
  for (std::size_t i = 1; i <= sys.variables.size(); ++i) {
    auto it = comps.find(i);
    if (it == comps.end()) throw ParseError(lineno, 1, "missing component f" + std::to_string(i));
    fs.push_back(it->second);
  }
  sys.field = VectorField(std::move(fs));
  if (tmpl) sys.template_spec = parse_template_line(tmpl->second, sys.variables.size(), tmpl->first);
  return sys;
}

SystemFile load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  SystemFile sys = parse_system(buf.str());
  if (sys.name.empty()) {
    auto slash = path.find_last_of('/');
    sys.name = path.substr(slash == std::string::npos ? 0 : slash + 1);
  }
  return sys;
}

}  // namespace lyra
