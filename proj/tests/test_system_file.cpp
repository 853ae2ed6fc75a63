// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#include <doctest.h>

#include "support.hpp"

using namespace lyra;
using test::sum;
using test::term;

namespace {

using R = Rational;

VectorField golden(int id) {
  switch (id) {
    case 1:
      return VectorField({sum({term(-1, {3, 0}), term(1, {5, 1})}), sum({term(-1, {0, 3}), term(-1, {6, 0})})});
    case 2:
      return VectorField({sum({term(-1, {7, 0}), term(1, {1, 1})}), sum({term(-1, {0, 7}), term(-1, {2, 0})})});
    case 3:
      return VectorField({sum({term(-1, {1, 0}), term(R(-3, 2), {2, 3})}), sum({term(-1, {0, 3}), term(R(1, 2), {3, 2})})});
    case 4:
      return VectorField({sum({term(-1, {3, 0}), term(1, {0, 1})}), sum({term(-1, {1, 0}), term(-1, {0, 1})})});
    case 5: {
      const R sigma = 10, r = R(9999, 10000), b = R(8, 3);
      return VectorField({sum({term(-sigma, {1, 0, 0}), term(sigma, {0, 1, 0})}),
                          sum({term(r, {1, 0, 0}), term(-1, {0, 1, 0}), term(-1, {1, 0, 1})}),
                          sum({term(-b, {0, 0, 1}), term(1, {1, 1, 0})})});
    }
    case 6:
      return VectorField({sum({term(-1, {1, 0, 0, 0}), term(1, {0, 3, 0, 0}), term(-3, {0, 0, 1, 1})}),
                          sum({term(-1, {1, 0, 0, 0}), term(-1, {0, 3, 0, 0})}),
                          sum({term(1, {1, 0, 0, 1}), term(-1, {0, 0, 1, 0})}),
                          sum({term(1, {1, 0, 1, 0}), term(-1, {0, 0, 0, 3})})});
    case 7:
      return VectorField({sum({term(-1, {3, 0, 0, 0, 0, 0}), term(4, {0, 3, 0, 0, 0, 0}), term(-6, {0, 0, 1, 1, 0, 0})}),
                          sum({term(-1, {1, 0, 0, 0, 0, 0}), term(-1, {0, 1, 0, 0, 0, 0}), term(1, {0, 0, 0, 0, 3, 0})}),
                          sum({term(1, {1, 0, 0, 1, 0, 0}), term(-1, {0, 0, 1, 0, 0, 0}), term(1, {0, 0, 0, 1, 0, 1})}),
                          sum({term(1, {1, 0, 1, 0, 0, 0}), term(1, {0, 0, 1, 0, 0, 1}), term(-1, {0, 0, 0, 3, 0, 0})}),
                          sum({term(-2, {0, 3, 0, 0, 0, 0}), term(-1, {0, 0, 0, 0, 1, 0}), term(1, {0, 0, 0, 0, 0, 1})}),
                          sum({term(-3, {0, 0, 1, 1, 0, 0}), term(-1, {0, 0, 0, 0, 3, 0}), term(-1, {0, 0, 0, 0, 0, 1})})});
    case 8:
      return VectorField({term(1, {0, 1}), sum({term(-1, {3, 0}), term(-1, {0, 3})})});
    case 9:
      return VectorField({term(1, {0, 1}), sum({term(-1, {5, 0}), term(-3, {0, 1})})});
    case 10:
      return VectorField({term(1, {0, 1}), sum({term(-1, {1, 0}), term(-7, {0, 5})})});
  }
  throw std::logic_error("no such benchmark");
}

}  // namespace

TEST_CASE("benchmark corpus matches the hand-written fields") {
  for (int id = 1; id <= 10; ++id) {
    CAPTURE(id);
    const SystemFile sys = test::benchmark(id);
    CHECK(sys.name == "E" + std::to_string(id));
    CHECK(sys.field == golden(id));
    CHECK(sys.variables == default_variable_names(sys.field.dimension()));
    REQUIRE(sys.expect.has_value());
    CHECK(*sys.expect == (id <= 7 ? "GAS" : "GAS_LASALLE"));
    REQUIRE(sys.template_spec.has_value());
    CHECK(sys.template_spec->dimension == sys.field.dimension());
  }
}

TEST_CASE("system parsing") {
  const SystemFile s = parse_system("# comment\nvars: a b\nf1: -a + b^2  # trailing\nf2: -b\n");
  CHECK(s.variables == std::vector<std::string>{"a", "b"});
  CHECK(s.field.dimension() == 2);
  CHECK(s.name.empty());
  CHECK_FALSE(s.template_spec.has_value());
}

TEST_CASE("parse errors carry positions") {
  auto error_at = [](const char* text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_system(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(error_at("vars: x1 x2\nf1: -x1\nf2: -x2 +\n").first == 3);
  CHECK(error_at("f1: -x1\n").first == 1);
  CHECK(error_at("vars: x1\nf1: 1 - x1\n").first == 2);
  CHECK(error_at("vars: x1 x2\nf1: -x1\n").first != 0);
  CHECK(error_at("vars: x1\nf1: -x1\nbogus\n").first == 3);
  const auto pos = error_at("vars: x1 x2\nf1: -x1 + x3\nf2: -x2\n");
  CHECK(pos.first == 2);
  CHECK(pos.second > 5);
}

TEST_CASE("template lines") {
  const TemplateSpec t = parse_template_line("2..4 even nocross", 3);
  CHECK(t.dimension == 3);
  CHECK(t.min_degree == 2);
  CHECK(t.max_degree == 4);
  CHECK(t.parity == Parity::EvenOnly);
  CHECK_FALSE(t.cross_terms);
  const TemplateSpec u = parse_template_line("1..2 all cross", 2);
  CHECK(u.parity == Parity::All);
  CHECK(u.cross_terms);
  CHECK_THROWS_AS(parse_template_line("4..2", 2), ParseError);
  CHECK_THROWS_AS(parse_template_line("2..4 sideways", 2), ParseError);
}

TEST_CASE("missing files") { CHECK_THROWS(load_system("/nonexistent/e0.sys")); }
