#include <doctest.h>

#include <sstream>

#include "nilcontrol/models.hpp"
#include "nilcontrol/structure_io.hpp"

using namespace nilcontrol;

namespace {

LieAlgebraSpec parse(const std::string& text) {
  std::istringstream in(text);
  return read_structure(in);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

bool same_tables(const LieAlgebraSpec& a, const LieAlgebraSpec& b) {
  if (a.dim() != b.dim() || a.nilpotency_order() != b.nilpotency_order()) return false;
  for (int i = 0; i < a.dim(); ++i) {
    if (a.element(i).degree != b.element(i).degree) return false;
    for (int j = 0; j < a.dim(); ++j) {
      for (int k = 0; k < a.dim(); ++k) {
        if (a.constant(i, j, k) != b.constant(i, j, k)) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("rationals in all accepted spellings") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("single orientation is completed and degrees are inferred") {
  const auto spec = parse("dim 4\norder 2\nbracket 0 2 = 3:1\n");
  CHECK(spec.constant(0, 2, 3) == Rational(1));
  CHECK(spec.constant(2, 0, 3) == Rational(-1));
  CHECK(spec.element(3).degree == 2);
  CHECK(spec.element(1).degree == 1);
}

TEST_CASE("both orientations are kept verbatim") {
  const auto spec = parse("dim 3\norder 2\nbracket 0 1 = 2:1\nbracket 1 0 = 2:1\n");
  CHECK(spec.constant(1, 0, 2) == Rational(1));
  CHECK_FALSE(validate_spec(spec).ok());
}

TEST_CASE("multi-term brackets and comments") {
  const auto spec = parse(
      "# header\n"
      "dim 4\norder 3\n"
      "element 2 2 [a,b]\nelement 3 3\n"
      "bracket 0 1 = 2:1   # trailing\n"
      "bracket 0 2 = 3:-1/2\n"
      "bracket 1 2 = 3:0.5\n");
  CHECK(spec.constant(0, 2, 3) == Rational(-1, 2));
  CHECK(spec.constant(2, 1, 3) == Rational(-1, 2));
  CHECK(spec.element(2).label == "[a,b]");
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("dim 3\norder 2\nbracket 0 1 2:1\n") == 3);
  CHECK(error_line("dim 3\norder 2\nfoo 1\n") == 3);
  CHECK(error_line("dim x\n") == 1);
  CHECK(error_line("dim 3\norder 2\nbracket 0 1 = 2:z\n") == 3);
  CHECK_THROWS_AS(parse("order 2\n"), ParseError);
  CHECK_THROWS_AS(read_structure_file("/nonexistent/file.txt"), std::runtime_error);
}

TEST_CASE("write then read reproduces the table") {
  for (const LieAlgebraSpec& spec :
       {rigid_body_model().algebra, chained_drift_model().algebra,
        free_structure_constants(hall_basis(3, 3))}) {
    std::ostringstream out;
    write_structure(out, spec);
    CHECK(same_tables(parse(out.str()), spec));
  }
}

TEST_CASE("shipped data files match the built-in algebras") {
  CHECK(same_tables(read_structure_file(NILCONTROL_DATA_DIR "/rigid_body.txt"),
                    rigid_body_model().algebra));
  CHECK(same_tables(read_structure_file(NILCONTROL_DATA_DIR "/chained_drift.txt"),
                    chained_drift_model().algebra));
  CHECK(same_tables(read_structure_file(NILCONTROL_DATA_DIR "/free_2_3.txt"),
                    free_structure_constants(hall_basis(2, 3))));
}
