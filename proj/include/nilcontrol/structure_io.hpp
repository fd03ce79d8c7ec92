#pragma once

// Line-oriented structure-constant files:
//
//   # comment
//   dim 4
//   order 2
//   element 3 2 [X1,X3]        (optional: index, degree, label)
//   bracket 0 2 = 3:1
//   bracket 1 4 = 5:-1/2 6:3
//
// Missing `element` records are inferred: indices never produced by a bracket
// are generators, every other index takes the degree of the first bracket
// that produces it.  A bracket given in one orientation only is completed
// antisymmetrically; both orientations given are kept verbatim.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "nilcontrol/lie_algebra.hpp"

namespace nilcontrol {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

Rational parse_rational(const std::string& text);

LieAlgebraSpec read_structure(std::istream& in);
LieAlgebraSpec read_structure_file(const std::string& path);
void write_structure(std::ostream& out, const LieAlgebraSpec& spec);

}  // namespace nilcontrol
