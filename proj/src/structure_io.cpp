#include "nilcontrol/structure_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nilcontrol {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  std::size_t pos = 0;
  auto parse_int = [&](const std::string& s) -> std::int64_t {
    std::size_t used = 0;
    const auto v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + text);
    return v;
  };
  if ((pos = text.find('/')) != std::string::npos) {
    const auto den = parse_int(text.substr(pos + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    return Rational(parse_int(text.substr(0, pos)), den);
  }
  if ((pos = text.find('.')) != std::string::npos) {
    // Exact decimal: "-0.25" -> -1/4.
    const std::string frac = text.substr(pos + 1);
    if (frac.size() > 15) throw std::invalid_argument("too many digits: " + text);
    std::string whole = text.substr(0, pos);
    const bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    if (frac.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("bad number: " + text);
    }
    const std::int64_t w = parse_int(whole);
    Rational out(w);
    out += Rational(negative ? -f : f, den);
    return out;
  }
  return Rational(parse_int(text));
}

LieAlgebraSpec read_structure(std::istream& in) {
  int dim = -1;
  int order = -1;
  BracketTable table;
  std::map<int, BasisElement> declared;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream line(raw);
    std::string keyword;
    if (!(line >> keyword)) continue;
    try {
      if (keyword == "dim") {
        if (!(line >> dim) || dim < 1) throw ParseError(lineno, "bad dim");
      } else if (keyword == "order") {
        if (!(line >> order) || order < 1) throw ParseError(lineno, "bad order");
      } else if (keyword == "element") {
        BasisElement e;
        if (!(line >> e.index >> e.degree) || e.degree < 1) {
          throw ParseError(lineno, "expected: element INDEX DEGREE [LABEL]");
        }
        std::getline(line >> std::ws, e.label);
        declared[e.index] = e;
      } else if (keyword == "bracket") {
        int i = 0, j = 0;
        std::string eq;
        if (!(line >> i >> j >> eq) || eq != "=") {
          throw ParseError(lineno, "expected: bracket I J = K:COEF ...");
        }
        LieVector value;
        std::string item;
        while (line >> item) {
          const auto colon = item.find(':');
          if (colon == std::string::npos) {
            throw ParseError(lineno, "expected K:COEF, got '" + item + "'");
          }
          value.push_back({std::stoi(item.substr(0, colon)),
                           parse_rational(item.substr(colon + 1))});
        }
        auto& slot = table[{i, j}];
        slot = add(slot, value);
      } else {
        throw ParseError(lineno, "unknown record '" + keyword + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (dim < 0) throw ParseError(lineno, "missing 'dim' header");
  if (order < 0) throw ParseError(lineno, "missing 'order' header");

  for (const auto& [key, value] : table) {
    if (key.first < 0 || key.first >= dim || key.second < 0 ||
        key.second >= dim) {
      throw ParseError(0, "bracket index outside [0, dim)");
    }
    for (const auto& t : value) {
      if (t.index < 0 || t.index >= dim) {
        throw ParseError(0, "result index outside [0, dim)");
      }
    }
  }

  table = antisymmetric_completion(std::move(table));

  std::vector<BasisElement> basis(dim);
  std::vector<bool> known(dim, false);
  for (const auto& [idx, e] : declared) {
    if (idx < 0 || idx >= dim) throw ParseError(0, "element index out of range");
    basis[idx] = e;
    known[idx] = true;
  }
  std::vector<bool> produced(dim, false);
  for (const auto& [key, value] : table) {
    for (const auto& t : value) produced[t.index] = true;
  }
  for (int i = 0; i < dim; ++i) {
    if (!known[i] && !produced[i]) {
      basis[i] = {i, 1, std::nullopt, "b" + std::to_string(i)};
      known[i] = true;
    }
  }
  // Propagate degrees through brackets in index order until stable.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [key, value] : table) {
      const auto [i, j] = key;
      if (i > j || !known[i] || !known[j]) continue;
      for (const auto& t : value) {
        if (known[t.index]) continue;
        basis[t.index] = {t.index, basis[i].degree + basis[j].degree,
                          std::make_pair(i, j),
                          "[" + basis[i].label + "," + basis[j].label + "]"};
        known[t.index] = true;
        changed = true;
      }
    }
  }
  for (int i = 0; i < dim; ++i) {
    if (!known[i]) throw ParseError(0, "cannot infer degree of element " +
                                           std::to_string(i));
    basis[i].index = i;
  }
  return LieAlgebraSpec(std::move(basis), order, std::move(table));
}

LieAlgebraSpec read_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_structure(in);
}

void write_structure(std::ostream& out, const LieAlgebraSpec& spec) {
  out << "dim " << spec.dim() << "\n";
  out << "order " << spec.nilpotency_order() << "\n";
  for (const auto& e : spec.basis()) {
    out << "element " << e.index << " " << e.degree;
    if (!e.label.empty()) out << " " << e.label;
    out << "\n";
  }
  for (const auto& [key, value] : spec.table()) {
    if (key.first > key.second &&
        value == scale(spec.bracket(key.second, key.first), Rational(-1))) {
      continue;
    }
    out << "bracket " << key.first << " " << key.second << " =";
    for (const auto& t : value) {
      out << " " << t.index << ":" << t.coef.numerator();
      if (t.coef.denominator() != 1) out << "/" << t.coef.denominator();
    }
    out << "\n";
  }
}

}  // namespace nilcontrol
