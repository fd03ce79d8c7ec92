#include "nilcontrol/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "nilcontrol/models.hpp"

namespace nilcontrol {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& text) {
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (trim(text.substr(used)) != "") throw std::invalid_argument("bad number '" + text + "'");
  return v;
}

long long to_integer(const std::string& text) {
  std::size_t used = 0;
  const long long v = std::stoll(text, &used);
  if (trim(text.substr(used)) != "") throw std::invalid_argument("bad integer '" + text + "'");
  return v;
}

}  // namespace

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty entry in '" + text + "'");
    out.push_back(to_number(item));
  }
  return out;
}

std::vector<double> default_x0(const std::string& model) {
  if (model == "rigid_body") return {-0.1, 0.0, 0.2, 0.0, 0.0, 0.1};
  if (model == "chained_drift") return {0.1, -0.1, 0.2};
  throw std::invalid_argument("unknown model '" + model + "'");
}

void validate_config(const SimulationConfig& c) {
  const auto names = model_names();
  if (std::find(names.begin(), names.end(), c.model) == names.end()) {
    throw ConfigError(0, "unregistered model '" + c.model + "'");
  }
  auto positive = [](const char* key, double v) {
    if (!(v > 0)) throw ConfigError(0, std::string(key) + " must be positive");
  };
  positive("T", c.T);
  positive("s", c.s);
  positive("eta", c.eta);
  positive("M", c.M_bound);
  positive("C", c.C_bound);
  positive("periods", c.periods);
  positive("max_evals", c.max_evals);
  if (c.steps_per_segment < 4) throw ConfigError(0, "steps_per_segment must be >= 4");
  if (c.restarts < 0) throw ConfigError(0, "restarts must be >= 0");
  if (!(c.stop_norm >= 0)) throw ConfigError(0, "stop_norm must be >= 0");
  const auto n = make_model(c.model).n;
  if (static_cast<int>(c.x0.size()) != n) {
    throw ConfigError(0, "x0 has " + std::to_string(c.x0.size()) +
                             " entries, model " + c.model + " needs " +
                             std::to_string(n));
  }
}

SimulationConfig parse_config(std::istream& in) {
  SimulationConfig c;
  bool have_x0 = false;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(lineno, "missing value for '" + key + "'");
    try {
      auto positive = [&](double v) {
        if (!(v > 0)) throw ConfigError(lineno, key + " must be positive");
        return v;
      };
      if (key == "model") {
        const auto names = model_names();
        if (std::find(names.begin(), names.end(), value) == names.end()) {
          throw ConfigError(lineno, "unregistered model '" + value + "'");
        }
        c.model = value;
      } else if (key == "x0") {
        c.x0 = parse_csv_numbers(value);
        have_x0 = true;
      } else if (key == "T") {
        c.T = positive(to_number(value));
      } else if (key == "s") {
        c.s = static_cast<int>(positive(static_cast<double>(to_integer(value))));
      } else if (key == "eta") {
        c.eta = positive(to_number(value));
      } else if (key == "M") {
        c.M_bound = positive(to_number(value));
      } else if (key == "C") {
        c.C_bound = positive(to_number(value));
      } else if (key == "margin") {
        c.margin = to_number(value);
      } else if (key == "periods") {
        c.periods = static_cast<int>(positive(static_cast<double>(to_integer(value))));
      } else if (key == "steps_per_segment") {
        c.steps_per_segment = static_cast<int>(to_integer(value));
        if (c.steps_per_segment < 4) {
          throw ConfigError(lineno, "steps_per_segment must be >= 4");
        }
      } else if (key == "seed") {
        const long long v = to_integer(value);
        if (v < 0) throw ConfigError(lineno, "seed must be >= 0");
        c.seed = static_cast<std::uint64_t>(v);
      } else if (key == "stop_norm") {
        c.stop_norm = to_number(value);
        if (c.stop_norm < 0) throw ConfigError(lineno, "stop_norm must be >= 0");
      } else if (key == "restarts") {
        c.restarts = static_cast<int>(to_integer(value));
        if (c.restarts < 0) throw ConfigError(lineno, "restarts must be >= 0");
      } else if (key == "max_evals") {
        c.max_evals = static_cast<int>(positive(static_cast<double>(to_integer(value))));
      } else if (key == "refinement") {
        c.refinement = parse_refinement(value);
      } else if (key == "output_dir") {
        c.output_dir = value;
      } else {
        throw ConfigError(lineno, "unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(lineno, e.what());
    }
  }
  if (!have_x0) c.x0 = default_x0(c.model);
  validate_config(c);
  return c;
}

SimulationConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open " + path);
  return parse_config(in);
}

void emit_config(std::ostream& out, const SimulationConfig& c) {
  const auto old = out.precision(17);
  out << "model = " << c.model << "\n";
  out << "x0 = ";
  for (std::size_t i = 0; i < c.x0.size(); ++i) out << (i ? ", " : "") << c.x0[i];
  out << "\n";
  out << "T = " << c.T << "\n";
  out << "s = " << c.s << "\n";
  out << "eta = " << c.eta << "\n";
  out << "M = " << c.M_bound << "\n";
  out << "C = " << c.C_bound << "\n";
  out << "margin = " << c.margin << "\n";
  out << "periods = " << c.periods << "\n";
  out << "steps_per_segment = " << c.steps_per_segment << "\n";
  out << "seed = " << c.seed << "\n";
  out << "stop_norm = " << c.stop_norm << "\n";
  out << "restarts = " << c.restarts << "\n";
  out << "max_evals = " << c.max_evals << "\n";
  out << "refinement = " << to_string(c.refinement) << "\n";
  out << "output_dir = " << c.output_dir << "\n";
  out.precision(old);
}

}  // namespace nilcontrol
