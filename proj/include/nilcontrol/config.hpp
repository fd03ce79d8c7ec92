#pragma once

// Simulation configuration files: one `key = value` per line, `#` comments.
//
//   model = rigid_body
//   x0 = -0.1, 0, 0.2, 0, 0, 0.1
//   T = 0.1
//
// Keys: model x0 T s eta M C margin periods steps_per_segment seed
// stop_norm restarts max_evals refinement output_dir.  Missing keys keep the defaults
// of SimulationConfig; a missing x0 takes the model's default state.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilcontrol/closed_loop.hpp"

namespace nilcontrol {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

std::vector<double> default_x0(const std::string& model);

SimulationConfig parse_config(std::istream& in);
SimulationConfig parse_config_file(const std::string& path);
// Throws ConfigError when a field is out of range.
void validate_config(const SimulationConfig& config);
void emit_config(std::ostream& out, const SimulationConfig& config);

std::vector<double> parse_csv_numbers(const std::string& text);

}  // namespace nilcontrol
