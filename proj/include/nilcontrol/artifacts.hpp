#pragma once

// Run outputs: trajectory CSV (t, x1..xn, u1..um, V), JSON summary and a
// gnuplot script for the state and V(x(kT)) plots.

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "nilcontrol/closed_loop.hpp"

namespace nilcontrol {

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
nlohmann::json summary_json(const TrajectoryLog& log);
void write_plot_script(std::ostream& out, const TrajectoryLog& log,
                       const std::string& csv_name,
                       const std::string& summary_name);

nlohmann::json solution_json(const SPSolution& sol);
nlohmann::json schedule_json(const ControlSchedule& schedule);
ControlSchedule schedule_from_json(const nlohmann::json& j);

struct ArtifactPaths {
  std::string csv, summary, plot, config;
};

// Writes trajectory.csv, summary.json, plots.gp and config.echo into `dir`.
ArtifactPaths write_artifacts(const TrajectoryLog& log, const std::string& dir);

}  // namespace nilcontrol
