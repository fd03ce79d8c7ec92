#include "nilcontrol/artifacts.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nilcontrol/config.hpp"

namespace nilcontrol {

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  const auto n = log.x.empty() ? 0 : log.x.front().size();
  const auto m = log.u.empty() ? 0 : log.u.front().size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i + 1;
  for (Eigen::Index i = 0; i < m; ++i) out << ",u" << i + 1;
  out << ",V\n";
  const auto old = out.precision(17);
  for (std::size_t r = 0; r < log.t.size(); ++r) {
    out << log.t[r];
    for (Eigen::Index i = 0; i < n; ++i) out << "," << log.x[r](i);
    for (Eigen::Index i = 0; i < m; ++i) out << "," << log.u[r](i);
    out << "," << 0.5 * log.x[r].squaredNorm() << "\n";
  }
  out.precision(old);
}

nlohmann::json schedule_json(const ControlSchedule& schedule) {
  nlohmann::json rows = nlohmann::json::array();
  for (int k = 0; k < schedule.s(); ++k) {
    rows.push_back(vec_json(schedule.segments.row(k).transpose()));
  }
  return {{"segment_length", schedule.segment_length}, {"segments", rows}};
}

ControlSchedule schedule_from_json(const nlohmann::json& j) {
  ControlSchedule out;
  out.segment_length = j.at("segment_length").get<double>();
  const auto& rows = j.at("segments");
  const int s = static_cast<int>(rows.size());
  const int m = s ? static_cast<int>(rows.at(0).size()) : 0;
  out.segments.resize(s, m);
  for (int k = 0; k < s; ++k) {
    if (static_cast<int>(rows.at(k).size()) != m) {
      throw std::invalid_argument("ragged schedule");
    }
    for (int i = 0; i < m; ++i) out.segments(k, i) = rows.at(k).at(i).get<double>();
  }
  return out;
}

nlohmann::json summary_json(const TrajectoryLog& log) {
  nlohmann::json periods = nlohmann::json::array();
  for (const auto& p : log.periods) {
    periods.push_back({
        {"k", p.k},
        {"t", p.t},
        {"V", p.V},
        {"V_next", p.V_next},
        {"dV", p.dV},
        {"x_norm", p.x_norm},
        {"status", p.sp_called ? to_string(p.sp_status) : "skipped"},
        {"evals", p.sp_evals},
        {"penalty", p.penalty},
        {"residuals",
         {{"c_decrease", p.residuals.c_decrease},
          {"c_norm", p.residuals.c_norm},
          {"c_amp", p.residuals.c_amp}}},
        {"max_amplitude", p.max_amplitude},
        {"excursion_ratio", p.excursion_ratio},
        {"x", vec_json(p.x)},
        {"schedule", schedule_json(p.schedule)},
    });
  }
  std::ostringstream cfg;
  emit_config(cfg, log.config);
  const auto& c = log.config;
  return {
      {"model", c.model},
      {"config",
       {{"x0", c.x0},
        {"T", c.T},
        {"s", c.s},
        {"eta", c.eta},
        {"M", c.M_bound},
        {"C", c.C_bound},
        {"margin", c.margin},
        {"periods", c.periods},
        {"steps_per_segment", c.steps_per_segment},
        {"seed", c.seed},
        {"stop_norm", c.stop_norm},
        {"restarts", c.restarts},
        {"max_evals", c.max_evals},
        {"refinement", to_string(c.refinement)}}},
      {"aborted", log.aborted},
      {"message", log.message},
      {"empirical_K", empirical_excursion_rate(log)},
      {"final_state", log.x.empty() ? nlohmann::json::array() : vec_json(log.x.back())},
      {"periods", periods},
  };
}

void write_plot_script(std::ostream& out, const TrajectoryLog& log,
                       const std::string& csv_name,
                       const std::string& summary_name) {
  const auto n = log.x.empty() ? 0 : log.x.front().size();
  out << "# gnuplot script; run: gnuplot plots.gp\n";
  out << "set datafile separator ','\n";
  out << "set terminal pngcairo size 900,600\n";
  out << "set output 'states.png'\n";
  out << "set xlabel 't [s]'\nset ylabel 'x_i(t)'\nset key outside\n";
  out << "plot ";
  for (Eigen::Index i = 0; i < n; ++i) {
    out << (i ? ", \\\n     " : "") << "'" << csv_name << "' using 1:" << i + 2
        << " with lines title 'x" << i + 1 << "'";
  }
  out << "\n";
  out << "set output 'lyapunov.png'\n";
  out << "set xlabel 'k'\nset ylabel 'V(x(kT))'\nunset key\n";
  out << "# V(x(kT)) per period, extracted from " << summary_name << "\n";
  out << "$V << EOD\n";
  const auto old = out.precision(17);
  for (const auto& p : log.periods) out << p.k << " " << p.V << "\n";
  if (!log.periods.empty()) {
    out << log.periods.back().k + 1 << " " << log.periods.back().V_next << "\n";
  }
  out.precision(old);
  out << "EOD\n";
  out << "set datafile separator whitespace\n";
  out << "plot $V using 1:2 with linespoints pt 7\n";
}

nlohmann::json solution_json(const SPSolution& sol) {
  return {
      {"status", to_string(sol.status)},
      {"schedule", schedule_json(sol.schedule)},
      {"terminal_gamma", vec_json(sol.terminal_gamma.gamma)},
      {"residuals",
       {{"c_decrease", sol.residuals.c_decrease},
        {"c_norm", sol.residuals.c_norm},
        {"c_amp", sol.residuals.c_amp}}},
      {"penalty", sol.penalty},
      {"candidate_within_M", sol.candidate_within_M},
      {"stats",
       {{"evaluations", sol.stats.evaluations},
        {"iterations", sol.stats.iterations},
        {"starts", sol.stats.starts},
        {"winning_start", sol.stats.winning_start},
        {"seed", sol.stats.seed}}},
  };
}

ArtifactPaths write_artifacts(const TrajectoryLog& log, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  ArtifactPaths paths{(fs::path(dir) / "trajectory.csv").string(),
                      (fs::path(dir) / "summary.json").string(),
                      (fs::path(dir) / "plots.gp").string(),
                      (fs::path(dir) / "config.echo").string()};
  auto open = [](const std::string& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p);
    return f;
  };
  {
    auto f = open(paths.csv);
    write_trajectory_csv(f, log);
  }
  {
    auto f = open(paths.summary);
    f << summary_json(log).dump(2) << "\n";
  }
  {
    auto f = open(paths.plot);
    write_plot_script(f, log, "trajectory.csv", "summary.json");
  }
  {
    auto f = open(paths.config);
    emit_config(f, log.config);
  }
  return paths;
}

}  // namespace nilcontrol
