#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "nilcontrol/artifacts.hpp"
#include "nilcontrol/closed_loop.hpp"
#include "nilcontrol/config.hpp"
#include "nilcontrol/lie_algebra.hpp"
#include "nilcontrol/models.hpp"
#include "nilcontrol/satisficing.hpp"
#include "nilcontrol/structure_io.hpp"
#include "nilcontrol/wei_norman.hpp"

namespace nilctl {

using namespace nilcontrol;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCheckFailed = 2;

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

// Rows separated by ';' or newlines, entries by ','.  A path to an existing
// file is read instead of being parsed literally.
Eigen::MatrixXd read_matrix(const std::string& arg) {
  std::string text = arg;
  if (std::ifstream f(arg); f) {
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  std::replace(text.begin(), text.end(), ';', '\n');
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_csv_numbers(line));
  }
  if (rows.empty()) throw std::invalid_argument("no numbers in '" + arg + "'");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw std::invalid_argument("ragged rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

void print_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, ", ", "\n", "", "", "", "");
  out << m.format(fmt) << "\n";
}

int hall_basis_cmd(int generators, int order, std::ostream& out) {
  const auto basis = hall_basis(generators, order);
  out << "index  degree  element\n";
  for (const auto& e : basis) {
    out << std::setw(5) << e.index << "  " << std::setw(6) << e.degree << "  "
        << e.label << "\n";
  }
  out << "\ndegree  count  witt\n";
  for (int d = 1; d <= order; ++d) {
    const auto count = std::count_if(basis.begin(), basis.end(),
                                     [d](const auto& e) { return e.degree == d; });
    out << std::setw(6) << d << "  " << std::setw(5) << count << "  "
        << std::setw(4) << witt_number(generators, d) << "\n";
  }
  out << "dimension " << basis.size() << "\n";
  return kOk;
}

int check_algebra_cmd(const std::string& path, std::ostream& out) {
  const LieAlgebraSpec spec = read_structure_file(path);
  const ValidationReport report = validate_spec(spec);
  out << "dim " << spec.dim() << ", order " << spec.nilpotency_order() << ", "
      << report.violations.size() << " violation(s)\n";
  for (const auto& v : report.violations) out << "  " << v.describe() << "\n";
  return report.ok() ? kOk : kCheckFailed;
}

int wei_norman_cmd(const std::string& path, const std::string& gamma_arg,
                   std::ostream& out) {
  const WeiNorman wn(read_structure_file(path));
  const Eigen::MatrixXd g = read_matrix(gamma_arg);
  if (g.size() != wn.dim()) {
    throw std::invalid_argument("gamma needs " + std::to_string(wn.dim()) + " entries");
  }
  const Eigen::VectorXd gamma = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
  const Eigen::MatrixXd G = wn.gamma_matrix(gamma);
  out << "Gamma(gamma):\n";
  print_matrix(out, G);
  out << "Gamma(gamma)^-1:\n";
  print_matrix(out, G.inverse());
  return kOk;
}

int flow_cmd(const std::string& path, const std::string& control, double T,
             int steps, std::ostream& out) {
  const WeiNorman wn(read_structure_file(path));
  ControlSchedule schedule;
  schedule.segments = read_matrix(control);
  schedule.segment_length = T / schedule.s();
  const GammaState g = gamma_flow(wn, schedule, steps);
  out << "gamma(" << T << "):\n";
  print_matrix(out, g.gamma.transpose());
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"nilpotent-algebra feedback toolkit", "nilctl"};
  app.require_subcommand(1);

  int generators = 2, order = 2;
  auto* hall = app.add_subcommand("hall-basis", "print a Hall basis and its dimensions");
  hall->add_option("--generators", generators)->required();
  hall->add_option("--order", order)->required();

  std::string spec_path;
  auto* check = app.add_subcommand("check-algebra", "validate a structure-constant file");
  check->add_option("--spec", spec_path)->required();

  std::string gamma_arg;
  auto* wn = app.add_subcommand("wei-norman", "print Gamma(gamma) and its inverse");
  wn->add_option("--spec", spec_path)->required();
  wn->add_option("--gamma", gamma_arg, "comma-separated gamma")->required();

  std::string control_arg;
  double T = 0.1;
  int steps = 8;
  auto* flow = app.add_subcommand("flow", "integrate gamma for a piecewise-constant control");
  flow->add_option("--spec", spec_path)->required();
  flow->add_option("--control", control_arg, "rows u^(k) separated by ';' or a file")
      ->required();
  flow->add_option("--T", T)->required();
  flow->add_option("--steps", steps, "RK4 steps per segment");

  std::string model_name = "rigid_body", x_arg;
  int s = 6, restarts = 8, max_evals = 6000;
  double eta = 1.0, M = 10.0, C = 50.0;
  std::uint64_t seed = 1;
  bool serial = false;
  auto* sp = app.add_subcommand("solve-sp", "solve the satisficing problem at one state");
  sp->add_option("--model", model_name);
  sp->add_option("--x", x_arg)->required();
  sp->add_option("--T", T);
  sp->add_option("--s", s);
  sp->add_option("--eta", eta);
  sp->add_option("--M", M);
  sp->add_option("--C", C);
  sp->add_option("--seed", seed);
  sp->add_option("--restarts", restarts);
  sp->add_option("--max-evals", max_evals);
  sp->add_flag("--serial", serial, "run restarts sequentially");

  std::vector<std::string> config_paths;
  std::string output_dir;
  auto* sim = app.add_subcommand("simulate", "run the closed loop and write artifacts");
  sim->add_option("--config", config_paths, "config file (repeat for a sweep)")
      ->required();
  sim->add_option("--output-dir", output_dir, "overrides output_dir");
  sim->add_flag("--serial", serial, "run a sweep sequentially");

  int count = 20;
  double tol = 1e-6;
  auto* fc = app.add_subcommand("flow-check",
                                "compare composed exponentials with the plant");
  fc->add_option("--model", model_name);
  fc->add_option("--x", x_arg, "state (default: the model's default x0)");
  fc->add_option("--T", T);
  fc->add_option("--s", s);
  fc->add_option("--count", count, "number of random schedules");
  fc->add_option("--amplitude", C, "schedule entries uniform in [-A, A]");
  fc->add_option("--seed", seed);
  fc->add_option("--tol", tol, "pass threshold for exactly nilpotent models");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    if (app.get_subcommands().size() == 1) err << app.get_subcommands()[0]->help();
    else err << app.help();
    return kUsage;
  }

  try {
    if (*hall) return hall_basis_cmd(generators, order, out);
    if (*check) return check_algebra_cmd(spec_path, out);
    if (*wn) return wei_norman_cmd(spec_path, gamma_arg, out);
    if (*flow) return flow_cmd(spec_path, control_arg, T, steps, out);
    if (*sp) {
      const ModelSpec model = make_model(model_name);
      SPInstance inst;
      inst.x = to_vector(parse_csv_numbers(x_arg));
      inst.T = T;
      inst.s = s;
      inst.eta = eta;
      inst.M_bound = M;
      inst.C_bound = C;
      SolverConfig cfg;
      cfg.seed = seed;
      cfg.restarts = restarts;
      cfg.max_evals = max_evals;
      cfg.stage1_evals = max_evals / 2;
      cfg.parallel = !serial;
      const SPSolution sol = solve_sp(model, inst, cfg);
      out << solution_json(sol).dump(2) << "\n";
      return sol.status == SPStatus::feasible ? kOk : kCheckFailed;
    }
    if (*sim) {
      std::vector<SimulationConfig> configs;
      for (const auto& p : config_paths) {
        configs.push_back(parse_config_file(p));
        if (!output_dir.empty()) {
          configs.back().output_dir =
              config_paths.size() == 1 ? output_dir
                                       : output_dir + "/run" + std::to_string(configs.size() - 1);
        }
      }
      const auto logs = run_sweep(configs, !serial);
      int status = kOk;
      for (const auto& log : logs) {
        const ModelSpec model = make_model(log.config.model);
        const ArtifactPaths paths = write_artifacts(log, log.config.output_dir);
        const DecreaseMode mode =
            model.exact_nilpotent ? DecreaseMode::strict : DecreaseMode::relaxed;
        const DecreaseReport rep =
            check_periodic_decrease(log, log.config.eta, log.config.T, mode);
        const int infeasible = static_cast<int>(std::count_if(
            log.periods.begin(), log.periods.end(), [](const PeriodSummary& p) {
              return p.sp_called && p.sp_status != SPStatus::feasible;
            }));
        out << log.config.model << ": " << log.periods.size() << " periods, V "
            << (log.periods.empty() ? 0.0 : log.periods.front().V) << " -> "
            << 0.5 * log.x.back().squaredNorm() << ", "
            << (mode == DecreaseMode::strict ? "strict" : "relaxed")
            << " decrease " << (rep.all_ok ? "passed" : "FAILED") << ", "
            << infeasible << " infeasible SP period(s)\n";
        out << "  wrote " << paths.csv << ", " << paths.summary << ", "
            << paths.plot << "\n";
        if (log.aborted) {
          out << "  aborted: " << log.message << "\n";
          status = kCheckFailed;
        }
        if (!rep.all_ok) status = kCheckFailed;
      }
      return status;
    }
    if (*fc) {
      const ModelSpec model = make_model(model_name);
      const Eigen::VectorXd x = x_arg.empty() ? to_vector(default_x0(model_name))
                                              : to_vector(parse_csv_numbers(x_arg));
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> dist(-C, C);
      double worst = 0.0;
      for (int i = 0; i < count; ++i) {
        ControlSchedule schedule;
        schedule.segment_length = T / s;
        schedule.segments.resize(s, model.m);
        for (int k = 0; k < s; ++k) {
          for (int j = 0; j < model.m; ++j) schedule.segments(k, j) = dist(rng);
        }
        const FlowCheck r = flow_correspondence_check(model, schedule, x);
        worst = std::max(worst, r.error);
        out << "schedule " << i << ": error " << std::setprecision(6) << r.error << "\n";
      }
      out << "max error " << worst << "\n";
      if (model.exact_nilpotent && !(worst <= tol)) return kCheckFailed;
      return kOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace nilctl
