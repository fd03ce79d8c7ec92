#include "nilcontrol/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nilcontrol {

PlantTrajectory integrate_plant(const ModelSpec& model,
                                const Eigen::VectorXd& x0,
                                const ControlSchedule& schedule,
                                int steps_per_segment, double t0) {
  if (x0.size() != model.n) throw std::invalid_argument("state dimension mismatch");
  if (schedule.m() != model.m) {
    throw std::invalid_argument("schedule has " + std::to_string(schedule.m()) +
                                " inputs, model has " + std::to_string(model.m));
  }
  if (steps_per_segment < 1) throw std::invalid_argument("steps_per_segment < 1");
  PlantTrajectory traj;
  traj.t.push_back(t0);
  traj.x.push_back(x0);
  traj.u.push_back(Eigen::VectorXd::Zero(model.m));
  const double h = schedule.segment_length / steps_per_segment;
  Eigen::VectorXd x = x0;
  for (int k = 0; k < schedule.s(); ++k) {
    const Eigen::VectorXd u = schedule.segments.row(k).transpose();
    for (int n = 0; n < steps_per_segment; ++n) {
      const Eigen::VectorXd k1 = plant_rhs(model, x, u);
      const Eigen::VectorXd k2 = plant_rhs(model, x + 0.5 * h * k1, u);
      const Eigen::VectorXd k3 = plant_rhs(model, x + 0.5 * h * k2, u);
      const Eigen::VectorXd k4 = plant_rhs(model, x + h * k3, u);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      traj.t.push_back(t0 + k * schedule.segment_length + (n + 1) * h);
      traj.x.push_back(x);
      traj.u.push_back(u);
      if (!x.allFinite() || x.norm() > 10.0 * model.R) {
        traj.aborted = true;
        traj.message = "state diverged: |x| = " + std::to_string(x.norm()) +
                       " at t = " + std::to_string(traj.t.back());
        return traj;
      }
      if (model.guard) {
        if (auto issue = model.guard(x)) {
          traj.aborted = true;
          traj.message = *issue + " at t = " + std::to_string(traj.t.back());
          return traj;
        }
      }
    }
  }
  return traj;
}

TrajectoryLog run_closed_loop(const ModelSpec& model,
                              const SimulationConfig& config) {
  if (static_cast<int>(config.x0.size()) != model.n) {
    throw std::invalid_argument("x0 has " + std::to_string(config.x0.size()) +
                                " entries, model " + model.name + " needs " +
                                std::to_string(model.n));
  }
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
      config.x0.data(), static_cast<Eigen::Index>(config.x0.size()));
  if (x.norm() > model.R) {
    throw std::invalid_argument("x0 lies outside B(0, R)");
  }
  TrajectoryLog log;
  log.config = config;
  log.t.push_back(0.0);
  log.x.push_back(x);
  log.u.push_back(Eigen::VectorXd::Zero(model.m));

  SolverConfig solver;
  solver.restarts = config.restarts;
  solver.max_evals = config.max_evals;
  solver.stage1_evals = config.max_evals / 2;
  solver.steps_per_segment = config.steps_per_segment;
  solver.refinement = config.refinement;

  for (int k = 0; k < config.periods; ++k) {
    const double tk = k * config.T;
    if (x.norm() < config.stop_norm) break;
    PeriodSummary sum;
    sum.k = k;
    sum.t = tk;
    sum.x_norm = x.norm();
    sum.V = model.V(x);
    sum.x = x;

    ControlSchedule schedule;
    schedule.segment_length = config.T / config.s;
    if (x.isZero(0.0)) {
      schedule.segments = Eigen::MatrixXd::Zero(config.s, model.m);
    } else {
      SPInstance inst;
      inst.x = x;
      inst.T = config.T;
      inst.s = config.s;
      inst.eta = config.eta;
      inst.M_bound = config.M_bound;
      inst.C_bound = config.C_bound;
      inst.margin = config.margin;
      // Each period gets its own sub-seed derived from the run seed.
      solver.seed = config.seed * 1000003ULL + static_cast<std::uint64_t>(k);
      const SPSolution sol = solve_sp(model, inst, solver);
      schedule = sol.schedule;
      sum.sp_called = true;
      sum.sp_status = sol.status;
      sum.sp_evals = sol.stats.evaluations;
      sum.residuals = sol.residuals;
      sum.penalty = sol.penalty;
    }
    sum.schedule = schedule;
    for (int i = 0; i < schedule.s(); ++i) {
      sum.max_amplitude = std::max(sum.max_amplitude, schedule.segments.row(i).norm());
    }

    const PlantTrajectory traj =
        integrate_plant(model, x, schedule, config.steps_per_segment, tk);
    double peak = x.norm();
    for (std::size_t i = 1; i < traj.t.size(); ++i) {
      log.t.push_back(traj.t[i]);
      log.x.push_back(traj.x[i]);
      log.u.push_back(traj.u[i]);
      peak = std::max(peak, traj.x[i].norm());
    }
    x = traj.final_state();
    sum.V_next = model.V(x);
    sum.dV = sum.V_next - sum.V;
    sum.excursion_ratio = sum.x_norm > 0 ? peak / sum.x_norm : 1.0;
    log.periods.push_back(sum);
    if (traj.aborted) {
      log.aborted = true;
      log.message = traj.message;
      break;
    }
  }
  return log;
}

TrajectoryLog run_closed_loop(const SimulationConfig& config) {
  return run_closed_loop(make_model(config.model), config);
}

std::vector<TrajectoryLog> run_sweep(const std::vector<SimulationConfig>& configs,
                                     bool parallel) {
  std::vector<TrajectoryLog> logs(configs.size());
  const int n = static_cast<int>(configs.size());
  if (parallel) {
#if defined(NILCONTROL_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int i = 0; i < n; ++i) logs[i] = run_closed_loop(configs[i]);
  } else {
    for (int i = 0; i < n; ++i) logs[i] = run_closed_loop(configs[i]);
  }
  return logs;
}

DecreaseReport check_periodic_decrease(const TrajectoryLog& log, double eta,
                                       double T, DecreaseMode mode,
                                       double tol) {
  DecreaseReport report;
  report.worst_slack = -std::numeric_limits<double>::infinity();
  for (const auto& p : log.periods) {
    const double bound =
        mode == DecreaseMode::strict ? -0.5 * eta * p.x_norm * p.x_norm * T : 0.0;
    const bool ok = mode == DecreaseMode::strict ? p.dV <= bound + tol : p.dV < 0;
    report.period_ok.push_back(ok);
    report.all_ok = report.all_ok && ok;
    report.worst_slack = std::max(report.worst_slack, p.dV - bound);
  }
  if (log.periods.empty()) report.worst_slack = 0.0;
  return report;
}

double empirical_excursion_rate(const TrajectoryLog& log) {
  const double T = log.config.T;
  double K = 0.0;
  for (const auto& p : log.periods) {
    if (p.excursion_ratio > 0) K = std::max(K, std::log(p.excursion_ratio) / T);
  }
  return K;
}

FlowCheck flow_correspondence_check(const ModelSpec& model,
                                    const ControlSchedule& schedule,
                                    const Eigen::VectorXd& x,
                                    int steps_per_segment, int steps_per_flow) {
  if (static_cast<int>(model.extended_fields.size()) != model.r()) {
    throw std::invalid_argument("model lacks a vector field for every basis element");
  }
  FlowCheck out;
  out.gamma = gamma_flow(WeiNorman(model.algebra), schedule,
                         std::max(steps_per_segment, 4));
  out.direct =
      integrate_plant(model, x, schedule, steps_per_segment).final_state();
  Eigen::VectorXd y = x;
  for (int i = model.r() - 1; i >= 0; --i) {
    const double tau = out.gamma.gamma(i);
    if (tau == 0.0) continue;
    const double h = tau / steps_per_flow;
    const auto g = [&](const Eigen::VectorXd& z) { return basis_field(model, i, z); };
    for (int n = 0; n < steps_per_flow; ++n) {
      const Eigen::VectorXd k1 = g(y);
      const Eigen::VectorXd k2 = g(y + 0.5 * h * k1);
      const Eigen::VectorXd k3 = g(y + 0.5 * h * k2);
      const Eigen::VectorXd k4 = g(y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  out.composed = y;
  out.error = (out.composed - out.direct).norm();
  return out;
}

}  // namespace nilcontrol
