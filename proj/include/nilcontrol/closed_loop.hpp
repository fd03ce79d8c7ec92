#pragma once

// Receding-horizon feedback: at t_k = kT solve SP at x(t_k) and apply the
// schedule to the true plant for one period.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilcontrol/models.hpp"
#include "nilcontrol/satisficing.hpp"

namespace nilcontrol {

struct PlantTrajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;  // input held on the step ending at t
  bool aborted = false;
  std::string message;

  const Eigen::VectorXd& final_state() const { return x.back(); }
};

// RK4 on the plant, `steps_per_segment` steps per schedule segment.  Stops
// (aborted = true) when |x| exceeds 10 R or the model guard fires.
PlantTrajectory integrate_plant(const ModelSpec& model,
                                const Eigen::VectorXd& x0,
                                const ControlSchedule& schedule,
                                int steps_per_segment, double t0 = 0.0);

struct SimulationConfig {
  std::string model = "rigid_body";
  std::vector<double> x0;
  double T = 0.1;
  int s = 6;
  double eta = 1.0;
  double M_bound = 10.0;
  double C_bound = 50.0;
  double margin = -1.0;  // negative: 1e-6 eta |x|^2
  int periods = 35;
  int steps_per_segment = 8;  // plant and gamma integration
  std::uint64_t seed = 1;
  double stop_norm = 1e-4;
  int restarts = 8;
  int max_evals = 6000;
  Refinement refinement = Refinement::plain;
  std::string output_dir = "out";

  bool operator==(const SimulationConfig&) const = default;
};

struct PeriodSummary {
  int k = 0;
  double t = 0.0;
  double x_norm = 0.0;  // |x(t_k)|
  double V = 0.0;       // V(x(t_k))
  double V_next = 0.0;  // V(x(t_{k+1}))
  double dV = 0.0;
  SPStatus sp_status = SPStatus::feasible;
  bool sp_called = false;
  int sp_evals = 0;
  Residuals residuals;
  double penalty = 0.0;
  double max_amplitude = 0.0;   // max_k |u^(k)|
  double excursion_ratio = 1.0;  // max over the period of |x| / |x(t_k)|
  Eigen::VectorXd x;             // x(t_k)
  ControlSchedule schedule;      // applied on [t_k, t_{k+1})
};

struct TrajectoryLog {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;
  std::vector<PeriodSummary> periods;
  SimulationConfig config;
  bool aborted = false;
  std::string message;
};

TrajectoryLog run_closed_loop(const ModelSpec& model,
                              const SimulationConfig& config);
TrajectoryLog run_closed_loop(const SimulationConfig& config);

// Independent runs, concurrently when built with OpenMP and parallel = true.
std::vector<TrajectoryLog> run_sweep(const std::vector<SimulationConfig>& configs,
                                     bool parallel = true);

enum class DecreaseMode { strict, relaxed };

struct DecreaseReport {
  std::vector<bool> period_ok;
  bool all_ok = true;
  double worst_slack = 0.0;  // max over periods of dV - bound
};

// strict: dV_k <= -(eta/2) |x(t_k)|^2 T + tol; relaxed: dV_k < 0.
DecreaseReport check_periodic_decrease(const TrajectoryLog& log, double eta,
                                       double T, DecreaseMode mode,
                                       double tol = 1e-6);

// Empirical Gronwall constant K with max excursion <= |x(t_k)| e^{K T}.
double empirical_excursion_rate(const TrajectoryLog& log);

struct FlowCheck {
  double error = 0.0;
  Eigen::VectorXd composed;
  Eigen::VectorXd direct;
  GammaState gamma;
};

// Rebuilds x(T) from gamma(T) as exp(gamma_0 g_0) ... exp(gamma_{r-1} g_{r-1})
// acting on x, the rightmost factor first, and compares with the plant.
FlowCheck flow_correspondence_check(const ModelSpec& model,
                                    const ControlSchedule& schedule,
                                    const Eigen::VectorXd& x,
                                    int steps_per_segment = 64,
                                    int steps_per_flow = 200);

}  // namespace nilcontrol
