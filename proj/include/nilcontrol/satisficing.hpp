#pragma once

// The satisficing problem: find a piecewise-constant control whose terminal
// Wei-Norman coordinates gamma(T) satisfy F(gamma, T) in U^e(x), i.e.
//   grad V(x) . (g_0(x) + sum_i g_i(x) v_i) < -eta |x|^2,  |v| <= M |x|,
// with v = F(gamma, T), plus the amplitude bound max_k |u^(k)| <= C |x|.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilcontrol/models.hpp"
#include "nilcontrol/wei_norman.hpp"

namespace nilcontrol {

struct Residuals {
  double c_decrease = 0.0;
  double c_norm = 0.0;
  double c_amp = 0.0;
};

// Quantities of U^e(x) that only depend on x, computed once per state.
class MembershipTest {
 public:
  MembershipTest(const ModelSpec& model, const Eigen::VectorXd& x, double eta,
                 double M_bound);

  // (c_decrease, c_norm) of v; c_amp is left at zero.
  Residuals of_control(const Eigen::VectorXd& v) const;
  // Same for v = F(gamma, T).
  Residuals of_gamma(const WeiNorman& wn, const Eigen::VectorXd& gamma,
                     double T) const;

  const Eigen::VectorXd& x() const { return x_; }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd grad_dot_g_;  // grad V(x) . g_i(x), i = 0 .. r-1
  double eta_term_ = 0.0;       // eta |x|^2
  double norm_bound_ = 0.0;     // M |x|
};

Residuals membership_residuals(const ModelSpec& model, const Eigen::VectorXd& x,
                               const GammaState& gamma, double T, double eta,
                               double M_bound);

// v(x) = Q^+(x) (z(x) - g_0(x)) with z = -eps grad V(x) and
// Q^+ = Q^T (Q Q^T)^{-1}.  Throws std::invalid_argument for x = 0 and
// std::domain_error when Q(x) is rank deficient.
Eigen::VectorXd candidate_control(const ModelSpec& model,
                                     const Eigen::VectorXd& x, double eps);

GammaState target_gamma(const ModelSpec& model, const WeiNorman& wn,
                        const Eigen::VectorXd& x, double T, double eps);

struct SPInstance {
  Eigen::VectorXd x;
  double T = 0.1;
  int s = 6;
  double eta = 1.0;
  double M_bound = 10.0;
  double C_bound = 50.0;
  double margin = -1.0;  // negative: 1e-6 eta |x|^2
  double effective_margin() const;
};

// How a feasible schedule is improved before it is returned.  plain keeps the
// first feasible point; min_norm shrinks |F(gamma, T)|; plant_decrease
// lowers V at the end of the period as predicted by the plant fields.
enum class Refinement { plain, min_norm, plant_decrease };
std::string to_string(Refinement r);
// Throws std::invalid_argument for unknown names.
Refinement parse_refinement(const std::string& name);

struct SolverConfig {
  int restarts = 8;           // extra random starts after the first
  int max_evals = 6000;       // objective evaluations per start
  int stage1_evals = 3000;    // share of max_evals spent tracking gamma*
  int steps_per_segment = 8;
  double target_eps = -1.0;   // negative: 1.5 eta / zeta^2
  double step_fraction = 0.25;  // initial simplex step, relative to C |x|
  std::uint64_t seed = 1;
  bool parallel = true;       // run restarts concurrently (OpenMP)
  Refinement refinement = Refinement::plain;
  int refine_evals = 1500;    // budget of the refinement, per start
};

enum class SPStatus { feasible, infeasible, budget_exhausted };
std::string to_string(SPStatus status);

struct SolverStats {
  int evaluations = 0;
  int iterations = 0;
  int starts = 0;          // starts actually run
  int winning_start = -1;  // 0 = from the zero schedule
  std::uint64_t seed = 0;
};

struct SPSolution {
  ControlSchedule schedule;
  GammaState terminal_gamma;
  Residuals residuals;
  double penalty = 0.0;
  SPStatus status = SPStatus::infeasible;
  SolverStats stats;
  // Whether the linear candidate control (eps of the target) already satisfies
  // |v| <= M |x|; reported, not enforced.
  bool candidate_within_M = false;
};

struct ScheduleEvaluation {
  GammaState gamma;
  Eigen::VectorXd v;  // F(gamma, T); empty when the inversion failed
  Residuals residuals;
  double penalty = 0.0;
  bool feasible = false;
};

ScheduleEvaluation evaluate_schedule(const ModelSpec& model,
                                     const SPInstance& instance,
                                     const ControlSchedule& schedule,
                                     int steps_per_segment = 8);

SPSolution solve_sp(const ModelSpec& model, const SPInstance& instance,
                    const SolverConfig& config);

}  // namespace nilcontrol
