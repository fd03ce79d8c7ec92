#include "nilcontrol/satisficing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "nilcontrol/nelder_mead.hpp"

namespace nilcontrol {

MembershipTest::MembershipTest(const ModelSpec& model,
                               const Eigen::VectorXd& x, double eta,
                               double M_bound)
    : x_(x) {
  if (x.size() != model.n) {
    throw std::invalid_argument("state has dimension " +
                                std::to_string(x.size()) + ", model " +
                                model.name + " expects " +
                                std::to_string(model.n));
  }
  const Eigen::VectorXd grad = model.grad_V(x);
  grad_dot_g_.resize(model.r());
  for (int i = 0; i < model.r(); ++i) {
    grad_dot_g_(i) = grad.dot(basis_field(model, i, x));
  }
  eta_term_ = eta * x.squaredNorm();
  norm_bound_ = M_bound * x.norm();
}

Residuals MembershipTest::of_control(const Eigen::VectorXd& v) const {
  Residuals out;
  out.c_decrease =
      grad_dot_g_(0) + grad_dot_g_.tail(v.size()).dot(v) + eta_term_;
  out.c_norm = v.norm() - norm_bound_;
  return out;
}

Residuals MembershipTest::of_gamma(const WeiNorman& wn,
                                   const Eigen::VectorXd& gamma,
                                   double T) const {
  return of_control(invert_constant_flow(wn, gamma, T).v);
}

Residuals membership_residuals(const ModelSpec& model, const Eigen::VectorXd& x,
                               const GammaState& gamma, double T, double eta,
                               double M_bound) {
  const MembershipTest test(model, x, eta, M_bound);
  return test.of_gamma(WeiNorman(model.algebra), gamma.gamma, T);
}

Eigen::VectorXd candidate_control(const ModelSpec& model,
                                     const Eigen::VectorXd& x, double eps) {
  if (x.size() != model.n) throw std::invalid_argument("state dimension mismatch");
  if (x.isZero(0.0)) throw std::invalid_argument("candidate undefined at x = 0");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const ExtendedBasis q = extended_basis_matrix(model, x);
  if (!q.full_rank()) {
    throw std::domain_error("Q(x) has rank " + std::to_string(q.rank.rank) +
                            " < " + std::to_string(model.n));
  }
  const Eigen::VectorXd z = -eps * model.grad_V(x);
  const Eigen::VectorXd rhs = z - basis_field(model, 0, x);
  const Eigen::MatrixXd QQt = q.Q * q.Q.transpose();
  return q.Q.transpose() * QQt.ldlt().solve(rhs);
}

GammaState target_gamma(const ModelSpec& model, const WeiNorman& wn,
                        const Eigen::VectorXd& x, double T, double eps) {
  return constant_flow(wn, candidate_control(model, x, eps), T);
}

double SPInstance::effective_margin() const {
  return margin >= 0 ? margin : 1e-6 * eta * x.squaredNorm();
}

std::string to_string(SPStatus status) {
  switch (status) {
    case SPStatus::feasible: return "feasible";
    case SPStatus::infeasible: return "infeasible";
    case SPStatus::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

std::string to_string(Refinement r) {
  switch (r) {
    case Refinement::plain: return "plain";
    case Refinement::min_norm: return "min_norm";
    case Refinement::plant_decrease: return "plant_decrease";
  }
  return "unknown";
}

Refinement parse_refinement(const std::string& name) {
  for (Refinement r : {Refinement::plain, Refinement::min_norm, Refinement::plant_decrease}) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown refinement '" + name + "'");
}

namespace {

double hinge(double v) { return v > 0 ? v * v : 0.0; }

double sq(double v) { return v * v; }

class Problem {
 public:
  Problem(const ModelSpec& model, const SPInstance& inst, int steps)
      : model_(model),
        inst_(inst),
        wn_(model.algebra),
        test_(model, inst.x, inst.eta, inst.M_bound),
        m_(model.m),
        steps_(steps),
        margin_(inst.effective_margin()),
        amp_bound_(inst.C_bound * inst.x.norm()) {}

  const WeiNorman& wn() const { return wn_; }
  int params() const { return inst_.s * m_; }

  ControlSchedule schedule(const Eigen::VectorXd& p) const {
    ControlSchedule out;
    out.segments = Eigen::Map<const Eigen::MatrixXd>(p.data(), m_, inst_.s)
                       .transpose();
    out.segment_length = inst_.T / inst_.s;
    return out;
  }

  // Search coordinates -> schedule parameters: every segment is projected
  // onto the ball |u^(k)| <= C |x|, so c_amp <= 0 holds for all iterates.
  Eigen::VectorXd project(Eigen::VectorXd p) const {
    for (int k = 0; k < inst_.s; ++k) {
      auto seg = p.segment(k * m_, m_);
      const double nrm = seg.norm();
      if (nrm > amp_bound_) seg *= amp_bound_ / nrm;
    }
    return p;
  }

  Eigen::VectorXd gamma(const Eigen::VectorXd& p) const {
    return gamma_flow(wn_, schedule(p), steps_).gamma;
  }

  ScheduleEvaluation evaluate(const Eigen::VectorXd& p) const {
    ScheduleEvaluation ev;
    ev.gamma = gamma_flow(wn_, schedule(p), steps_);
    double amp = 0.0;
    for (int k = 0; k < inst_.s; ++k) {
      amp = std::max(amp, p.segment(k * m_, m_).norm());
    }
    try {
      ev.v = invert_constant_flow(wn_, ev.gamma.gamma, inst_.T).v;
      ev.residuals = test_.of_control(ev.v);
    } catch (const NewtonFailure&) {
      ev.residuals.c_decrease = std::numeric_limits<double>::infinity();
      ev.residuals.c_norm = std::numeric_limits<double>::infinity();
    }
    ev.residuals.c_amp = amp - amp_bound_;
    ev.penalty = hinge(ev.residuals.c_decrease + margin_) +
                 hinge(ev.residuals.c_norm) + hinge(ev.residuals.c_amp);
    if (!std::isfinite(ev.penalty)) ev.penalty = std::numeric_limits<double>::max();
    ev.feasible = ev.residuals.c_decrease < -margin_ &&
                  ev.residuals.c_norm <= 0 && ev.residuals.c_amp <= 0;
    return ev;
  }

  // V(x(T)) of the plant under the schedule, RK4 with steps_ per segment.
  double plant_V(const Eigen::VectorXd& p) const {
    const double h = inst_.T / (inst_.s * steps_);
    Eigen::VectorXd x = inst_.x;
    for (int k = 0; k < inst_.s; ++k) {
      const Eigen::VectorXd u = p.segment(k * m_, m_);
      for (int i = 0; i < steps_; ++i) {
        const Eigen::VectorXd k1 = plant_rhs(model_, x, u);
        const Eigen::VectorXd k2 = plant_rhs(model_, x + 0.5 * h * k1, u);
        const Eigen::VectorXd k3 = plant_rhs(model_, x + 0.5 * h * k2, u);
        const Eigen::VectorXd k4 = plant_rhs(model_, x + h * k3, u);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    return model_.V(x);
  }

  // Refinement cost of a feasible point, normalised by the state.
  double refinement_cost(const Eigen::VectorXd& p, const ScheduleEvaluation& ev,
                         Refinement mode) const {
    if (mode == Refinement::min_norm) return ev.v.squaredNorm() / inst_.x.squaredNorm();
    return plant_V(p) / model_.V(inst_.x);
  }

 private:
  const ModelSpec& model_;
  const SPInstance& inst_;
  WeiNorman wn_;
  MembershipTest test_;
  int m_;
  int steps_;
  double margin_;
  double amp_bound_;
};

struct StartResult {
  Eigen::VectorXd params;
  ScheduleEvaluation eval;
  int evals = 0;
  int iterations = 0;
};

// Stage 3: move inside the feasible set to lower the refinement cost.
StartResult refine(const Problem& problem, StartResult in, double step,
                   const SolverConfig& config) {
  if (config.refinement == Refinement::plain || config.refine_evals <= 0) return in;
  const double base = problem.refinement_cost(in.params, in.eval, config.refinement);
  const auto cost = [&](const Eigen::VectorXd& p) {
    const Eigen::VectorXd q = problem.project(p);
    const ScheduleEvaluation ev = problem.evaluate(q);
    if (!ev.feasible) return base + 1.0 + ev.penalty;
    return problem.refinement_cost(q, ev, config.refinement);
  };
  SimplexOptions o;
  o.max_evals = config.refine_evals;
  o.size_tol = 1e-9 * step;
  o.stop_below = -std::numeric_limits<double>::infinity();
  const SimplexResult r = minimize_simplex(
      cost, in.params, Eigen::VectorXd::Constant(in.params.size(), 0.1 * step), o);
  in.evals += r.evals + 1;
  in.iterations += r.iterations;
  const Eigen::VectorXd q = problem.project(r.x);
  ScheduleEvaluation ev = problem.evaluate(q);
  if (ev.feasible && problem.refinement_cost(q, ev, config.refinement) < base) {
    in.params = q;
    in.eval = std::move(ev);
  }
  return in;
}

StartResult run_start(const Problem& problem, const Eigen::VectorXd& start,
                      const Eigen::VectorXd& gamma_star, double step,
                      const SolverConfig& config) {
  StartResult out;
  const double scale = std::max(gamma_star.tail(gamma_star.size() - 1).norm(),
                                std::numeric_limits<double>::min());
  const Eigen::VectorXd steps = Eigen::VectorXd::Constant(start.size(), step);

  // Stage 1: track the target.
  SimplexOptions o1;
  o1.max_evals = std::min(config.stage1_evals, config.max_evals);
  o1.size_tol = 1e-9 * step;
  o1.stop_below = sq(1e-7);
  const auto track = [&](const Eigen::VectorXd& p) {
    return (problem.gamma(problem.project(p)) - gamma_star).squaredNorm() /
           sq(scale);
  };
  const SimplexResult s1 =
      minimize_simplex(track, problem.project(start), steps, o1);
  out.evals += s1.evals;
  out.iterations += s1.iterations;
  out.params = problem.project(s1.x);
  out.eval = problem.evaluate(out.params);
  ++out.evals;
  if (out.eval.feasible) return refine(problem, std::move(out), step, config);

  // Stage 2: satisfy the constraints.
  SimplexOptions o2;
  o2.max_evals = config.max_evals - out.evals;
  o2.size_tol = 1e-12 * step;
  o2.stop_below = 0.0;
  if (o2.max_evals <= 0) return out;
  const auto penalty = [&](const Eigen::VectorXd& p) {
    return problem.evaluate(problem.project(p)).penalty;
  };
  const Eigen::VectorXd steps2 = 0.1 * steps;
  const SimplexResult s2 = minimize_simplex(penalty, out.params, steps2, o2);
  out.evals += s2.evals;
  out.iterations += s2.iterations;
  const Eigen::VectorXd p2 = problem.project(s2.x);
  ScheduleEvaluation e2 = problem.evaluate(p2);
  ++out.evals;
  if (e2.penalty < out.eval.penalty || e2.feasible) {
    out.params = p2;
    out.eval = std::move(e2);
  }
  if (out.eval.feasible) return refine(problem, std::move(out), step, config);
  return out;
}

}  // namespace

ScheduleEvaluation evaluate_schedule(const ModelSpec& model,
                                     const SPInstance& instance,
                                     const ControlSchedule& schedule,
                                     int steps_per_segment) {
  if (schedule.s() != instance.s || schedule.m() != model.m) {
    throw std::invalid_argument("schedule shape does not match the instance");
  }
  const Problem problem(model, instance, steps_per_segment);
  Eigen::VectorXd p(instance.s * model.m);
  for (int k = 0; k < instance.s; ++k) {
    p.segment(k * model.m, model.m) = schedule.segments.row(k).transpose();
  }
  return problem.evaluate(p);
}

SPSolution solve_sp(const ModelSpec& model, const SPInstance& instance,
                    const SolverConfig& config) {
  if (!(instance.T > 0) || instance.s < 1 || !(instance.eta > 0) ||
      !(instance.M_bound > 0) || !(instance.C_bound > 0)) {
    throw std::invalid_argument("SP instance parameters must be positive");
  }
  if (instance.x.isZero(0.0)) {
    throw std::invalid_argument("SP is not posed at x = 0");
  }
  const Problem problem(model, instance, config.steps_per_segment);
  const double eps = config.target_eps > 0
                         ? config.target_eps
                         : 1.5 * instance.eta / (model.zeta * model.zeta);
  const Eigen::VectorXd v_star = candidate_control(model, instance.x, eps);
  const Eigen::VectorXd gamma_star =
      constant_flow(problem.wn(), v_star, instance.T).gamma;
  const double xnorm = instance.x.norm();
  const double amp = instance.C_bound * xnorm;
  const double step = std::max(config.step_fraction * amp, 1e-300);

  const int n = problem.params();
  const int total = 1 + std::max(config.restarts, 0);
  std::vector<StartResult> results(total);
  std::vector<char> done(total, 0);

  results[0] = run_start(problem, Eigen::VectorXd::Zero(n), gamma_star, step,
                         config);
  done[0] = 1;

  auto random_start = [&](int j) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(j)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> dist(-amp, amp);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = dist(rng);
    return p;
  };

  if (!results[0].eval.feasible && total > 1) {
    if (config.parallel) {
#if defined(NILCONTROL_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
      for (int j = 1; j < total; ++j) {
        results[j] = run_start(problem, random_start(j), gamma_star, step, config);
        done[j] = 1;
      }
    } else {
      for (int j = 1; j < total; ++j) {
        results[j] = run_start(problem, random_start(j), gamma_star, step, config);
        done[j] = 1;
        if (results[j].eval.feasible) break;
      }
    }
  }

  // First feasible start by index, else the smallest penalty.
  int winner = -1;
  for (int j = 0; j < total && winner < 0; ++j) {
    if (done[j] && results[j].eval.feasible) winner = j;
  }
  const bool feasible = winner >= 0;
  if (!feasible) {
    winner = 0;
    for (int j = 1; j < total; ++j) {
      if (results[j].eval.penalty < results[winner].eval.penalty) winner = j;
    }
  }
  const int counted = feasible ? winner + 1 : total;

  SPSolution sol;
  const StartResult& best = results[winner];
  sol.schedule = problem.schedule(best.params);
  sol.terminal_gamma = best.eval.gamma;
  sol.residuals = best.eval.residuals;
  sol.penalty = best.eval.penalty;
  sol.status = feasible ? SPStatus::feasible : SPStatus::budget_exhausted;
  sol.stats.seed = config.seed;
  sol.stats.winning_start = winner;
  sol.stats.starts = counted;
  for (int j = 0; j < counted; ++j) {
    sol.stats.evaluations += results[j].evals;
    sol.stats.iterations += results[j].iterations;
  }
  sol.candidate_within_M = v_star.norm() <= instance.M_bound * xnorm;
  return sol;
}

}  // namespace nilcontrol
