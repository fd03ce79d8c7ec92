#include "nilcontrol/wei_norman.hpp"

#include <algorithm>
#include <cmath>

namespace nilcontrol {

WeiNorman::WeiNorman(const LieAlgebraSpec& spec)
    : spec_(spec), r_(spec.dim()), order_(spec.nilpotency_order()) {
  for (int i = 0; i < r_; ++i) {
    ad_.push_back(adjoint_matrix(spec_, i).entries);
    const auto& a = ad_.back();
    for (int k = 0; k < r_; ++k) {
      for (int j = k; j < r_; ++j) {
        if (a(k, j) != 0.0) lower_triangular_ = false;
      }
    }
    Sparse s;
    for (int j = 0; j < r_; ++j) {
      for (int k = 0; k < r_; ++k) {
        if (a(k, j) != 0.0) s.push_back({k, j, a(k, j)});
      }
    }
    sparse_ad_.push_back(std::move(s));
  }
}

Eigen::MatrixXd WeiNorman::gamma_matrix(const Eigen::VectorXd& gamma) const {
  if (gamma.size() != r_) {
    throw std::invalid_argument("gamma has dimension " +
                                std::to_string(gamma.size()) + ", expected " +
                                std::to_string(r_));
  }
  Eigen::MatrixXd G(r_, r_);
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(r_, r_);
  Eigen::MatrixXd term(r_, r_), next(r_, r_);
  for (int i = 0; i < r_; ++i) {
    G.col(i) = prod.col(i);
    if (i + 1 == r_ || gamma(i) == 0.0 || sparse_ad_[i].empty()) continue;
    // prod <- prod * exp(gamma_i ad_i), one sparse product per series term.
    term = prod;
    for (int p = 1; p <= order_; ++p) {
      next.setZero();
      for (const auto& e : sparse_ad_[i]) {
        next.col(e.col) += e.value * term.col(e.row);
      }
      term = (gamma(i) / p) * next;
      if (term.isZero(0.0)) break;
      prod += term;
    }
  }
  return G;
}

Eigen::VectorXd WeiNorman::rhs(const Eigen::VectorXd& gamma,
                               const Eigen::VectorXd& ud) const {
  const Eigen::MatrixXd G = gamma_matrix(gamma);
  if (lower_triangular_) {
    return G.triangularView<Eigen::UnitLower>().solve(ud);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(G);
  if (!(std::abs(lu.determinant()) > 1e-300)) {
    throw std::logic_error("singular Wei-Norman matrix");
  }
  return lu.solve(ud);
}

Eigen::VectorXd WeiNorman::advance(Eigen::VectorXd g, const Eigen::VectorXd& ud,
                                   double duration, int steps) const {
  const double h = duration / steps;
  for (int n = 0; n < steps; ++n) {
    const Eigen::VectorXd k1 = rhs(g, ud);
    const Eigen::VectorXd k2 = rhs(g + 0.5 * h * k1, ud);
    const Eigen::VectorXd k3 = rhs(g + 0.5 * h * k2, ud);
    const Eigen::VectorXd k4 = rhs(g + h * k3, ud);
    g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return g;
}

GammaState gamma_flow(const WeiNorman& wn, const ControlSchedule& schedule,
                      int steps_per_segment) {
  if (steps_per_segment < 4) {
    throw std::invalid_argument("steps_per_segment must be at least 4");
  }
  const int r = wn.dim();
  if (schedule.m() + 1 > r) {
    throw std::invalid_argument("schedule has more inputs than the algebra");
  }
  GammaState out{Eigen::VectorXd::Zero(r), 0.0};
  Eigen::VectorXd ud = Eigen::VectorXd::Zero(r);
  ud(0) = 1.0;
  for (int k = 0; k < schedule.s(); ++k) {
    ud.segment(1, schedule.m()) = schedule.segments.row(k).transpose();
    out.gamma = wn.advance(std::move(out.gamma), ud, schedule.segment_length,
                           steps_per_segment);
  }
  out.time = schedule.horizon();
  // The drift coordinate obeys g_0' = 1 exactly; remove rounding drift.
  if (wn.triangular()) out.gamma(0) = out.time;
  return out;
}

GammaState gamma_flow(const LieAlgebraSpec& spec,
                      const ControlSchedule& schedule, double T,
                      int steps_per_segment) {
  if (std::abs(schedule.horizon() - T) > 1e-12 * std::max(1.0, T)) {
    throw std::invalid_argument("schedule does not cover [0, T]");
  }
  return gamma_flow(WeiNorman(spec), schedule, steps_per_segment);
}

GammaState constant_flow(const WeiNorman& wn, const Eigen::VectorXd& v,
                         double T, int steps) {
  const int r = wn.dim();
  if (v.size() != r - 1) {
    throw std::invalid_argument("extended control has dimension " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(r - 1));
  }
  Eigen::VectorXd ud(r);
  ud(0) = 1.0;
  ud.tail(r - 1) = v;
  GammaState out{wn.advance(Eigen::VectorXd::Zero(r), ud, T, steps), T};
  if (wn.triangular()) out.gamma(0) = T;
  return out;
}

InverseFlowResult invert_constant_flow(const WeiNorman& wn,
                                       const Eigen::VectorXd& gamma, double T,
                                       int max_iterations) {
  const int r = wn.dim();
  if (gamma.size() != r) throw std::invalid_argument("gamma dimension mismatch");
  if (!(T > 0)) throw std::invalid_argument("T must be positive");
  if (std::abs(gamma(0) - T) > 1e-9) {
    throw std::invalid_argument(
        "gamma_0 = " + std::to_string(gamma(0)) + " but T = " +
        std::to_string(T) +
        "; only terminal states of constant-control flows (gamma_0 = T) "
        "can be inverted");
  }
  const auto& basis = wn.spec().basis();
  InverseFlowResult result;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(r - 1);
  for (int i = 1; i < r; ++i) {
    if (basis[i].degree == 1) v(i - 1) = gamma(i) / T;
  }
  const Eigen::VectorXd target = gamma.tail(r - 1);
  auto residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return constant_flow(wn, w, T).gamma.tail(r - 1) - target;
  };
  const double tol = 1e-13 * std::max(1.0, target.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd res = residual(v);
  int it = 0;
  if (wn.triangular()) {
    // d gamma / d v is unit lower triangular times T, so the chord step with
    // Jacobian T I is exact one grading layer at a time.
    for (; it < r && res.lpNorm<Eigen::Infinity>() > tol; ++it) {
      v -= res / T;
      res = residual(v);
    }
  }
  Eigen::MatrixXd J(r - 1, r - 1);
  for (; it <= max_iterations; ++it) {
    result.residual = res.lpNorm<Eigen::Infinity>();
    if (result.residual <= tol) {
      result.v = v;
      result.iterations = it;
      return result;
    }
    if (it == max_iterations) break;
    for (int j = 0; j < r - 1; ++j) {
      Eigen::VectorXd w = v;
      const double h = 1e-7 * std::max(1.0, std::abs(v(j)));
      w(j) += h;
      J.col(j) = (residual(w) - res) / h;
    }
    v -= J.partialPivLu().solve(res);
    res = residual(v);
  }
  if (result.residual <= 1e-10 * std::max(1.0, target.lpNorm<Eigen::Infinity>())) {
    // Rounding floor reached before the tight tolerance; accept.
    result.v = v;
    result.iterations = max_iterations;
    return result;
  }
  throw NewtonFailure("Newton iteration for F did not converge, residual " +
                          std::to_string(result.residual),
                      result.residual);
}

}  // namespace nilcontrol
