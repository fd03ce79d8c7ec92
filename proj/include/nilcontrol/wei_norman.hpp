#pragma once

// Wei-Norman coordinates: S(t) = exp(g_0 b_0) ... exp(g_{r-1} b_{r-1}) solves
// S' = (sum_i u_i b_i) S iff Gamma(g) g' = u, where column i of Gamma is
// exp(g_0 ad_0) ... exp(g_{i-1} ad_{i-1}) e_i.

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilcontrol/lie_algebra.hpp"

namespace nilcontrol {

struct GammaState {
  Eigen::VectorXd gamma;
  double time = 0.0;
};

// Piecewise-constant inputs: row k holds u^(k), applied on [k eps, (k+1) eps).
struct ControlSchedule {
  Eigen::MatrixXd segments;  // s x m
  double segment_length = 0.0;

  int s() const { return static_cast<int>(segments.rows()); }
  int m() const { return static_cast<int>(segments.cols()); }
  double horizon() const { return segment_length * s(); }
};

// Precomputed adjoint matrices of a spec.
class WeiNorman {
 public:
  explicit WeiNorman(const LieAlgebraSpec& spec);

  int dim() const { return r_; }
  const LieAlgebraSpec& spec() const { return spec_; }
  // True when every ad matrix is strictly lower triangular, so Gamma is
  // unit lower triangular and gamma_0' = 1.
  bool triangular() const { return lower_triangular_; }

  Eigen::MatrixXd gamma_matrix(const Eigen::VectorXd& gamma) const;
  // Gamma(gamma)^{-1} ud by forward substitution.
  Eigen::VectorXd rhs(const Eigen::VectorXd& gamma,
                      const Eigen::VectorXd& ud) const;

  // RK4 with `steps` equal steps of the flow driven by the constant drifted
  // control ud (ud(0) = 1), starting from gamma.
  Eigen::VectorXd advance(Eigen::VectorXd gamma, const Eigen::VectorXd& ud,
                          double duration, int steps) const;

 private:
  LieAlgebraSpec spec_;
  int r_ = 0;
  int order_ = 0;
  struct Entry {
    int row, col;
    double value;
  };
  using Sparse = std::vector<Entry>;
  std::vector<Eigen::MatrixXd> ad_;
  std::vector<Sparse> sparse_ad_;
  bool lower_triangular_ = true;
};

// Schedule inputs drive b_1 .. b_m; the drift b_0 always has input 1.
GammaState gamma_flow(const WeiNorman& wn, const ControlSchedule& schedule,
                      int steps_per_segment);
GammaState gamma_flow(const LieAlgebraSpec& spec,
                      const ControlSchedule& schedule, double T,
                      int steps_per_segment);

inline constexpr int kConstantFlowSteps = 32;

// Flow for the constant extended control v^d = (1, v).
GammaState constant_flow(const WeiNorman& wn, const Eigen::VectorXd& v,
                         double T, int steps = kConstantFlowSteps);

class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct InverseFlowResult {
  Eigen::VectorXd v;
  int iterations = 0;
  double residual = 0.0;  // max-abs mismatch of constant_flow(v) and gamma
};

// v = F(gamma, T).  For triangular specs a few chord steps with the exact
// diagonal Jacobian T I come first; Newton with a forward-difference
// Jacobian finishes (or does all the work otherwise).  Throws std::invalid_argument when gamma_0 differs from T
// by more than 1e-9 and NewtonFailure when Newton does not converge.
InverseFlowResult invert_constant_flow(const WeiNorman& wn,
                                       const Eigen::VectorXd& gamma, double T,
                                       int max_iterations = 20);

}  // namespace nilcontrol
