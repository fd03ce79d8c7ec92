#pragma once

// Derivative-free local minimisation (GSL's Nelder-Mead simplex).

#include <functional>

#include <Eigen/Dense>

namespace nilcontrol {

struct SimplexOptions {
  int max_evals = 2000;
  double size_tol = 1e-10;   // stop when the simplex is this small
  double stop_below = -1e300;  // stop as soon as f <= stop_below
};

struct SimplexResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evals = 0;
  int iterations = 0;
};

SimplexResult minimize_simplex(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
    const SimplexOptions& options);

}  // namespace nilcontrol
