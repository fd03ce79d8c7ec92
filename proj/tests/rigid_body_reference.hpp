#pragma once

// Closed-form gamma dynamics and inverse map published for the rigid-body
// truncation (a is the inertia parameter of the drift).

#include <Eigen/Dense>

namespace reference {

inline Eigen::MatrixXd rigid_gamma_inverse(const Eigen::VectorXd& g, double a) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(7, 7);
  for (int i = 0; i < 7; ++i) P(i, i) = 1.0;
  P(3, 1) = -g(0);
  P(4, 2) = -g(0);
  P(5, 1) = g(0) * g(2);
  P(5, 2) = g(0) * g(1);
  P(5, 3) = -g(2);
  P(5, 4) = -g(1);
  P(6, 1) = -a * g(0) * g(0) * g(2);
  P(6, 2) = g(0) * g(3) - a * g(0) * g(0) * g(1);
  P(6, 3) = a * g(0) * g(2);
  P(6, 4) = a * g(0) * g(1) - g(3);
  P(6, 5) = -a * g(0);
  return P;
}

inline Eigen::VectorXd rigid_inverse_map(const Eigen::VectorXd& g, double T, double a) {
  Eigen::VectorXd v(6);
  v(0) = g(1) / T;
  v(1) = g(2) / T;
  v(2) = (g(3) + g(0) * g(1) / 2) / T;
  v(3) = (g(4) + g(0) * g(2) / 2) / T;
  v(4) = (g(5) + g(1) * g(4) / 2 + g(2) * g(3) / 2 - g(0) * g(1) * g(2) / 6) / T;
  v(5) = (g(6) + a * g(0) * g(5) / 2 + g(3) * g(4) / 2 +
          a * g(0) * g(0) * g(1) * g(2) / 12 - g(0) * g(2) * g(3) / 12 * (1 + a) +
          g(0) * g(1) * g(4) / 12 * (1 - a)) /
         T;
  return v;
}

}  // namespace reference
