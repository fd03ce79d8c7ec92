#pragma once

// Control-affine models x' = f_0(x) + sum_i f_i(x) u_i together with the
// nilpotent algebra used to plan for them.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilcontrol/lie_algebra.hpp"
#include "nilcontrol/vector_field.hpp"

namespace nilcontrol {

struct ModelSpec {
  std::string name;
  int n = 0;  // state dimension
  int m = 0;  // number of inputs
  std::vector<AnalyticVectorField> plant_fields;  // f_0 .. f_m
  LieAlgebraSpec algebra;
  // One tree per basis element b_0 .. b_{r-1}, leaves index plant_fields.
  // The first m + 1 trees are the leaves 0 .. m.
  std::vector<BracketTree> extended_fields;
  // V(x) = |x|^2 / 2; eta is the required decrease rate and zeta the
  // constant with |grad V(x)| >= zeta |x|.
  double eta = 1.0;
  double zeta = 1.0;
  double R = 2.0;
  // True when the plant fields generate exactly `algebra` (no truncation).
  bool exact_nilpotent = false;
  // Returns a message when x leaves the region where the fields are valid.
  std::function<std::optional<std::string>(const Eigen::VectorXd&)> guard;

  int r() const { return algebra.dim(); }
  double V(const Eigen::VectorXd& x) const { return 0.5 * x.squaredNorm(); }
  Eigen::VectorXd grad_V(const Eigen::VectorXd& x) const { return x; }
};

// Sign attached to the vector field realising a basis element: a bracket of
// degree d is realised as (-1)^(d-1) times its vector-field bracket, which
// matches the algebra's product-of-exponentials convention (see
// flow_correspondence_check).
int realization_sign(const BracketTree& tree);

// g_i(x) as used by the extended system.
Eigen::VectorXd basis_field(const ModelSpec& model, int i,
                            const Eigen::VectorXd& x);

// dx/dt of the plant for input u.
Eigen::VectorXd plant_rhs(const ModelSpec& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& u);

struct ExtendedBasis {
  Eigen::MatrixXd Q;  // n x (r-1), columns g_1(x) .. g_{r-1}(x)
  RankInfo rank;
  bool full_rank() const { return rank.full_row_rank; }
};

ExtendedBasis extended_basis_matrix(const ModelSpec& model,
                                    const Eigen::VectorXd& x);

// Built-in models.
ModelSpec rigid_body_model(double a = -0.5);
ModelSpec chained_drift_model();

// Structure-constant text of the built-in algebras (same format as the
// files read by read_structure).
const std::string& rigid_body_algebra_text();
const std::string& chained_drift_algebra_text();

std::vector<std::string> model_names();
// Throws std::invalid_argument for unknown names.
ModelSpec make_model(const std::string& name);

}  // namespace nilcontrol
