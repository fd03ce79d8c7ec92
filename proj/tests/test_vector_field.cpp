#include <doctest.h>

#include <cmath>

#include "nilcontrol/dual.hpp"
#include "nilcontrol/models.hpp"
#include "nilcontrol/vector_field.hpp"

using namespace nilcontrol;

namespace {

// Nonlinear test fields on R^3.
AnalyticVectorField field_a() {
  return AnalyticVectorField::make("a", 3, [](const auto& x) {
    using std::sin, std::cos;
    using S = std::decay_t<decltype(x[0])>;
    return std::vector<S>{sin(x[1]) * x[2], x[0] * x[0] + 0.5, cos(x[0]) - x[1] * x[2]};
  });
}

AnalyticVectorField field_b() {
  return AnalyticVectorField::make("b", 3, [](const auto& x) {
    using std::exp;
    using S = std::decay_t<decltype(x[0])>;
    return std::vector<S>{x[1] * x[2], exp(0.3 * x[0]), x[0] - 2.0 * x[1]};
  });
}

Eigen::MatrixXd fd_jacobian(const AnalyticVectorField& f, const Eigen::VectorXd& x) {
  const double h = 1e-6;
  Eigen::MatrixXd J(x.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (evaluate(f, xp) - evaluate(f, xm)) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("dual numbers carry exact first derivatives") {
  const Dual<double> x{0.7, 1.0};
  const auto y = sin(x) * exp(x) / (1.0 + x * x);
  const double v = 0.7;
  const double dy = (std::cos(v) * std::exp(v) + std::sin(v) * std::exp(v)) / (1 + v * v) -
                    std::sin(v) * std::exp(v) * 2 * v / ((1 + v * v) * (1 + v * v));
  CHECK(y.d == doctest::Approx(dy).epsilon(1e-14));
  const auto t = tan(x);
  CHECK(t.d == doctest::Approx(1.0 / (std::cos(v) * std::cos(v))).epsilon(1e-14));
  const auto s = sec(x);
  CHECK(s.d == doctest::Approx(std::sin(v) / (std::cos(v) * std::cos(v))).epsilon(1e-14));
  const auto q = sqrt(x);
  CHECK(q.d == doctest::Approx(0.5 / std::sqrt(v)).epsilon(1e-14));
}

TEST_CASE("nested duals give second derivatives") {
  using D2 = Dual<Dual<double>>;
  const D2 x{{0.4, 1.0}, {1.0, 0.0}};
  const D2 y = sin(x);
  CHECK(y.d.d == doctest::Approx(-std::sin(0.4)).epsilon(1e-14));
}

TEST_CASE("bracket agrees with finite-difference jacobians") {
  const auto a = field_a(), b = field_b();
  const Eigen::Vector3d x(0.3, -0.2, 0.9);
  const Eigen::VectorXd expected =
      fd_jacobian(b, x) * evaluate(a, x) - fd_jacobian(a, x) * evaluate(b, x);
  CHECK((lie_bracket(a, b, x) - expected).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((lie_bracket(a, b, x) + lie_bracket(b, a, x)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("nested brackets agree with finite differences of bracket fields") {
  const std::vector<AnalyticVectorField> fields = {field_a(), field_b()};
  const BracketTree ab = BracketTree::node(BracketTree::leaf(0), BracketTree::leaf(1));
  const BracketTree a_ab = BracketTree::node(BracketTree::leaf(0), ab);
  const AnalyticVectorField fab = bracket_field(ab, fields, "[a,b]");
  const Eigen::Vector3d x(-0.4, 0.6, 0.1);
  const Eigen::VectorXd expected =
      fd_jacobian(fab, x) * evaluate(fields[0], x) - fd_jacobian(fields[0], x) * evaluate(fab, x);
  CHECK((nested_bracket(a_ab, fields, x) - expected).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(a_ab.height() == 2);
  CHECK(a_ab.degree() == 3);
  CHECK(a_ab.label({"a", "b"}) == "[a,[a,b]]");
}

TEST_CASE("jacobi identity holds for vector-field brackets") {
  const auto c = AnalyticVectorField::make("c", 3, [](const auto& x) {
    using S = std::decay_t<decltype(x[0])>;
    return std::vector<S>{x[2] * x[2], x[0] * x[1], x[1] + 1.0};
  });
  const std::vector<AnalyticVectorField> f = {field_a(), field_b(), c};
  const auto L = BracketTree::leaf;
  const auto B = BracketTree::node;
  const Eigen::Vector3d x(0.2, 0.5, -0.3);
  const Eigen::VectorXd j = nested_bracket(B(L(0), B(L(1), L(2))), f, x) +
                            nested_bracket(B(L(1), B(L(2), L(0))), f, x) +
                            nested_bracket(B(L(2), B(L(0), L(1))), f, x);
  CHECK(j.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("height limit and bad indices are rejected") {
  const std::vector<AnalyticVectorField> f = {field_a(), field_b()};
  BracketTree t = BracketTree::leaf(1);
  for (int h = 0; h < kMaxBracketHeight; ++h) t = BracketTree::node(BracketTree::leaf(0), t);
  CHECK_NOTHROW(nested_bracket(t, f, Eigen::Vector3d(0.1, 0.2, 0.3)));
  t = BracketTree::node(BracketTree::leaf(0), t);
  CHECK_THROWS_AS(nested_bracket(t, f, Eigen::Vector3d(0.1, 0.2, 0.3)), std::domain_error);
  CHECK_THROWS_AS(nested_bracket(BracketTree::leaf(4), f, Eigen::Vector3d::Zero()),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate(f[0], Eigen::Vector2d::Zero()), std::invalid_argument);
}

TEST_CASE("numerical rank") {
  Eigen::MatrixXd q(2, 3);
  q << 1, 0, 0, 0, 1e-12, 0;
  CHECK(numerical_rank(q).rank == 1);
  CHECK_FALSE(numerical_rank(q).full_row_rank);
  q(1, 2) = 0.5;
  CHECK(numerical_rank(q).full_row_rank);
}

TEST_CASE("fixture brackets match the closed form") {
  const ModelSpec m = chained_drift_model();
  const Eigen::Vector3d x(0.3, -0.7, 1.1);
  // f0 = x2 e3, f2 = e2: [f0, f2] = D f2 f0 - D f0 f2 = -e3.
  const auto L = BracketTree::leaf;
  CHECK((nested_bracket(BracketTree::node(L(0), L(2)), m.plant_fields, x) -
         Eigen::Vector3d(0, 0, -1))
            .norm() < 1e-15);
  CHECK(nested_bracket(BracketTree::node(L(0), L(1)), m.plant_fields, x).norm() == 0.0);
}
