#include "nilcontrol/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nilcontrol/structure_io.hpp"

namespace nilcontrol {

int realization_sign(const BracketTree& tree) {
  return (tree.degree() - 1) % 2 == 0 ? 1 : -1;
}

Eigen::VectorXd basis_field(const ModelSpec& model, int i,
                            const Eigen::VectorXd& x) {
  const auto& tree = model.extended_fields.at(i);
  return realization_sign(tree) *
         nested_bracket(tree, model.plant_fields, x);
}

Eigen::VectorXd plant_rhs(const ModelSpec& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& u) {
  Eigen::VectorXd dx = evaluate(model.plant_fields[0], x);
  for (int i = 0; i < model.m; ++i) {
    if (u(i) != 0.0) dx += u(i) * evaluate(model.plant_fields[i + 1], x);
  }
  return dx;
}

ExtendedBasis extended_basis_matrix(const ModelSpec& model,
                                    const Eigen::VectorXd& x) {
  const int r = model.r();
  ExtendedBasis out;
  out.Q.resize(model.n, r - 1);
  for (int i = 1; i < r; ++i) out.Q.col(i - 1) = basis_field(model, i, x);
  out.rank = numerical_rank(out.Q);
  return out;
}

namespace {

LieAlgebraSpec parse_builtin(const std::string& text) {
  std::istringstream in(text);
  return read_structure(in);
}

BracketTree L(int i) { return BracketTree::leaf(i); }
BracketTree B(BracketTree a, BracketTree b) {
  return BracketTree::node(std::move(a), std::move(b));
}

AnalyticVectorField unit_field(std::string name, int n, int axis) {
  return AnalyticVectorField::make(std::move(name), n, [n, axis](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    std::vector<S> out(n, S(0.0));
    out[axis] = S(1.0);
    return out;
  });
}

}  // namespace

const std::string& rigid_body_algebra_text() {
  static const std::string text = R"(# underactuated rigid body, order-4 truncation
# b0 = g0, b1 = g1, b2 = g2, b3 = [g0,g1], b4 = [g0,g2],
# b5 = [g1,[g0,g2]], b6 = [[g0,g1],[g0,g2]]
dim 7
order 4
element 0 1 g0
element 1 1 g1
element 2 1 g2
element 3 2 [g0,g1]
element 4 2 [g0,g2]
element 5 3 [g1,[g0,g2]]
element 6 4 [[g0,g1],[g0,g2]]
bracket 0 1 = 3:1
bracket 0 2 = 4:1
bracket 1 4 = 5:1
bracket 3 4 = 6:1
bracket 2 3 = 5:1
bracket 0 5 = 6:-1/2
)";
  return text;
}

const std::string& chained_drift_algebra_text() {
  static const std::string text = R"(# chained drift fixture: f0 = x2 d/dx3, f1 = d/dx1, f2 = d/dx2
dim 4
order 2
element 0 1 f0
element 1 1 f1
element 2 1 f2
element 3 2 [f0,f2]
bracket 0 2 = 3:1
)";
  return text;
}

ModelSpec rigid_body_model(double a) {
  ModelSpec model;
  model.name = "rigid_body";
  model.n = 6;
  model.m = 2;
  model.plant_fields.push_back(
      AnalyticVectorField::make("f0", 6, [a](const auto& x) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        const S s3 = sin(x[2]), c3 = cos(x[2]);
        const S sec2 = sec(x[1]), tan2 = tan(x[1]);
        std::vector<S> out(6, S(0.0));
        out[0] = s3 * sec2 * x[4] + c3 * sec2 * x[5];
        out[1] = c3 * x[4] - s3 * x[5];
        out[2] = x[3] + s3 * tan2 * x[4] + c3 * tan2 * x[5];
        out[5] = a * x[3] * x[4];
        return out;
      }));
  model.plant_fields.push_back(unit_field("f1", 6, 3));
  model.plant_fields.push_back(unit_field("f2", 6, 4));
  model.algebra = parse_builtin(rigid_body_algebra_text());
  model.extended_fields = {L(0),       L(1),       L(2),
                           B(L(0), L(1)), B(L(0), L(2)),
                           B(L(1), B(L(0), L(2))),
                           B(B(L(0), L(1)), B(L(0), L(2)))};
  model.eta = 1.0;
  model.zeta = 1.0;
  model.R = 2.0;
  model.guard = [](const Eigen::VectorXd& x) -> std::optional<std::string> {
    if (std::abs(x(1)) > 1.2) {
      return "|x2| = " + std::to_string(std::abs(x(1))) +
             " exceeds 1.2 (sec/tan singular at pi/2)";
    }
    return std::nullopt;
  };
  return model;
}

ModelSpec chained_drift_model() {
  ModelSpec model;
  model.name = "chained_drift";
  model.n = 3;
  model.m = 2;
  model.plant_fields.push_back(
      AnalyticVectorField::make("f0", 3, [](const auto& x) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        std::vector<S> out(3, S(0.0));
        out[2] = x[1];
        return out;
      }));
  model.plant_fields.push_back(unit_field("f1", 3, 0));
  model.plant_fields.push_back(unit_field("f2", 3, 1));
  model.algebra = parse_builtin(chained_drift_algebra_text());
  model.extended_fields = {L(0), L(1), L(2), B(L(0), L(2))};
  model.exact_nilpotent = true;
  model.eta = 1.0;
  model.zeta = 1.0;
  model.R = 2.0;
  return model;
}

std::vector<std::string> model_names() { return {"chained_drift", "rigid_body"}; }

ModelSpec make_model(const std::string& name) {
  if (name == "rigid_body") return rigid_body_model();
  if (name == "chained_drift") return chained_drift_model();
  throw std::invalid_argument("unknown model '" + name + "'");
}

}  // namespace nilcontrol
