#pragma once

// Analytic vector fields on R^n and their iterated Lie brackets.
//
// A field is stored as one evaluator per scalar level (double, Dual<double>,
// ...).  Brackets are evaluated with [f, g](x) = Dg(x) f(x) - Df(x) g(x), the
// Jacobian-vector products coming from one extra dual level per nesting.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nilcontrol/dual.hpp"

namespace nilcontrol {

// Deepest bracket tree (counted in bracket levels) that can be evaluated.
inline constexpr int kMaxBracketHeight = 5;

template <int L>
using StateOf = std::vector<Scalar<L>>;

class AnalyticVectorField {
 public:
  AnalyticVectorField() = default;

  // `f` must be a generic callable: f(const std::vector<S>& x) returning
  // std::vector<S> of size n for every S = Scalar<L>.
  template <class F>
  static AnalyticVectorField make(std::string name, int arity, F f) {
    AnalyticVectorField out;
    out.name_ = std::move(name);
    out.arity_ = arity;
    out.bind(f, std::make_integer_sequence<int, kMaxBracketHeight + 1>{});
    return out;
  }

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }

  template <int L>
  StateOf<L> eval(const StateOf<L>& x) const {
    if (static_cast<int>(x.size()) != arity_) {
      throw std::invalid_argument("field " + name_ + ": state has dimension " +
                                  std::to_string(x.size()) + ", expected " +
                                  std::to_string(arity_));
    }
    return std::get<L>(evaluators_)(x);
  }

 private:
  template <class F, int... L>
  void bind(const F& f, std::integer_sequence<int, L...>) {
    ((std::get<L>(evaluators_) = f), ...);
  }

  template <int... L>
  static auto evaluator_tuple(std::integer_sequence<int, L...>)
      -> std::tuple<std::function<StateOf<L>(const StateOf<L>&)>...>;

  std::string name_;
  int arity_ = 0;
  decltype(evaluator_tuple(
      std::make_integer_sequence<int, kMaxBracketHeight + 1>{})) evaluators_;
};

Eigen::VectorXd evaluate(const AnalyticVectorField& f, const Eigen::VectorXd& x);

// Leaf (index into a field list) or a bracket of two subtrees.
class BracketTree {
 public:
  static BracketTree leaf(int index);
  static BracketTree node(BracketTree left, BracketTree right);

  bool is_leaf() const { return !left_; }
  int index() const { return index_; }
  const BracketTree& left() const { return *left_; }
  const BracketTree& right() const { return *right_; }

  int height() const;  // 0 for a leaf
  int degree() const;  // number of leaves
  std::string label(const std::vector<std::string>& names) const;

 private:
  int index_ = -1;
  std::shared_ptr<const BracketTree> left_, right_;
};

Eigen::VectorXd lie_bracket(const AnalyticVectorField& f,
                            const AnalyticVectorField& g,
                            const Eigen::VectorXd& x);

// Throws std::invalid_argument for leaf indices outside `fields` and
// std::domain_error when the tree is taller than kMaxBracketHeight.
Eigen::VectorXd nested_bracket(const BracketTree& tree,
                               const std::vector<AnalyticVectorField>& fields,
                               const Eigen::VectorXd& x);

// The bracket tree as a field of its own (usable as a leaf elsewhere).
AnalyticVectorField bracket_field(const BracketTree& tree,
                                  std::vector<AnalyticVectorField> fields,
                                  std::string name);

// Numerical rank with singular values above rel_tol * largest.
struct RankInfo {
  int rank = 0;
  bool full_row_rank = false;
  Eigen::VectorXd singular_values;
};

RankInfo numerical_rank(const Eigen::MatrixXd& q, double rel_tol = 1e-9);

}  // namespace nilcontrol
