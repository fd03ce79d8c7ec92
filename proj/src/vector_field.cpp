#include "nilcontrol/vector_field.hpp"

#include <algorithm>

namespace nilcontrol {

namespace {

using Fields = std::vector<AnalyticVectorField>;

template <class S>
struct level_of : std::integral_constant<int, 0> {};
template <class T>
struct level_of<Dual<T>> : std::integral_constant<int, level_of<T>::value + 1> {};

template <int L>
StateOf<L> eval_tree(const BracketTree& t, const Fields& fs,
                     const StateOf<L>& x);

// D h(x) w for the field described by `t`.
template <int L>
StateOf<L> directional(const BracketTree& t, const Fields& fs,
                       const StateOf<L>& x, const StateOf<L>& w) {
  StateOf<L + 1> xe(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xe[i] = Scalar<L + 1>(x[i], w[i]);
  const auto y = eval_tree<L + 1>(t, fs, xe);
  StateOf<L> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i].d;
  return out;
}

template <int L>
StateOf<L> eval_tree(const BracketTree& t, const Fields& fs,
                     const StateOf<L>& x) {
  if (t.is_leaf()) {
    if (t.index() < 0 || t.index() >= static_cast<int>(fs.size())) {
      throw std::invalid_argument("bracket leaf " + std::to_string(t.index()) +
                                  " has no field");
    }
    return fs[t.index()].template eval<L>(x);
  }
  if constexpr (L >= kMaxBracketHeight) {
    throw std::domain_error("bracket nesting deeper than " +
                            std::to_string(kMaxBracketHeight));
  } else {
    const auto a = eval_tree<L>(t.left(), fs, x);
    const auto b = eval_tree<L>(t.right(), fs, x);
    const auto db_a = directional<L>(t.right(), fs, x, a);
    const auto da_b = directional<L>(t.left(), fs, x, b);
    StateOf<L> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = db_a[i] - da_b[i];
    return out;
  }
}

StateOf<0> to_state(const Eigen::VectorXd& x) {
  return StateOf<0>(x.data(), x.data() + x.size());
}

Eigen::VectorXd to_eigen(const StateOf<0>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Eigen::VectorXd evaluate(const AnalyticVectorField& f,
                         const Eigen::VectorXd& x) {
  return to_eigen(f.eval<0>(to_state(x)));
}

BracketTree BracketTree::leaf(int index) {
  BracketTree t;
  t.index_ = index;
  return t;
}

BracketTree BracketTree::node(BracketTree left, BracketTree right) {
  BracketTree t;
  t.left_ = std::make_shared<const BracketTree>(std::move(left));
  t.right_ = std::make_shared<const BracketTree>(std::move(right));
  return t;
}

int BracketTree::height() const {
  return is_leaf() ? 0 : 1 + std::max(left_->height(), right_->height());
}

int BracketTree::degree() const {
  return is_leaf() ? 1 : left_->degree() + right_->degree();
}

std::string BracketTree::label(const std::vector<std::string>& names) const {
  if (is_leaf()) {
    if (index_ >= 0 && index_ < static_cast<int>(names.size())) {
      return names[index_];
    }
    return "f" + std::to_string(index_);
  }
  return "[" + left_->label(names) + "," + right_->label(names) + "]";
}

Eigen::VectorXd lie_bracket(const AnalyticVectorField& f,
                            const AnalyticVectorField& g,
                            const Eigen::VectorXd& x) {
  if (f.arity() != g.arity()) {
    throw std::invalid_argument("lie_bracket: fields of different arity");
  }
  return nested_bracket(
      BracketTree::node(BracketTree::leaf(0), BracketTree::leaf(1)), {f, g}, x);
}

Eigen::VectorXd nested_bracket(const BracketTree& tree, const Fields& fields,
                               const Eigen::VectorXd& x) {
  if (tree.height() > kMaxBracketHeight) {
    throw std::domain_error("bracket tree of height " +
                            std::to_string(tree.height()) +
                            " exceeds supported nesting");
  }
  return to_eigen(eval_tree<0>(tree, fields, to_state(x)));
}

AnalyticVectorField bracket_field(const BracketTree& tree, Fields fields,
                                  std::string name) {
  if (fields.empty()) throw std::invalid_argument("bracket_field: no fields");
  const int n = fields.front().arity();
  auto shared = std::make_shared<const Fields>(std::move(fields));
  return AnalyticVectorField::make(
      std::move(name), n, [tree, shared](const auto& x) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        return eval_tree<level_of<S>::value>(tree, *shared, x);
      });
}

RankInfo numerical_rank(const Eigen::MatrixXd& q, double rel_tol) {
  RankInfo info;
  if (q.size() == 0) return info;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  info.singular_values = svd.singularValues();
  const double top = info.singular_values.size() ? info.singular_values(0) : 0;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    if (info.singular_values(i) > rel_tol * top && top > 0) ++info.rank;
  }
  info.full_row_rank = info.rank == q.rows();
  return info;
}

}  // namespace nilcontrol
