#pragma once

// Graded nilpotent Lie algebras described by their structure constants.
//
// A LieAlgebraSpec stores [b_i, b_j] = sum_k c_{ij}^k b_k exactly (rational
// coefficients).  Floating point only appears when adjoint matrices are
// materialised for the Wei-Norman equations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

namespace nilcontrol {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) {
  return boost::rational_cast<double>(q);
}

struct BasisElement {
  int index = 0;
  int degree = 1;
  std::optional<std::pair<int, int>> parents;  // absent for generators
  std::string label;
};

struct Term {
  int index = 0;
  Rational coef;
  friend bool operator==(const Term&, const Term&) = default;
};

// Sparse element of the algebra, sorted by index, no zero coefficients.
using LieVector = std::vector<Term>;

LieVector normalize(LieVector v);
LieVector add(const LieVector& a, const LieVector& b);
LieVector scale(const LieVector& a, const Rational& s);

using BracketTable = std::map<std::pair<int, int>, LieVector>;

class LieAlgebraSpec {
 public:
  LieAlgebraSpec() = default;
  // `table` holds the brackets exactly as given; entries for (j, i) are not
  // synthesised, so antisymmetry is a checkable property of the table.
  LieAlgebraSpec(std::vector<BasisElement> basis, int nilpotency_order,
                 BracketTable table);

  int dim() const { return static_cast<int>(basis_.size()); }
  int nilpotency_order() const { return order_; }
  const std::vector<BasisElement>& basis() const { return basis_; }
  const BasisElement& element(int i) const { return basis_.at(i); }
  const BracketTable& table() const { return table_; }

  // [b_i, b_j]; empty vector when the bracket is zero or unspecified.
  const LieVector& bracket(int i, int j) const;
  Rational constant(int i, int j, int k) const;

  // Bilinear extension of the table.
  LieVector bracket(const LieVector& a, const LieVector& b) const;

 private:
  std::vector<BasisElement> basis_;
  int order_ = 0;
  BracketTable table_;
};

// Fills in (j, i) = -(i, j) wherever only one orientation is present.
BracketTable antisymmetric_completion(BracketTable table);

struct AdjointMatrix {
  Eigen::MatrixXd entries;  // entries(k, j) = c_{ij}^k
  int source_index = 0;
};

AdjointMatrix adjoint_matrix(const LieAlgebraSpec& spec, int index);

// exp(t ad_{b_index}) as the terminating series sum_{p <= k*} (t ad)^p / p!.
Eigen::MatrixXd exp_ad(const LieAlgebraSpec& spec, int index, double t);
Eigen::MatrixXd exp_nilpotent(const Eigen::MatrixXd& ad, double t, int order);

// ---------------------------------------------------------------------------
// Free nilpotent algebras.

// Necklace polynomial: dimension of the degree-d part of the free Lie algebra
// on m generators.
std::int64_t witt_number(int num_generators, int degree);

// P. Hall basis truncated at `order`, ordered by degree then by creation.
// A bracket [u, v] enters the basis when u < v and either v is a generator or
// v = [v1, v2] with v1 <= u.
std::vector<BasisElement> hall_basis(int num_generators, int order);

// Structure constants of the free nilpotent algebra in a Hall basis, obtained
// by rewriting non-Hall brackets with antisymmetry and the Jacobi identity.
LieAlgebraSpec free_structure_constants(const std::vector<BasisElement>& basis);

// ---------------------------------------------------------------------------
// Validation.

enum class ViolationKind { antisymmetry, jacobi, grading, index_range };

struct Violation {
  ViolationKind kind;
  int i = -1, j = -1, k = -1, l = -1;
  Rational value;
  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_spec(const LieAlgebraSpec& spec);

std::string to_string(ViolationKind kind);

}  // namespace nilcontrol
