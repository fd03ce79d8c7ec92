#include "nilcontrol/lie_algebra.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace nilcontrol {

LieVector normalize(LieVector v) {
  std::sort(v.begin(), v.end(),
            [](const Term& a, const Term& b) { return a.index < b.index; });
  LieVector out;
  for (const auto& t : v) {
    if (!out.empty() && out.back().index == t.index) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coef.numerator() == 0; });
  return out;
}

LieVector add(const LieVector& a, const LieVector& b) {
  LieVector out = a;
  out.insert(out.end(), b.begin(), b.end());
  return normalize(std::move(out));
}

LieVector scale(const LieVector& a, const Rational& s) {
  if (s.numerator() == 0) return {};
  LieVector out = a;
  for (auto& t : out) t.coef *= s;
  return out;
}

LieAlgebraSpec::LieAlgebraSpec(std::vector<BasisElement> basis,
                               int nilpotency_order, BracketTable table)
    : basis_(std::move(basis)), order_(nilpotency_order) {
  for (auto& [key, value] : table) {
    auto v = normalize(std::move(value));
    if (!v.empty()) table_.emplace(key, std::move(v));
  }
}

const LieVector& LieAlgebraSpec::bracket(int i, int j) const {
  static const LieVector zero;
  auto it = table_.find({i, j});
  return it == table_.end() ? zero : it->second;
}

Rational LieAlgebraSpec::constant(int i, int j, int k) const {
  for (const auto& t : bracket(i, j)) {
    if (t.index == k) return t.coef;
  }
  return Rational(0);
}

LieVector LieAlgebraSpec::bracket(const LieVector& a,
                                  const LieVector& b) const {
  LieVector out;
  for (const auto& ta : a) {
    for (const auto& tb : b) {
      for (const auto& tc : bracket(ta.index, tb.index)) {
        out.push_back({tc.index, ta.coef * tb.coef * tc.coef});
      }
    }
  }
  return normalize(std::move(out));
}

BracketTable antisymmetric_completion(BracketTable table) {
  BracketTable out = table;
  for (const auto& [key, value] : table) {
    auto swapped = std::make_pair(key.second, key.first);
    if (!table.contains(swapped)) out[swapped] = scale(value, Rational(-1));
  }
  return out;
}

AdjointMatrix adjoint_matrix(const LieAlgebraSpec& spec, int index) {
  const int r = spec.dim();
  if (index < 0 || index >= r) {
    throw std::out_of_range("adjoint index " + std::to_string(index) +
                            " outside [0, " + std::to_string(r - 1) + "]");
  }
  AdjointMatrix ad{Eigen::MatrixXd::Zero(r, r), index};
  for (int j = 0; j < r; ++j) {
    for (const auto& t : spec.bracket(index, j)) {
      ad.entries(t.index, j) = to_double(t.coef);
    }
  }
  return ad;
}

Eigen::MatrixXd exp_nilpotent(const Eigen::MatrixXd& ad, double t,
                              int order) {
  // Horner form of sum_{p=0}^{order} (t ad)^p / p!.
  const auto n = ad.rows();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
  for (int p = order; p >= 1; --p) {
    acc = Eigen::MatrixXd::Identity(n, n) + (t / p) * (ad * acc);
  }
  return acc;
}

Eigen::MatrixXd exp_ad(const LieAlgebraSpec& spec, int index, double t) {
  return exp_nilpotent(adjoint_matrix(spec, index).entries, t,
                       spec.nilpotency_order());
}

// ---------------------------------------------------------------------------

namespace {

int mobius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      result = -result;
    }
  }
  if (n > 1) result = -result;
  return result;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t out = 1;
  while (e-- > 0) out *= base;
  return out;
}

}  // namespace

std::int64_t witt_number(int num_generators, int degree) {
  if (degree < 1) return 0;
  std::int64_t sum = 0;
  for (int e = 1; e <= degree; ++e) {
    if (degree % e == 0) sum += mobius(degree / e) * ipow(num_generators, e);
  }
  return sum / degree;
}

std::vector<BasisElement> hall_basis(int num_generators, int order) {
  if (num_generators < 1) {
    throw std::invalid_argument("hall_basis needs at least one generator");
  }
  if (order < 1) throw std::invalid_argument("hall_basis needs order >= 1");

  std::vector<BasisElement> basis;
  std::vector<std::vector<int>> by_degree(order + 1);
  for (int g = 0; g < num_generators; ++g) {
    basis.push_back({g, 1, std::nullopt, "X" + std::to_string(g + 1)});
    by_degree[1].push_back(g);
  }
  for (int d = 2; d <= order; ++d) {
    // Candidates [u, v] with u < v; index order is the Hall order.
    for (int du = 1; du <= d / 2; ++du) {
      const int dv = d - du;
      for (int u : by_degree[du]) {
        for (int v : by_degree[dv]) {
          if (u >= v) continue;
          const auto& ev = basis[v];
          if (ev.parents && ev.parents->first > u) continue;
          const int idx = static_cast<int>(basis.size());
          basis.push_back({idx, d, std::make_pair(u, v),
                           "[" + basis[u].label + "," + ev.label + "]"});
          by_degree[d].push_back(idx);
        }
      }
    }
  }
  return basis;
}

namespace {

class HallRewriter {
 public:
  explicit HallRewriter(const std::vector<BasisElement>& basis)
      : basis_(basis) {
    for (const auto& e : basis_) {
      order_ = std::max(order_, e.degree);
      if (e.parents) lookup_[*e.parents] = e.index;
    }
  }

  int order() const { return order_; }

  const LieVector& basic(int h, int k) {
    auto key = std::make_pair(h, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    LieVector value = compute(h, k);
    return memo_[key] = std::move(value);
  }

  LieVector combine(const LieVector& a, const LieVector& b) {
    LieVector out;
    for (const auto& ta : a) {
      for (const auto& tb : b) {
        for (const auto& t : basic(ta.index, tb.index)) {
          out.push_back({t.index, ta.coef * tb.coef * t.coef});
        }
      }
    }
    return normalize(std::move(out));
  }

 private:
  LieVector compute(int h, int k) {
    if (h == k) return {};
    if (basis_[h].degree + basis_[k].degree > order_) return {};
    if (h > k) return scale(basic(k, h), Rational(-1));
    if (auto it = lookup_.find({h, k}); it != lookup_.end()) {
      return {{it->second, Rational(1)}};
    }
    // h < k, k = [k1, k2] with k1 > h:
    // [h, [k1, k2]] = [[h, k1], k2] + [k1, [h, k2]].
    const auto [k1, k2] = *basis_[k].parents;
    if (++depth_ > 10000) throw std::logic_error("Hall rewriting diverged");
    LieVector left = combine(basic(h, k1), {{k2, Rational(1)}});
    LieVector right = combine({{k1, Rational(1)}}, basic(h, k2));
    --depth_;
    return add(left, right);
  }

  const std::vector<BasisElement>& basis_;
  std::map<std::pair<int, int>, int> lookup_;
  std::map<std::pair<int, int>, LieVector> memo_;
  int order_ = 0;
  int depth_ = 0;
};

}  // namespace

LieAlgebraSpec free_structure_constants(
    const std::vector<BasisElement>& basis) {
  HallRewriter rewriter(basis);
  const int r = static_cast<int>(basis.size());
  BracketTable table;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (i == j) continue;
      if (basis[i].degree + basis[j].degree > rewriter.order()) continue;
      const auto& v = rewriter.basic(i, j);
      if (!v.empty()) table[{i, j}] = v;
    }
  }
  return LieAlgebraSpec(basis, rewriter.order(), std::move(table));
}

// ---------------------------------------------------------------------------

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::antisymmetry: return "antisymmetry";
    case ViolationKind::jacobi: return "jacobi";
    case ViolationKind::grading: return "grading";
    case ViolationKind::index_range: return "index_range";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << to_string(kind) << " at (" << i << "," << j << "," << k;
  if (l >= 0) os << "," << l;
  os << "): " << value;
  return os.str();
}

ValidationReport validate_spec(const LieAlgebraSpec& spec) {
  ValidationReport report;
  const int r = spec.dim();
  const auto& basis = spec.basis();

  for (const auto& [key, value] : spec.table()) {
    const auto [i, j] = key;
    bool bad = i < 0 || j < 0 || i >= r || j >= r;
    for (const auto& t : value) bad = bad || t.index < 0 || t.index >= r;
    if (bad) {
      report.violations.push_back({ViolationKind::index_range, i, j, -1, -1,
                                   Rational(0)});
    }
  }
  if (!report.ok()) return report;

  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      const LieVector sum = add(spec.bracket(i, j), spec.bracket(j, i));
      for (const auto& t : sum) {
        report.violations.push_back(
            {ViolationKind::antisymmetry, i, j, t.index, -1, t.coef});
      }
    }
  }

  for (const auto& [key, value] : spec.table()) {
    const auto [i, j] = key;
    const int d = basis[i].degree + basis[j].degree;
    for (const auto& t : value) {
      if (d > spec.nilpotency_order() || basis[t.index].degree != d) {
        report.violations.push_back(
            {ViolationKind::grading, i, j, t.index, -1, t.coef});
      }
    }
  }

  const auto unit = [](int i) { return LieVector{{i, Rational(1)}}; };
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      for (int k = j + 1; k < r; ++k) {
        LieVector jac = spec.bracket(unit(i), spec.bracket(j, k));
        jac = add(jac, spec.bracket(unit(j), spec.bracket(k, i)));
        jac = add(jac, spec.bracket(unit(k), spec.bracket(i, j)));
        for (const auto& t : jac) {
          report.violations.push_back(
              {ViolationKind::jacobi, i, j, k, t.index, t.coef});
        }
      }
    }
  }
  return report;
}

}  // namespace nilcontrol
