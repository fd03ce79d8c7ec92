#include <doctest.h>

#include <map>
#include <random>

#include "nilcontrol/lie_algebra.hpp"
#include "nilcontrol/models.hpp"
#include "nilcontrol/structure_io.hpp"

using namespace nilcontrol;

namespace {

// Elements of the free associative algebra: word -> coefficient.
using Poly = std::map<std::vector<int>, Rational>;

Poly commutator(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [wa, ca] : a) {
    for (const auto& [wb, cb] : b) {
      std::vector<int> ab = wa, ba = wb;
      ab.insert(ab.end(), wb.begin(), wb.end());
      ba.insert(ba.end(), wa.begin(), wa.end());
      out[ab] += ca * cb;
      out[ba] -= ca * cb;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.numerator() == 0; });
  return out;
}

Poly combine(const std::vector<Poly>& images, const LieVector& v) {
  Poly out;
  for (const auto& t : v) {
    for (const auto& [w, c] : images[t.index]) out[w] += c * t.coef;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.numerator() == 0; });
  return out;
}

std::vector<Poly> associative_images(const std::vector<BasisElement>& basis) {
  std::vector<Poly> img(basis.size());
  for (const auto& e : basis) {
    if (!e.parents) {
      img[e.index][{e.index}] = 1;
    } else {
      img[e.index] = commutator(img[e.parents->first], img[e.parents->second]);
    }
  }
  return img;
}

}  // namespace

TEST_CASE("witt numbers") {
  CHECK(witt_number(2, 1) == 2);
  CHECK(witt_number(2, 2) == 1);
  CHECK(witt_number(2, 3) == 2);
  CHECK(witt_number(2, 4) == 3);
  CHECK(witt_number(2, 5) == 6);
  CHECK(witt_number(3, 2) == 3);
  CHECK(witt_number(3, 3) == 8);
  CHECK(witt_number(3, 4) == 18);
  CHECK(witt_number(4, 5) == 204);
}

TEST_CASE("hall basis dimensions follow the necklace formula") {
  for (int m = 1; m <= 4; ++m) {
    for (int k = 1; k <= 5; ++k) {
      const auto basis = hall_basis(m, k);
      for (int d = 1; d <= k; ++d) {
        const auto count = std::count_if(basis.begin(), basis.end(),
                                         [d](const auto& e) { return e.degree == d; });
        CHECK(count == witt_number(m, d));
      }
    }
  }
  CHECK(hall_basis(3, 4).size() == 32);
}

TEST_CASE("hall basis elements obey the ordering rule") {
  const auto basis = hall_basis(3, 5);
  for (const auto& e : basis) {
    if (!e.parents) continue;
    const auto [u, v] = *e.parents;
    CHECK(u < v);
    if (const auto& pv = basis[v].parents) CHECK(pv->first <= u);
    CHECK(e.degree == basis[u].degree + basis[v].degree);
  }
}

TEST_CASE("free structure constants agree with commutators of words") {
  for (auto [m, k] : {std::pair{2, 4}, std::pair{2, 5}, std::pair{3, 4}}) {
    const auto basis = hall_basis(m, k);
    const LieAlgebraSpec spec = free_structure_constants(basis);
    const auto img = associative_images(basis);
    for (int i = 0; i < spec.dim(); ++i) {
      for (int j = 0; j < spec.dim(); ++j) {
        const int d = basis[i].degree + basis[j].degree;
        const Poly expected = d <= k ? commutator(img[i], img[j]) : Poly{};
        CHECK(combine(img, spec.bracket(i, j)) == expected);
      }
    }
  }
}

TEST_CASE("free algebras pass validation") {
  for (int m = 1; m <= 3; ++m) {
    for (int k = 1; k <= 4; ++k) {
      CHECK(validate_spec(free_structure_constants(hall_basis(m, k))).ok());
    }
  }
}

TEST_CASE("lie vector arithmetic drops zeros and stays sorted") {
  const LieVector a = normalize({{3, Rational(1)}, {1, Rational(2)}, {3, Rational(-1)}});
  REQUIRE(a.size() == 1);
  CHECK(a[0].index == 1);
  const LieVector b = add(a, {{0, Rational(1, 2)}});
  REQUIRE(b.size() == 2);
  CHECK(b[0].index == 0);
  CHECK(scale(b, Rational(0)).empty());
}

TEST_CASE("adjoint matrix and exponential on the heisenberg algebra") {
  const LieAlgebraSpec h({{0, 1, {}, "x"}, {1, 1, {}, "y"}, {2, 2, std::pair{0, 1}, "[x,y]"}},
                         2, antisymmetric_completion({{{0, 1}, {{2, Rational(1)}}}}));
  const Eigen::MatrixXd ad0 = adjoint_matrix(h, 0).entries;
  CHECK(ad0(2, 1) == 1.0);
  CHECK(ad0.cwiseAbs().sum() == 1.0);
  const Eigen::MatrixXd e = exp_ad(h, 0, 0.7);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(3, 3);
  expected(2, 1) = 0.7;
  CHECK((e - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.constant(1, 0, 2) == Rational(-1));
}

TEST_CASE("exp_nilpotent matches a dense series") {
  const LieAlgebraSpec spec = free_structure_constants(hall_basis(2, 4));
  const Eigen::MatrixXd ad = adjoint_matrix(spec, 0).entries + 0.3 * adjoint_matrix(spec, 1).entries;
  Eigen::MatrixXd series = Eigen::MatrixXd::Identity(ad.rows(), ad.cols());
  Eigen::MatrixXd term = series;
  for (int p = 1; p < 20; ++p) {
    term = term * ad * (1.3 / p);
    series += term;
  }
  CHECK((exp_nilpotent(ad, 1.3, 4) - series).cwiseAbs().maxCoeff() < 1e-13);
  // exp(t ad) exp(-t ad) = I
  CHECK((exp_nilpotent(ad, 1.3, 4) * exp_nilpotent(ad, -1.3, 4) -
         Eigen::MatrixXd::Identity(ad.rows(), ad.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
}

TEST_CASE("validation reports each violation kind") {
  std::vector<BasisElement> basis = {{0, 1, {}, "a"}, {1, 1, {}, "b"}, {2, 2, {}, "c"}};
  SUBCASE("antisymmetry") {
    const LieAlgebraSpec spec(basis, 2,
                              {{{0, 1}, {{2, Rational(1)}}}, {{1, 0}, {{2, Rational(1)}}}});
    const auto report = validate_spec(spec);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].kind == ViolationKind::antisymmetry);
  }
  SUBCASE("grading") {
    const LieAlgebraSpec spec(basis, 2, antisymmetric_completion({{{0, 1}, {{1, Rational(1)}}}}));
    const auto report = validate_spec(spec);
    REQUIRE_FALSE(report.ok());
    CHECK(std::any_of(report.violations.begin(), report.violations.end(),
                      [](const Violation& v) { return v.kind == ViolationKind::grading; }));
  }
  SUBCASE("index range") {
    const LieAlgebraSpec spec(basis, 2, antisymmetric_completion({{{0, 1}, {{5, Rational(1)}}}}));
    const auto report = validate_spec(spec);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].kind == ViolationKind::index_range);
  }
  SUBCASE("jacobi") {
    const LieAlgebraSpec spec = read_structure_file(NILCONTROL_DATA_DIR "/bad_jacobi.txt");
    const auto report = validate_spec(spec);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::jacobi);
    CHECK(report.violations[0].describe().find("jacobi") != std::string::npos);
  }
}

TEST_CASE("built-in fixture algebra is a valid graded Lie algebra") {
  CHECK(validate_spec(chained_drift_model().algebra).ok());
}

TEST_CASE("rigid body table is antisymmetric and graded but not Jacobi") {
  // No bracket table on this basis reproduces the published gamma dynamics
  // and also satisfies Jacobi; the shipped table keeps the dynamics.
  const auto report = validate_spec(rigid_body_model().algebra);
  REQUIRE_FALSE(report.ok());
  for (const auto& v : report.violations) CHECK(v.kind == ViolationKind::jacobi);
}
