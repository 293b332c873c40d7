#include <gtest/gtest.h>

#include <fstream>

#include "decoup/experiments.hpp"
#include "decoup/polynomials.hpp"
#include "test_support.hpp"

using namespace decoup;
using testing_support::Gen;

namespace {

const NormedSpace kScalar = NormedSpace::lq(2, 1);

TetraPoly scalar_poly(int n, std::vector<std::pair<std::vector<int>, Scalar>> terms,
                      std::optional<int> degree = std::nullopt) {
  std::vector<TetraTerm> t;
  for (auto& [idx, c] : terms) t.push_back({mask_of(idx), {c}});
  return TetraPoly(n, kScalar, t, degree);
}

GenPoly scalar_gen(int n, std::vector<std::pair<MultiIndex, Scalar>> terms) {
  std::vector<GenTerm> t;
  for (auto& [a, c] : terms) t.push_back({a, {c}});
  return GenPoly(n, kScalar, t);
}

Scalar value(const SpaceVector& v) { return v.coords.at(0); }

}  // namespace

TEST(Evaluate, SingleProduct) {
  EXPECT_EQ(value(scalar_poly(2, {{{0, 1}, 1.0}}).evaluate(Point{2.0, 3.0})), Scalar(6.0));
}

TEST(Evaluate, Cancellation) {
  const auto P = scalar_poly(3, {{{0, 1}, 1.0}, {{1, 2}, 1.0}});
  EXPECT_EQ(value(P.evaluate(Point{1.0, 1.0, -1.0})), Scalar(0.0));
}

TEST(Evaluate, SubsetBasisPolynomialHasUnitNormOnSigns) {
  Gen g(1);
  for (int n = 3; n <= 8; ++n) {
    const TetraPoly P = counterexample_polynomial(n, 3);
    for (int t = 0; t < 20; ++t) {
      const auto eps = testing_support::signs_of(g.engine()(), n);
      EXPECT_DOUBLE_EQ(norm(P.evaluate(eps)), 1.0);
    }
  }
}

TEST(Evaluate, WrongLengthThrows) {
  EXPECT_THROW(scalar_poly(2, {{{0, 1}, 1.0}}).evaluate(Point{1.0}), std::invalid_argument);
}

TEST(Evaluate, MatchesReference) {
  Gen g(2);
  for (int t = 0; t < 200; ++t) {
    const int n = g.range(1, 10);
    const TetraPoly P = g.mixed(n, std::min(n, 4), g.space());
    const Point z = g.point(n);
    EXPECT_LE(testing_support::rel_err(P.evaluate(z).coords, testing_support::ref_eval(P, z)), 1e-13);
  }
}

TEST(Evaluate, CompensatedSummationOnLargeFamilies) {
  // Degrees 0..6 over 16 variables: 14893 terms, magnitudes spread over 16 orders.
  Gen g(3);
  std::vector<TetraTerm> terms;
  const int n = 16;
  for (int m = 0; m <= 6; ++m)
    for_each_subset_of(full_mask(n), m, [&](SubsetMask A) {
      terms.push_back({A, {Scalar(1e8 * g.normal(), 0.0)}});
      if (terms.size() % 2 == 0) terms.back().coeff[0] *= 1e-8;
    });
  const TetraPoly P(n, kScalar, terms);
  ASSERT_GT(P.size(), kCompensatedSumThreshold);
  const Point z = g.point(n);
  EXPECT_LE(testing_support::rel_err(P.evaluate(z).coords, testing_support::ref_eval(P, z)), 1e-13);
}

TEST(Construction, MergesDuplicatesAndDropsZeros) {
  const auto P = scalar_poly(3, {{{0, 1}, 1.0}, {{0, 1}, -1.0}, {{2}, 2.0}, {{1}, 0.0}});
  EXPECT_EQ(P.size(), 1u);
  EXPECT_EQ(P.subsets()[0], mask_of({2}));
}

TEST(Construction, DeclaredHomogeneityEnforced) {
  EXPECT_THROW(scalar_poly(3, {{{0, 1}, 1.0}, {{2}, 1.0}}, 2), std::invalid_argument);
  EXPECT_THROW(scalar_poly(2, {{{0, 3}, 1.0}}), std::invalid_argument);
  const auto P = scalar_poly(3, {{{0, 1}, 1.0}});
  EXPECT_EQ(P.homogeneous_degree(), 2);
  EXPECT_TRUE(P.is_homogeneous(2));
  EXPECT_FALSE(scalar_poly(3, {{{0, 1}, 1.0}, {{2}, 1.0}}).homogeneous_degree().has_value());
}

TEST(HomogeneousProjection, KeepsDegreeK) {
  const auto P = scalar_gen(2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{1, 1}, 1.0}});
  const auto P1 = homogeneous_projection(P, 1);
  ASSERT_EQ(P1.size(), 1u);
  EXPECT_EQ(P1.alphas()[0], (MultiIndex{1, 0}));
}

TEST(HomogeneousProjection, IdentityOnHomogeneous) {
  Gen g(4);
  const TetraPoly P = g.homogeneous(6, 3, NormedSpace::lq(2, 2));
  const TetraPoly Q = homogeneous_projection(P, 3);
  ASSERT_EQ(Q.size(), P.size());
  for (std::size_t t = 0; t < P.size(); ++t) {
    EXPECT_EQ(Q.subsets()[t], P.subsets()[t]);
    EXPECT_TRUE(std::equal(Q.coefficient(t).begin(), Q.coefficient(t).end(), P.coefficient(t).begin()));
  }
}

TEST(HomogeneousProjection, EmptyResult) {
  const auto P = scalar_gen(1, {{{0}, 1.0}, {{1}, 1.0}});
  EXPECT_EQ(homogeneous_projection(P, 2).size(), 0u);
  EXPECT_THROW(homogeneous_projection(P, -1), std::invalid_argument);
}

TEST(HomogeneousProjection, SumOfProjectionsIsP) {
  Gen g(5);
  for (int t = 0; t < 50; ++t) {
    const int n = g.range(1, 8);
    const TetraPoly P = g.mixed(n, std::min(n, 4), g.space());
    const Point z = g.point(n);
    std::vector<Scalar> sum(P.space().dimension());
    for (int k = 0; k <= P.degree(); ++k) {
      const auto v = homogeneous_projection(P, k).evaluate(z);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v.coords[i];
    }
    EXPECT_LE(testing_support::rel_err(sum, P.evaluate(z).coords), 1e-13);
  }
}

TEST(GradientPairing, EulerOnProduct) {
  const auto P = scalar_poly(2, {{{0, 1}, 1.0}});
  EXPECT_EQ(value(gradient_pairing(P, Point{1.0, 1.0}, Point{1.0, 1.0})), Scalar(2.0));
}

TEST(GradientPairing, PartialWeights) {
  const auto P = scalar_poly(2, {{{0, 1}, 1.0}});
  EXPECT_EQ(value(gradient_pairing(P, Point{1.0, 1.0}, Point{1.0, 0.0})), Scalar(1.0));
}

TEST(GradientPairing, EulerRelationProperty) {
  Gen g(6);
  for (int t = 0; t < 100; ++t) {
    const int m = g.range(1, 5), n = g.range(m, 9);
    const TetraPoly P = g.homogeneous(n, m, g.space());
    const Point z = g.point(n);
    auto mp = P.evaluate(z).coords;
    for (auto& c : mp) c *= static_cast<double>(m);
    EXPECT_LE(testing_support::rel_err(gradient_pairing(P, z, Point(static_cast<std::size_t>(n), 1.0)).coords, mp),
              1e-12);
  }
}

TEST(Gradient, MatchesFiniteStructure) {
  // d_j P(z) summed against lambda z gives the pairing.
  Gen g(7);
  for (int t = 0; t < 100; ++t) {
    const int n = g.range(1, 8);
    const TetraPoly P = g.mixed(n, std::min(n, 4), g.space());
    const Point z = g.point(n), lambda = g.point(n);
    const auto grad = gradient(P, z);
    std::vector<Scalar> acc(P.space().dimension());
    for (int j = 0; j < n; ++j)
      for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] += lambda[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(j)] *
                  grad[static_cast<std::size_t>(j)].coords[i];
    EXPECT_LE(testing_support::rel_err(acc, gradient_pairing(P, z, lambda).coords), 1e-12);
  }
}

TEST(SubstitutePointwise, Examples) {
  const auto P2 = scalar_poly(2, {{{0, 1}, 1.0}});
  EXPECT_EQ(value(substitute_pointwise(P2, Point{1.0, -1.0}, Point{1.0, 1.0})), Scalar(-1.0));
  const auto P3 = scalar_poly(3, {{{0, 1, 2}, 1.0}});
  EXPECT_EQ(value(substitute_pointwise(P3, Point{2.0, 2.0, 2.0}, Point{1.0, 1.0, 1.0})), Scalar(8.0));
  Gen g(8);
  const TetraPoly P = g.mixed(5, 3, NormedSpace::lq(1, 3));
  const Point z = g.point(5);
  EXPECT_EQ(substitute_pointwise(P, Point(5, 1.0), z).coords, P.evaluate(z).coords);
  EXPECT_THROW(substitute_pointwise(P, Point(4, 1.0), z), std::invalid_argument);
}

TEST(Tetrahedralize, MapsIndicatorToSubset) {
  const auto T = tetrahedralize(scalar_gen(3, {{{1, 0, 1}, 2.0}}));
  ASSERT_EQ(T.size(), 1u);
  EXPECT_EQ(T.subsets()[0], mask_of({0, 2}));
  EXPECT_EQ(T.coefficient(0)[0], Scalar(2.0));
  EXPECT_EQ(tetrahedralize(GenPoly(3, kScalar)).size(), 0u);
  EXPECT_THROW(tetrahedralize(scalar_gen(2, {{{2, 0}, 1.0}})), std::invalid_argument);
}

TEST(Tetrahedralize, RoundTrip) {
  Gen g(9);
  for (int t = 0; t < 50; ++t) {
    const int n = g.range(1, 10);
    const TetraPoly P = g.mixed(n, std::min(n, 5), g.space());
    const TetraPoly Q = tetrahedralize(to_general(P));
    ASSERT_EQ(Q.size(), P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
      EXPECT_EQ(Q.subsets()[i], P.subsets()[i]);
      EXPECT_TRUE(std::equal(Q.coefficient(i).begin(), Q.coefficient(i).end(), P.coefficient(i).begin()));
    }
  }
}

TEST(Properties, LinearInCoefficients) {
  Gen g(10);
  for (int t = 0; t < 100; ++t) {
    const int n = g.range(1, 8);
    const NormedSpace s = g.space();
    const TetraPoly P = g.mixed(n, std::min(n, 4), s), Q = g.mixed(n, std::min(n, 4), s);
    const Point z = g.point(n);
    auto lhs = (P + Q).evaluate(z).coords;
    auto a = P.evaluate(z).coords, b = Q.evaluate(z).coords;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    EXPECT_LE(testing_support::rel_err(lhs, a), 1e-12);
  }
}

TEST(Properties, Homogeneity) {
  Gen g(11);
  for (int t = 0; t < 100; ++t) {
    const int m = g.range(0, 5), n = g.range(std::max(m, 1), 9);
    const TetraPoly P = g.homogeneous(n, m, g.space());
    Point z = g.point(n);
    const Scalar r = g.complex_normal();
    auto expected = P.evaluate(z).coords;
    for (auto& c : expected) c *= std::pow(r, m);
    for (auto& c : z) c *= r;
    EXPECT_LE(testing_support::rel_err(P.evaluate(z).coords, expected), 1e-10);
  }
}

TEST(GenPoly, EvaluatesPowers) {
  const auto P = scalar_gen(2, {{{2, 1}, 3.0}, {{0, 0}, 1.0}});
  EXPECT_EQ(value(P.evaluate(Point{2.0, 5.0})), Scalar(61.0));
  EXPECT_EQ(P.degree(), 3);
  EXPECT_FALSE(P.is_tetrahedral());
}

TEST(PolynomialJson, ReadsSubsetFile) {
  const auto j = nlohmann::json::parse(R"({
    "n": 3, "degree": 2, "homogeneous": true, "space": {"kind":"lq","q":2,"d":2},
    "terms": [{"subset":[0,2], "coeff":[[1,2],[3,0]]}, {"subset":[1,2], "coeff":[0.5, [0,-1]]}]})");
  const AnyPoly any = polynomial_from_json(j);
  ASSERT_TRUE(std::holds_alternative<TetraPoly>(any));
  const auto& P = std::get<TetraPoly>(any);
  EXPECT_EQ(P.variables(), 3);
  EXPECT_EQ(P.homogeneous_degree(), 2);
  EXPECT_EQ(P.coefficient_of(mask_of({0, 2})).coords, (std::vector<Scalar>{{1, 2}, {3, 0}}));
  EXPECT_EQ(P.coefficient_of(mask_of({1, 2})).coords, (std::vector<Scalar>{{0.5, 0}, {0, -1}}));
  // Round trip
  const auto back = std::get<TetraPoly>(polynomial_from_json(polynomial_to_json(P)));
  EXPECT_EQ(back.terms().size(), P.terms().size());
  EXPECT_EQ(back.coefficient_of(mask_of({0, 2})).coords, P.coefficient_of(mask_of({0, 2})).coords);
}

TEST(PolynomialJson, ReadsAlphaFile) {
  const auto j = nlohmann::json::parse(R"({
    "n": 1, "degree": 2, "space": {"kind":"lq","q":2,"d":1},
    "terms": [{"alpha":[2], "coeff":[[1,0]]}]})");
  const AnyPoly any = polynomial_from_json(j);
  ASSERT_TRUE(std::holds_alternative<GenPoly>(any));
  EXPECT_EQ(std::get<GenPoly>(any).degree(), 2);
}

TEST(PolynomialJson, RejectsMalformed) {
  EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"({
    "n": 3, "space": {"kind":"lq","q":2,"d":1},
    "terms": [{"subset":[0,3], "coeff":[[1,0]]}]})")),
               std::invalid_argument);
  EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"({
    "n": 2, "space": {"kind":"lq","q":2,"d":1},
    "terms": [{"subset":[0], "coeff":[[1,0]]}, {"alpha":[1,1], "coeff":[[1,0]]}]})")),
               std::invalid_argument);
  EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"({
    "n": 2, "degree": 2, "homogeneous": true, "space": {"kind":"lq","q":2,"d":1},
    "terms": [{"subset":[0], "coeff":[[1,0]]}]})")),
               std::invalid_argument);
  EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"({
    "n": 2, "space": {"kind":"lq","q":2,"d":2},
    "terms": [{"subset":[0], "coeff":[[1,0]]}]})")),
               std::invalid_argument);
}
