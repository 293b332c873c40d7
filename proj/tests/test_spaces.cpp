#include <gtest/gtest.h>

#include "decoup/spaces.hpp"
#include "test_support.hpp"

using namespace decoup;
using testing_support::Gen;

TEST(Norm, PythagoreanTriple) {
  SpaceVector v(NormedSpace::lq(2, 3), {3.0, 4.0, 0.0});
  EXPECT_DOUBLE_EQ(norm(v), 5.0);
}

TEST(Norm, SubsetSupIsMaxModulus) {
  SpaceVector v(NormedSpace::subset_sup(3, 2), {1.0, -2.0, 1.0});
  EXPECT_DOUBLE_EQ(norm(v), 2.0);
}

TEST(Norm, L1OfComplexVector) {
  SpaceVector v(NormedSpace::lq(1, 2), {Scalar(1, 0), Scalar(0, 1)});
  EXPECT_DOUBLE_EQ(norm(v), 2.0);
}

TEST(Norm, ZeroOnlyForZeroVector) {
  const NormedSpace s = NormedSpace::lq(3, 4);
  EXPECT_EQ(norm(SpaceVector::zero(s)), 0.0);
  EXPECT_GT(norm(SpaceVector(s, {0.0, 0.0, 1e-300, 0.0})), 0.0);
}

TEST(Norm, DimensionMismatchThrows) {
  EXPECT_THROW(SpaceVector(NormedSpace::lq(2, 3), {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(NormedSpace::lq(2, 3).norm(std::vector<Scalar>{1.0}), std::invalid_argument);
}

TEST(Norm, NonFiniteCoordinatesRejected) {
  EXPECT_THROW(SpaceVector(NormedSpace::lq(2, 1), {Scalar(NAN, 0)}), std::invalid_argument);
}

TEST(Norm, NormPowMatchesPower) {
  Gen g(5);
  for (int t = 0; t < 50; ++t) {
    const NormedSpace s = g.space();
    const auto v = g.vec(s.dimension());
    const double p = 1.0 + 3.0 * g.uniform();
    EXPECT_NEAR(s.norm_pow(v, p), std::pow(s.norm(v), p), 1e-12 * std::pow(s.norm(v), p));
  }
}

TEST(Norm, MatchesDefinition) {
  Gen g(6);
  for (int t = 0; t < 100; ++t) {
    const NormedSpace s = g.space();
    const auto v = g.vec(s.dimension());
    EXPECT_NEAR(s.norm(v), testing_support::ref_norm(s, v), 1e-12 * s.norm(v));
  }
}

TEST(Space, InvalidParameters) {
  EXPECT_THROW(NormedSpace::lq(0.5, 3), std::invalid_argument);
  EXPECT_THROW(NormedSpace::lq(2, 0), std::invalid_argument);
  EXPECT_THROW(NormedSpace::subset_sup(3, 4), std::invalid_argument);
  EXPECT_THROW(NormedSpace::subset_sup(60, 30), std::length_error);
}

TEST(Space, SubsetSupDimensionIsBinomial) {
  for (int n = 1; n <= 12; ++n)
    for (int m = 0; m <= n; ++m) {
      std::uint64_t b = 1;
      for (int i = 1; i <= m; ++i) b = b * static_cast<std::uint64_t>(n - m + i) / static_cast<std::uint64_t>(i);
      EXPECT_EQ(NormedSpace::subset_sup(n, m).dimension(), b);
    }
}

TEST(Space, SubsetIndexIsColexBijection) {
  const NormedSpace s = NormedSpace::subset_sup(7, 3);
  SubsetMask prev = 0;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const SubsetMask A = s.subset_at(i);
    EXPECT_EQ(subset_size(A), 3);
    EXPECT_EQ(s.subset_index(A), i);
    if (i > 0) EXPECT_LT(prev, A);  // colex order is increasing mask order
    prev = A;
  }
  EXPECT_THROW(s.subset_index(0b11), std::out_of_range);
  EXPECT_THROW(s.subset_at(s.dimension()), std::out_of_range);
}

TEST(BasisVector, CanonicalLq) {
  const auto e = canonical_basis_vector(NormedSpace::lq(2, 3), 0);
  EXPECT_EQ(e.coords, (std::vector<Scalar>{1.0, 0.0, 0.0}));
  EXPECT_THROW(canonical_basis_vector(NormedSpace::lq(2, 3), 5), std::out_of_range);
}

TEST(BasisVector, SubsetSlot) {
  const NormedSpace s = NormedSpace::subset_sup(3, 2);
  const SubsetMask A = mask_of({0, 2});
  const auto e = subset_basis_vector(s, A);
  for (std::size_t i = 0; i < s.dimension(); ++i) EXPECT_EQ(e.coords[i], s.subset_at(i) == A ? 1.0 : 0.0);
  EXPECT_THROW(subset_basis_vector(s, mask_of({0})), std::out_of_range);
}

TEST(NormProperties, Homogeneity) {
  Gen g(11);
  for (int t = 0; t < 200; ++t) {
    const NormedSpace s = g.space();
    auto v = g.vec(s.dimension());
    const Scalar c = g.complex_normal();
    const double before = s.norm(v);
    for (auto& x : v) x *= c;
    EXPECT_NEAR(s.norm(v), std::abs(c) * before, 1e-12 * std::abs(c) * before);
  }
}

TEST(NormProperties, TriangleInequality) {
  Gen g(12);
  for (int t = 0; t < 200; ++t) {
    const NormedSpace s = g.space();
    const auto a = g.vec(s.dimension());
    const auto b = g.vec(s.dimension());
    std::vector<Scalar> sum(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
    EXPECT_LE(s.norm(sum), s.norm(a) + s.norm(b) + 1e-12);
  }
}

TEST(NormProperties, NonincreasingInQ) {
  Gen g(13);
  const double qs[] = {1.0, 1.25, 2.0, 3.0, 7.0, kInfinity};
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = static_cast<std::size_t>(g.range(1, 6));
    const auto v = g.vec(d);
    double prev = std::numeric_limits<double>::infinity();
    for (double q : qs) {
      const double x = NormedSpace::lq(q, d).norm(v);
      EXPECT_LE(x, prev * (1 + 1e-14));
      prev = x;
    }
  }
}

TEST(SpaceJson, RoundTrip) {
  for (const NormedSpace& s : {NormedSpace::lq(2, 4), NormedSpace::lq(kInfinity, 2), NormedSpace::subset_sup(10, 3)}) {
    const nlohmann::json j = s;
    EXPECT_EQ(j.get<NormedSpace>(), s);
  }
  EXPECT_EQ(nlohmann::json::parse(R"({"kind":"lq","q":2,"d":4})").get<NormedSpace>(), NormedSpace::lq(2, 4));
  EXPECT_EQ(nlohmann::json::parse(R"({"kind":"subset_sup","n":10,"m":3})").get<NormedSpace>(),
            NormedSpace::subset_sup(10, 3));
  EXPECT_THROW(nlohmann::json::parse(R"({"kind":"banach"})").get<NormedSpace>(), std::invalid_argument);
}
