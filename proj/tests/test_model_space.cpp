#include <gtest/gtest.h>

#include "spiralbend/model_space.hpp"

#include <random>

using namespace spiralbend;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

Subspace random_plane(std::mt19937_64& rng, int n = 4) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = g(rng);
  return Subspace::span(m);
}

Vec gaussian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST(DirectSum, Examples) {
  auto d2 = DirectSum::euclidean_blocks(2, 2, UncondNorm2::l2());
  EXPECT_DOUBLE_EQ(d2(v2(3, 0), v2(0, 4)), 5.0);
  auto dinf = DirectSum::euclidean_blocks(2, 2, UncondNorm2::linf());
  EXPECT_DOUBLE_EQ(dinf(v2(1, 0), v2(0, 1)), 1.0);
  for (auto z : {UncondNorm2::l1(), UncondNorm2::lp(1.5), UncondNorm2::linf()}) {
    auto d = DirectSum::euclidean_blocks(2, 2, z);
    EXPECT_DOUBLE_EQ(d(v2(0.3, -0.4), v2(0, 0)), 0.5);
    EXPECT_DOUBLE_EQ(d(v2(0, 0), v2(0.3, -0.4)), 0.5);
  }
  EXPECT_THROW(d2(Vec::Zero(3), v2(0, 1)), InvalidArgument);
}

TEST(DirectSum, ProjectionsHaveNormOne) {
  std::mt19937_64 rng(1);
  for (auto z : {UncondNorm2::l1(), UncondNorm2::lp(1.5), UncondNorm2::l2(), UncondNorm2::linf()}) {
    auto d = DirectSum::euclidean_blocks(3, 3, z);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
      Vec u = gaussian(rng, 3), v = gaussian(rng, 3);
      const double n = d(u, v);
      worst = std::max({worst, d(u, Vec::Zero(3)) / n, d(Vec::Zero(3), v) / n});
    }
    EXPECT_LE(worst, 1.0 + 1e-12) << z.name();
  }
}

TEST(ModelSpace, NormFormula) {
  ModelSpace m(2, {UncondNorm2::l1(), UncondNorm2::linf(), UncondNorm2::l2()});
  EXPECT_EQ(m.blocks(), 6u);
  EXPECT_EQ(m.dim(), 12u);
  // single nonzero block carries its Euclidean norm
  for (std::size_t j = 1; j <= 6; ++j) {
    Vec x = Vec::Zero(12);
    m.block(x, j) = v2(3, 4);
    EXPECT_DOUBLE_EQ(m.norm(x), 5.0);
  }
  // pair (1,2) with Z_1 = l1
  Vec x = Vec::Zero(12);
  m.block(x, 1) = v2(3, 4);
  m.block(x, 2) = v2(0, 1);
  EXPECT_DOUBLE_EQ(m.norm(x), 6.0);
  // blocks (2,3) straddle two pairs: l2 of the block norms
  for (std::size_t i = 1; i <= 2; ++i) {
    Vec y = Vec::Zero(12);
    m.block(y, 2 * i) = v2(3, 0);
    m.block(y, 2 * i + 1) = v2(0, 4);
    EXPECT_DOUBLE_EQ(m.norm(y), 5.0);
  }
  // agrees with direct_sum_norm when one pair is active
  std::mt19937_64 rng(4);
  auto d = DirectSum::euclidean_blocks(2, 2, UncondNorm2::linf());
  for (int k = 0; k < 100; ++k) {
    Vec u = gaussian(rng, 2), v = gaussian(rng, 2);
    Vec z = Vec::Zero(12);
    m.block(z, 3) = u;
    m.block(z, 4) = v;
    EXPECT_NEAR(m.norm(z), d(u, v), 1e-15 * d(u, v));
  }
  EXPECT_THROW(m.norm(Vec::Zero(11)), InvalidArgument);
}

TEST(ModelSpace, NormAxiomsOnSamples) {
  ModelSpace m(3, {UncondNorm2::lp(1.5), UncondNorm2::linf(), UncondNorm2::l1()});
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20000; ++k) {
    Vec x = gaussian(rng, 18), y = gaussian(rng, 18);
    const double t = std::exp(gaussian(rng, 1)[0]) * ((k & 1) ? -1.0 : 1.0);
    EXPECT_LE(m.norm(x + y), m.norm(x) + m.norm(y) + 1e-12);
    EXPECT_NEAR(m.norm(t * x), std::abs(t) * m.norm(x), 1e-12 * std::abs(t) * m.norm(x));
  }
  EXPECT_EQ(m.norm(Vec::Zero(18)), 0.0);
}

TEST(ModelSpace, SurvivesHugeMagnitudes) {
  ModelSpace m(2, {UncondNorm2::l2(), UncondNorm2::l2()});
  Vec x = Vec::Zero(8);
  x[0] = 3e200;
  x[7] = 4e200;
  EXPECT_NEAR(m.norm(x) / 5e200, 1.0, 1e-15);
}

TEST(MaxRenorm, Examples) {
  auto e = euclidean();
  Vec x1 = (Vec(4) << 1, 2, 0, 0).finished(), x2 = (Vec(4) << 0, 0, 3, 1).finished();
  EXPECT_NEAR(max_renorm(x1, x2, e, e, e), std::sqrt(5.0 + 10.0), 1e-15);
  EXPECT_NEAR(max_renorm(x1, Vec::Zero(4), e, e, e), std::sqrt(5.0), 1e-15);
}

TEST(MaxRenorm, SandwichWithCertifiedSlots) {
  // Ambient: average of l2 and l4 on R^4, slots span(e1,e2) and span(e3,e4).
  // On each slot the ambient is (1+gamma)-equivalent to the Euclidean norm
  // once rescaled, gamma = 0.1 certified by the l4/l2 ratio bound.
  const double gamma = 0.1;
  auto ambient = [](const Vec& v) {
    return 0.5 * v.norm() + 0.5 * std::pow(v.array().pow(4).sum(), 0.25);
  };
  // ||v||_4 >= 2^{-1/4} ||v||_2 on R^2, so ambient in [0.92 |v|, |v|].
  const double lo = 0.5 + 0.5 * std::pow(2.0, -0.25);
  ASSERT_GE(lo * (1 + gamma), 1.0);
  auto tilde = [](const Vec& v) { return v.norm(); };
  std::mt19937_64 rng(2);
  double worst_lo = kInf, worst_hi = 0.0;
  for (int k = 0; k < 10000; ++k) {
    Vec x1 = Vec::Zero(4), x2 = Vec::Zero(4);
    x1.head(2) = gaussian(rng, 2);
    x2.tail(2) = gaussian(rng, 2);
    // Renormed ambient: ||.|| scaled so slots are (1+gamma) close from above.
    auto amb = [&](const Vec& v) { return ambient(v) * (1 + gamma); };
    const double n = max_renorm(x1, x2, amb, tilde, tilde);
    const double base = amb(x1 + x2);
    worst_lo = std::min(worst_lo, n / base);
    worst_hi = std::max(worst_hi, n / base);
  }
  EXPECT_GE(worst_lo, 1.0);
  EXPECT_LE(worst_hi, (1 + gamma) * (1 + gamma));
  EXPECT_NEAR((1 + gamma) * (1 + gamma), 1.21, 1e-15);
}

TEST(SphericalOpening, Examples) {
  auto y1 = Subspace::coordinate(4, {0, 1});
  auto y2 = Subspace::coordinate(4, {2, 3});
  EXPECT_NEAR(spherical_opening(y1, y1), 0.0, 1e-15);
  EXPECT_NEAR(spherical_opening(y1, y2), std::sqrt(2.0), 1e-15);
  for (double th : {0.1, 0.5, 1.0}) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(4, 2);
    f(0, 0) = std::cos(th);
    f(2, 0) = std::sin(th);
    f(1, 1) = 1.0;
    Subspace w = Subspace::span(f);
    EXPECT_NEAR(spherical_opening(y1, w), 2 * std::sin(th / 2), 1e-14);
    EXPECT_NEAR(spherical_opening_grid(y1, w, 720), 2 * std::sin(th / 2), 2 * (2 * kPi / 720));
  }
  EXPECT_THROW(Subspace(Eigen::MatrixXd::Zero(4, 0)), InvalidArgument);
}

TEST(SphericalOpening, GridAgreesOnRandomPairs) {
  std::mt19937_64 rng(12);
  const std::size_t steps = 360;
  for (int k = 0; k < 100; ++k) {
    auto a = random_plane(rng), b = random_plane(rng);
    EXPECT_NEAR(spherical_opening(a, b), spherical_opening_grid(a, b, steps), 2 * (2 * kPi / steps));
  }
}

TEST(SphericalOpening, IsAMetric) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 2000; ++k) {
    auto a = random_plane(rng), b = random_plane(rng), c = random_plane(rng);
    const double ab = spherical_opening(a, b), ba = spherical_opening(b, a);
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_LE(ab, spherical_opening(a, c) + spherical_opening(c, b) + 1e-9);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, std::sqrt(2.0) + 1e-12);
  }
}
