#include <gtest/gtest.h>

#include "spiralbend/norms2d.hpp"

#include <cmath>
#include <random>

using namespace spiralbend;

namespace {

std::vector<UncondNorm2> builtin_norms() {
  return {UncondNorm2::l1(),
          UncondNorm2::lp(1.5),
          UncondNorm2::l2(),
          UncondNorm2::lp(3.0),
          UncondNorm2::linf(),
          UncondNorm2::weighted_lp({{0.3, 1.0}, {0.7, 4.0}}),
          UncondNorm2::max_functionals({{0.8, 0.8}, {1.0, 0.3}})};
}

// All-pairs chord quotient on a small grid, used as an independent check of
// the adjacent-chord scan.
double all_pairs_lipschitz(const UncondNorm2& z, std::size_t n) {
  std::vector<std::array<double, 2>> u(n + 1);
  for (std::size_t j = 0; j <= n; ++j) u[j] = sphere_point(z, kHalfPi * j / n);
  double best = 0.0;
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      best = std::max(best, z(u[j][0] - u[i][0], u[j][1] - u[i][1]) / (kHalfPi * (j - i) / n));
  return best;
}

}  // namespace

TEST(EvalNorm, BasicValues) {
  EXPECT_DOUBLE_EQ(eval_norm(UncondNorm2::l2(), 3, 4), 5.0);
  EXPECT_DOUBLE_EQ(eval_norm(UncondNorm2::l1(), 1, 0), 1.0);
  EXPECT_DOUBLE_EQ(eval_norm(UncondNorm2::linf(), -2, 1.5), 2.0);
  EXPECT_EQ(eval_norm(UncondNorm2::lp(1.5), 0, 0), 0.0);
}

TEST(EvalNorm, RejectsNonFinite) {
  EXPECT_THROW(eval_norm(UncondNorm2::l2(), NAN, 1), InvalidArgument);
  EXPECT_THROW(eval_norm(UncondNorm2::l2(), 1, INFINITY), InvalidArgument);
}

TEST(EvalNorm, ParseFamilies) {
  EXPECT_EQ(UncondNorm2::parse("l1").lp_exponent(), 1.0);
  EXPECT_EQ(UncondNorm2::parse("l1.5").lp_exponent(), 1.5);
  EXPECT_TRUE(std::isinf(UncondNorm2::parse("linf").lp_exponent()));
  EXPECT_EQ(UncondNorm2::parse("lp:3").lp_exponent(), 3.0);
  EXPECT_THROW(UncondNorm2::parse("l0.5"), InvalidArgument);
  EXPECT_THROW(UncondNorm2::parse("euclid"), InvalidArgument);
  EXPECT_THROW(UncondNorm2::parse("l2x"), InvalidArgument);
}

TEST(SpherePoint, Examples) {
  for (const auto& z : builtin_norms()) {
    auto u = sphere_point(z, 0.0);
    EXPECT_EQ(u[0], 1.0);
    EXPECT_EQ(u[1], 0.0);
  }
  auto e = sphere_point(UncondNorm2::l2(), kPi / 4);
  EXPECT_NEAR(e[0], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(e[1], std::sqrt(0.5), 1e-15);
  auto m = sphere_point(UncondNorm2::linf(), kPi / 4);
  EXPECT_NEAR(m[0], 1.0, 1e-15);
  EXPECT_NEAR(m[1], 1.0, 1e-15);
  EXPECT_NEAR(UncondNorm2::linf()(m[0], m[1]), 1.0, 1e-15);
  EXPECT_THROW(sphere_point(UncondNorm2::l2(), -0.1), InvalidArgument);
  EXPECT_THROW(sphere_point(UncondNorm2::l2(), 1.6), InvalidArgument);
}

TEST(SpherePoint, UnitNormEverywhere) {
  for (const auto& z : builtin_norms())
    for (int j = 0; j <= 1000; ++j) {
      const auto u = sphere_point(z, kHalfPi * j / 1000);
      EXPECT_NEAR(z(u[0], u[1]), 1.0, 1e-12) << z.name() << " j=" << j;
    }
}

TEST(ExtremalConstants, AnalyticValues) {
  auto c2 = extremal_constants(UncondNorm2::l2(), 64);
  EXPECT_NEAR(c2.m_z, 1.0, 1e-8);
  EXPECT_NEAR(c2.M_z, 1.0, 1e-8);
  auto ci = extremal_constants(UncondNorm2::linf(), 64);
  EXPECT_NEAR(ci.m_z, std::sqrt(0.5), 1e-8);
  EXPECT_NEAR(ci.M_z, 1.0, 1e-8);
  auto c1 = extremal_constants(UncondNorm2::l1(), 64);
  EXPECT_NEAR(c1.m_z, 1.0, 1e-8);
  EXPECT_NEAR(c1.M_z, std::sqrt(2.0), 1e-8);
  EXPECT_THROW(extremal_constants(UncondNorm2::l2(), 63), InvalidArgument);
}

TEST(ExtremalConstants, BracketsAndBounds) {
  for (const auto& z : builtin_norms()) {
    auto c = extremal_constants(z);
    EXPECT_GE(c.m_z, std::sqrt(0.5) - 1e-12);
    EXPECT_LE(c.m_z, 1.0 + 1e-12);
    EXPECT_GE(c.M_z, 1.0 - 1e-12);
    EXPECT_LE(c.M_z, std::sqrt(2.0) + 1e-12);
    for (int j = 0; j <= 997; ++j) {
      const double t = kHalfPi * j / 997;
      const double v = z(std::cos(t), std::sin(t));
      EXPECT_GE(v, c.m_z - 1e-12);
      EXPECT_LE(v, c.M_z + 1e-12);
    }
  }
}

TEST(CurveLipschitz, KnownValues) {
  const double c2 = curve_lipschitz(UncondNorm2::l2(), 4096);
  EXPECT_GE(c2, 0.999);
  EXPECT_LE(c2, 1.0);
  // u(tau) = (1, tan tau) on [0, pi/4]; speed sec^2 peaks at 2.
  EXPECT_NEAR(curve_lipschitz(UncondNorm2::linf(), 4096), 2.0, 1e-3);
  // Speed of u for l1 is 2/(cos+sin)^2 in l1, largest at the endpoints.
  EXPECT_NEAR(curve_lipschitz(UncondNorm2::l1(), 4096), 2.0, 1e-3);
  // Endpoint chord of the Euclidean quarter circle.
  const double chord = std::sqrt(2.0) / kHalfPi;
  EXPECT_NEAR(chord, 2.0 * std::sqrt(2.0) / kPi, 1e-15);
  EXPECT_NEAR(chord, 0.9003, 1e-4);
  EXPECT_THROW(curve_lipschitz(UncondNorm2::l2(), 255), InvalidArgument);
}

TEST(CurveLipschitz, AgreesWithAllPairsOracle) {
  for (const auto& z : builtin_norms()) {
    const double oracle = all_pairs_lipschitz(z, 256);
    const double scan = curve_lipschitz(z, 256);
    // The scan adds finite-difference speeds, so it can only be larger.
    EXPECT_GE(scan, oracle - 1e-12) << z.name();
    EXPECT_LE(scan, oracle * 1.01) << z.name();
  }
}

TEST(CurveLipschitz, RangeAndRefinementMonotone) {
  for (const auto& z : builtin_norms()) {
    double prev = 0.0;
    std::vector<double> vals;
    for (int n = 8; n <= 14; ++n) {
      const double c = curve_lipschitz(z, std::size_t{1} << n);
      EXPECT_GE(c, prev - 1e-12) << z.name() << " n=" << n;
      EXPECT_GE(c, 2.0 / kPi);
      EXPECT_LE(c, 4.0);
      prev = c;
      vals.push_back(c);
    }
    EXPECT_LE(std::abs(vals[6] - vals[5]), 1e-4) << z.name();
  }
}

TEST(Validate, ExactFamiliesPass) {
  for (const auto& z : builtin_norms()) {
    auto rep = validate_unconditional(z, 10000, 11);
    EXPECT_TRUE(rep.ok()) << z.name();
    EXPECT_LE(rep.worst, 1e-12) << z.name();
  }
}

TEST(Validate, TabulatedWithinInterpolationTolerance) {
  const auto exact = UncondNorm2::lp(1.5);
  const auto tab = tabulate(exact, 512);
  EXPECT_EQ(tab.family(), NormFamily::tabulated_radial);
  const double tol = tab.interpolation_tolerance();
  EXPECT_GT(tol, 0.0);
  auto rep = validate_unconditional(tab, 10000, 5);
  EXPECT_TRUE(rep.ok());
  // Against the generating family.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double a = g(rng), b = g(rng);
    worst = std::max(worst, std::abs(tab(a, b) - exact(a, b)) / exact(a, b));
  }
  EXPECT_LE(worst, 2.0 * tol + 1e-15);
  EXPECT_LE(worst, 1e-4);
}

TEST(Validate, SignedEvaluatorFailsSymmetry) {
  auto bad = UncondNorm2::custom("a-b", [](double a, double b) { return a - b; });
  auto rep = validate_unconditional(bad, 100, 1);
  EXPECT_FALSE(rep.ok());
  EXPECT_NE(std::find(rep.failures.begin(), rep.failures.end(), "sign-symmetry"), rep.failures.end());
}

TEST(Validate, L1LinfSandwich) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (const auto& z : builtin_norms())
    for (int k = 0; k < 2000; ++k) {
      const double a = g(rng), b = g(rng);
      EXPECT_LE(z(a, b), std::abs(a) + std::abs(b) + 1e-12);
      EXPECT_GE(z(a, b), std::max(std::abs(a), std::abs(b)) - 1e-12);
    }
}

TEST(Tabulated, RejectsMalformedTables) {
  EXPECT_THROW(UncondNorm2::tabulated({0.0, 1.0}, {1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(UncondNorm2::tabulated({0.0, 1.0, kHalfPi}, {1.0, 0.8, 0.9}), InvalidArgument);
  EXPECT_THROW(UncondNorm2::tabulated({0.0, 1.0, 0.9, kHalfPi}, {1.0, 1.0, 1.0, 1.0}),
               InvalidArgument);
  EXPECT_NO_THROW(UncondNorm2::tabulated({0.0, kHalfPi}, {1.0, 1.0}));
}

TEST(WeightedLp, RequiresConvexWeights) {
  EXPECT_THROW(UncondNorm2::weighted_lp({{0.5, 1.0}, {0.6, 2.0}}), InvalidArgument);
  EXPECT_THROW(UncondNorm2::weighted_lp({{1.0, 0.5}}), InvalidArgument);
}
