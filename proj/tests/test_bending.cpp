#include <gtest/gtest.h>

#include "spiralbend/bending.hpp"

#include <random>

using namespace spiralbend;

namespace {

Vec random_vec(std::mt19937_64& rng, int n, double radius) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int k = 0; k < n; ++k) v[k] = g(rng);
  return v * (radius / v.norm());
}

}  // namespace

TEST(OuterRadius, Arithmetic) {
  auto a = solve_outer_radius(0.2, 1.0, 4.0);
  EXPECT_NEAR(a.log_value, 10 * kPi, 1e-13);
  EXPECT_NEAR(a.value / 4.40e13, 1.0, 2e-3);
  auto b = solve_outer_radius(0.5, 1.0, 4.0);
  EXPECT_NEAR(b.log_value, 4 * kPi, 1e-14);
  EXPECT_NEAR(b.value / 2.8675e5, 1.0, 1e-4);
  auto c = solve_outer_radius(0.1, 2.0, 1.0);
  EXPECT_NEAR(c.value / (2 * std::exp(5 * kPi)), 1.0, 1e-14);
  EXPECT_THROW(solve_outer_radius(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(solve_outer_radius(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(solve_outer_radius(0.5, 0.0), InvalidArgument);
  EXPECT_THROW(solve_outer_radius(0.5, 1.0, 4.5), InvalidArgument);
  EXPECT_THROW(solve_outer_radius(0.5, 1.0, 0.5), InvalidArgument);
}

TEST(OuterRadius, OverflowKeepsLog) {
  auto r = solve_outer_radius(0.001, 1.0, 4.0);
  EXPECT_TRUE(r.overflow());
  EXPECT_NEAR(r.log_value, 2000 * kPi, 1e-9);
  auto p = BendingParams::make(0.001, 1.0, UncondNorm2::l2(), 2);
  EXPECT_EQ(tau(1e300, p), kHalfPi * (std::log(1e300)) / p.R.log_value);
  BendingMap t(p);
  Vec x = (Vec(2) << 1e300, 1e299).finished();
  EXPECT_NEAR(t.image_norm(t.apply_flat(x)) / norm2(x), 1.0, 1e-12);
}

TEST(Tau, Values) {
  auto p = BendingParams::make(0.2, 1.0, UncondNorm2::l2(), 3);
  EXPECT_EQ(tau(0.0, p), 0.0);
  EXPECT_EQ(tau(1.0, p), 0.0);
  EXPECT_EQ(tau(p.R.value, p), kHalfPi);
  EXPECT_EQ(tau(2 * p.R.value, p), kHalfPi);
  EXPECT_NEAR(tau(std::sqrt(p.R.value), p), kPi / 4, 1e-14);
  // (eps/c) ln(R/r) = pi/2
  EXPECT_NEAR(p.eps / p.c * (p.R.log_value - p.r.log_value), kHalfPi, 1e-14);
}

TEST(Tau, MonotoneAndMeanValueBound) {
  auto p = BendingParams::make(0.1, 2.0, UncondNorm2::l1(), 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(p.r.log_value, p.R.log_value);
  for (int k = 0; k < 100000; ++k) {
    double t1 = std::exp(u(rng)), t2 = std::exp(u(rng));
    if (t1 > t2) std::swap(t1, t2);
    const double d = tau(t2, p) - tau(t1, p);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, p.eps / p.c * (t2 - t1) / t1 * (1 + 1e-12) + 1e-15);
  }
}

TEST(Coefficients, Regimes) {
  for (auto z : {UncondNorm2::l1(), UncondNorm2::l2(), UncondNorm2::linf(), UncondNorm2::lp(1.5)}) {
    auto p = BendingParams::make(0.2, 1.0, z, 2);
    EXPECT_EQ(coefficients_at(0.5, p), std::make_pair(1.0, 0.0));
    EXPECT_EQ(coefficients_at(1.0, p), std::make_pair(1.0, 0.0));
    EXPECT_EQ(coefficients_at(p.R.value, p), std::make_pair(0.0, 1.0));
    EXPECT_EQ(coefficients_at(1e20, p), std::make_pair(0.0, 1.0));
    for (double lt = 0.0; lt <= p.R.log_value; lt += 0.01) {
      auto [c, s] = coefficients_at(std::exp(lt), p);
      EXPECT_NEAR(z(c, s), 1.0, 1e-12);
    }
  }
  auto p = BendingParams::make(0.2, 1.0, UncondNorm2::l2(), 2);
  auto [c, s] = coefficients_at(std::sqrt(p.R.value), p);
  EXPECT_NEAR(c, std::sqrt(0.5), 1e-13);
  EXPECT_NEAR(s, std::sqrt(0.5), 1e-13);
}

TEST(Apply, ExactRegimesAndNormPreservation) {
  std::mt19937_64 rng(7);
  for (auto z : {UncondNorm2::l1(), UncondNorm2::l2(), UncondNorm2::linf()}) {
    BendingMap t(BendingParams::make(0.1, 3.0, z, 4));
    for (int k = 0; k < 1000; ++k) {
      Vec x = random_vec(rng, 4, 3.0 * std::exp(-3.0 * (k % 7) / 7.0));
      auto [a, b] = t.apply(x);
      EXPECT_TRUE((a.array() == x.array()).all());
      EXPECT_TRUE((b.array() == 0.0).all());
      Vec y = random_vec(rng, 4, t.params().R.value * (1.0 + k));
      auto [c, d] = t.apply(y);
      EXPECT_TRUE((c.array() == 0.0).all());
      EXPECT_TRUE((d.array() == y.array()).all());
    }
    EXPECT_THROW(t.apply(Vec::Zero(3)), InvalidArgument);
  }
}

TEST(Apply, NormPreservationMillionSamples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 1.0);
  for (auto z : {UncondNorm2::l1(), UncondNorm2::lp(1.5), UncondNorm2::l2(), UncondNorm2::linf()}) {
    BendingMap t(BendingParams::make(0.05, 1.0, z, 2));
    const double span = t.params().R.log_value + 6.0;
    double worst = 0.0;
    for (int k = 0; k < 250000; ++k) {
      Vec x = random_vec(rng, 2, std::exp(u(rng) / 6.0 * span + (k % 2) * span / 2));
      worst = std::max(worst, std::abs(t.image_norm(t.apply_flat(x)) - x.norm()) / x.norm());
    }
    EXPECT_LE(worst, 1e-10) << z.name();
  }
}

TEST(Apply, ContinuousAcrossBoundaries) {
  // One-sided linear extrapolations to the boundary radius from inside and
  // outside; a jump in T would survive, a kink only costs O(step^2).
  std::mt19937_64 rng(5);
  for (auto z : {UncondNorm2::l1(), UncondNorm2::l2(), UncondNorm2::linf()}) {
    BendingMap t(BendingParams::make(0.2, 2.0, z, 3));
    for (const Radius& b : {t.params().r, t.params().R}) {
      Vec dir = random_vec(rng, 3, 1.0);
      const double step = 1e-6 * t.params().r.value;
      auto at = [&](double rad) { return t.apply_flat(dir * rad); };
      Vec left = 2 * at(b.value - step) - at(b.value - 2 * step);
      Vec right = 2 * at(b.value + step) - at(b.value + 2 * step);
      const double jump = t.image_norm(left - right);
      EXPECT_LE(jump, 1e-8 * std::max(1.0, b.value / t.params().r.value)) << z.name();
    }
  }
}

TEST(VerifyDistortion, RatiosInsideBudget) {
  for (auto z : {UncondNorm2::l1(), UncondNorm2::l2(), UncondNorm2::linf()}) {
    BendingMap t(BendingParams::make(0.1, 1.0, z, 4));
    auto rep = verify_distortion(t, 100000, 42);
    EXPECT_EQ(rep.violations, 0u) << z.name();
    EXPECT_EQ(rep.str_violations, 0u) << z.name();
    EXPECT_GE(rep.ratios.min_ratio, 0.9);
    EXPECT_LE(rep.ratios.max_ratio, 1.1);
    EXPECT_LE(rep.ratios.distortion, 1.1 / 0.9);
    EXPECT_GT(rep.str_checked, 90000u);
    EXPECT_LE(rep.norm_defect, 1e-10);
  }
}

TEST(VerifyDistortion, ExactInIsometricRegimes) {
  BendingMap t(BendingParams::make(0.2, 1.0, UncondNorm2::l1(), 3));
  RadialLaw inner{std::log(1e-3), -1e-9};
  auto a = verify_distortion(t, 4000, 1, inner);
  EXPECT_NEAR(a.ratios.min_ratio, 1.0, 1e-12);
  EXPECT_NEAR(a.ratios.max_ratio, 1.0, 1e-12);
  RadialLaw outer{t.params().R.log_value + 1e-9, t.params().R.log_value + 5.0};
  auto b = verify_distortion(t, 4000, 1, outer);
  EXPECT_NEAR(b.ratios.min_ratio, 1.0, 1e-12);
  EXPECT_NEAR(b.ratios.max_ratio, 1.0, 1e-12);
}

TEST(VerifyDistortion, WiderDeclaredRadiiStillPass) {
  BendingMap t(BendingParams::make(0.2, 1.0, UncondNorm2::linf(), 2));
  // Sampling range of a bending declared with r1 = r/1e3, R1 = 1e3 R.
  RadialLaw wide{t.params().r.log_value - std::log(1e4), t.params().R.log_value + std::log(1e4)};
  auto rep = verify_distortion(t, 50000, 9, wide);
  EXPECT_EQ(rep.violations, 0u);
}

TEST(VerifyDistortion, UndersizedCurveConstantIsCaught) {
  // With c below c_Z the strong bound must fail somewhere; linf has c_Z = 2.
  BendingMap t(BendingParams::make(0.2, 1.0, UncondNorm2::linf(), 2, 1.0));
  auto rep = verify_distortion(t, 50000, 3);
  EXPECT_GT(rep.str_violations, 0u);
}

TEST(VerifyDistortion, DeterministicAcrossThreads) {
  BendingMap t(BendingParams::make(0.1, 1.0, UncondNorm2::lp(1.5), 8));
  auto a = verify_distortion(t, 30000, 77, {}, 1);
  auto b = verify_distortion(t, 30000, 77, {}, 4);
  EXPECT_EQ(a.ratios.min_ratio, b.ratios.min_ratio);
  EXPECT_EQ(a.ratios.max_ratio, b.ratios.max_ratio);
  EXPECT_EQ(a.ratios.argmax, b.ratios.argmax);
  EXPECT_EQ(a.str_worst, b.str_worst);
}
