#include "spiralbend/polygon_cover.hpp"

#include <gtest/gtest.h>

using namespace spiralbend;

namespace {

// Radius of the unit disk at height y, computed independently.
double disk_radius(double y) { return std::sqrt(1.0 - y * y); }

}  // namespace

TEST(PolygonCover, DiskProfileMatchesClosedForm) {
  const auto p = sample_profile(Body2::disk(), 16);
  EXPECT_FALSE(p.flat_top);
  EXPECT_EQ(p.r[0], 0.0);
  EXPECT_EQ(p.r[16], 1.0);
  for (std::size_t i = 1; i < 16; ++i) EXPECT_NEAR(p.r[i], disk_radius(p.height(i)), 1e-12);
  EXPECT_NEAR(p.r[1], 0.34798527267687634, 1e-12);
}

TEST(PolygonCover, DiskPolygonCertified) {
  const auto p = sample_profile(Body2::disk(), 16);
  const auto c = build_polygon(p);
  EXPECT_TRUE(c.sharp_top);
  EXPECT_TRUE(c.degenerate.empty());
  const double a = ((1 + 1.0 / 16) * p.r[1] - 1.0 / 16) /
                   ((1 - 2.0 / 16 - 1.0 / 256) * p.r[1] + 1.0 / 16);
  EXPECT_NEAR(c.alpha, a, 1e-15);
  EXPECT_NEAR(c.R[0].x, p.r[1] * a, 1e-12);
  EXPECT_NEAR(c.R[0].y, 1.0 / 16 * a + 1.0, 1e-12);
  const auto cert = verify_containment(c, p);
  for (const auto& cl : cert.clauses) EXPECT_TRUE(cl.holds) << cl.name << " " << cl.index;
  EXPECT_TRUE(cert.counterexamples.empty());
  EXPECT_TRUE(cert.certified);
  EXPECT_LE(cert.max_sample_gauge, 1 + omega(1.0 / 16));
  EXPECT_GE(cert.samples, 10000u);
}

TEST(PolygonCover, OuterCornersLieOutsideChords) {
  const auto p = sample_profile(Body2::disk(), 16);
  const auto c = build_polygon(p);
  for (std::size_t i = 1; i < 16; ++i) {
    const Point2 e = c.P[i + 1] - c.P[i];
    const double side_r = cross(e, c.R[i] - c.P[i]);
    const double side_o = cross(e, Point2{0, 0} - c.P[i]);
    EXPECT_LT(side_r * side_o, 0.0) << i;
  }
}

TEST(PolygonCover, ExtensionPointsMatchIncrementFormula) {
  for (const auto& body : {Body2::disk(), Body2::superellipse(3.0), Body2::diamond()}) {
    const auto p = sample_profile(body, 12);
    const auto c = build_polygon(p);
    const double d = p.delta;
    for (std::size_t i = 1; i + 1 <= p.k; ++i)
      EXPECT_NEAR(c.Q[i - 1].x, p.r[i - 1] + 2 * d * p.r[i] + (p.L(i) - p.L(i + 1)), 1e-14);
    for (std::size_t i = 2; i <= p.k; ++i)
      EXPECT_NEAR(c.T[i].x, p.r[i] + 2 * d * p.r[i - 1] + (p.L(i - 1) - p.L(i)), 1e-14);
    EXPECT_NEAR(c.Q[p.k - 1].x, 2 + 2 * d - p.r[p.k - 1], 1e-15);
  }
}

TEST(PolygonCover, SquareFlatTop) {
  const auto p = sample_profile(Body2::square(), 10);
  EXPECT_TRUE(p.flat_top);
  const auto c = build_polygon(p);
  EXPECT_FALSE(c.sharp_top);
  EXPECT_NEAR(c.R[0].y, 1.0, 1e-15);
  EXPECT_NEAR(c.R[0].x, 1.2, 1e-14);
  // Interior corners of the square sit half a step below P_i.
  EXPECT_NEAR(c.R[3].x, 1.15, 1e-14);
  EXPECT_NEAR(c.R[3].y, p.height(3) - 0.05, 1e-14);
  EXPECT_TRUE(verify_containment(c, p).certified);
}

TEST(PolygonCover, StandardBodiesCertifyAcrossK) {
  for (const auto& body : {Body2::disk(), Body2::square(), Body2::diamond(), Body2::superellipse(3.0),
                           Body2::lp_ball(1.5)})
    for (std::size_t k : {5u, 8u, 16u, 32u, 64u}) {
      const auto p = sample_profile(body, k);
      const auto cert = verify_containment(build_polygon(p), p, 10000);
      EXPECT_TRUE(cert.certified) << body.name() << " k=" << k;
    }
}

TEST(PolygonCover, StretchInvariantHolds) {
  for (const auto& body : {Body2::disk(), Body2::diamond(), Body2::superellipse(3.0)}) {
    const auto p = sample_profile(body, 20);
    const double d = p.delta, w = omega(d);
    for (std::size_t i = 1; i + 1 <= p.k; ++i) {
      EXPECT_GT((1 + w) * p.r[i], (1 + 4 * d) * p.r[i]);
      EXPECT_GE((1 + 4 * d) * p.r[i] + 1e-15, p.r[i - 1] + 2 * d * p.r[i] + (p.L(i) - p.L(i + 1)));
    }
  }
}

TEST(PolygonCover, RejectsBadProfiles) {
  EXPECT_THROW(profile_from_samples({0.0, 0.2, 0.4, 0.6, 0.8, 0.9}), InvalidBody);
  // Increments grow: not concave.
  EXPECT_THROW(profile_from_samples({0.0, 0.1, 0.2, 0.4, 0.7, 1.0}), InvalidBody);
  EXPECT_THROW(profile_from_samples({0.0, 0.5, 1.0}), InvalidArgument);
  EXPECT_THROW(sample_profile(Body2::disk(), 4), InvalidArgument);
  EXPECT_THROW(sample_profile(Body2::disk().stretched(2.0, 1.0), 8), InvalidBody);
}

TEST(PolygonCover, RawSamplesCertify) {
  const auto p = profile_from_samples({0.0, 0.45, 0.7, 0.85, 0.95, 1.0});
  EXPECT_FALSE(p.flat_top);
  const auto cert = verify_containment(build_polygon(p), p);
  EXPECT_TRUE(cert.counterexamples.empty());
}

TEST(PolygonCover, RadialFunctionChecks) {
  EXPECT_TRUE(check_radial_function([](double t) { return std::cos(kHalfPi * t); }).ok());
  EXPECT_TRUE(check_radial_function([](double t) { return std::sqrt(1 - t * t); }).ok());
  const auto bad = check_radial_function([](double t) { return t * t; });
  EXPECT_FALSE(bad.ok());
  EXPECT_GT(bad.worst_concavity, 0.0);
  EXPECT_GT(bad.worst_increase, 0.0);
  const auto odd = check_radial_function([](double t) { return 1 - 0.5 * std::abs(t) + 0.1 * t; });
  EXPECT_GT(odd.worst_evenness, 0.1);
  EXPECT_FALSE(odd.ok());
}

TEST(PolygonCover, InflatedDiskSatisfiesIntervalHypothesis) {
  const auto p = sample_profile(Body2::disk(), 10);
  const Body2 h = Body2::disk().stretched(1.0 + p.delta, 1.0);
  const auto cert = verify_interval_body(h, p);
  EXPECT_TRUE(cert.hypothesis_ok);
  EXPECT_TRUE(cert.certified);
  EXPECT_FALSE(cert.failing_level.has_value());
  EXPECT_LE(cert.max_gauge, 1 + cert.omega);
  for (const auto& iv : cert.intervals) {
    EXPECT_GE(iv.crossing, p.r[iv.level] - 1e-15);
    EXPECT_LE(iv.crossing, (1 + p.delta) * p.r[iv.level] + 1e-15);
  }
}

TEST(PolygonCover, DoubledDiskFailsAtFirstLevel) {
  const auto p = sample_profile(Body2::disk(), 10);
  const Body2 h = Body2::disk().stretched(2.0, 2.0);
  const auto cert = verify_interval_body(h, p);
  EXPECT_FALSE(cert.hypothesis_ok);
  EXPECT_FALSE(cert.certified);
  ASSERT_TRUE(cert.failing_level.has_value());
  EXPECT_EQ(*cert.failing_level, 0u);
  EXPECT_FALSE(cert.intervals.front().ok);
}

TEST(PolygonCover, SectionCheck) {
  auto r = [](double t) { return std::sqrt(std::max(0.0, 1 - t * t)); };
  auto h = [&](double t) { return r(t) + 0.1 * r(t) * (1 - r(t)); };
  EXPECT_TRUE(section_check(r, h, 0.1).certified);
  auto wide = [&](double t) { return std::min(1.0, 1.5 * r(t)); };
  const auto bad = section_check(r, wide, 0.1);
  EXPECT_FALSE(bad.certified);
  EXPECT_TRUE(bad.interval.failing_level.has_value());
  EXPECT_THROW(section_check(r, h, 0.3), InvalidArgument);
}
