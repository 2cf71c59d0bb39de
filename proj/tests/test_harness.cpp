#include <gtest/gtest.h>

#include "spiralbend/bending.hpp"
#include "spiralbend/harness.hpp"

#include <random>

using namespace spiralbend;

namespace {

std::vector<Vec> cloud(std::size_t n, int dim, std::uint64_t seed, double spread = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec> pts(n, Vec(dim));
  for (auto& p : pts)
    for (int k = 0; k < dim; ++k) p[k] = spread * g(rng);
  return pts;
}

}  // namespace

TEST(PairwiseDistortion, IdentityAndScaling) {
  auto pts = cloud(50, 3, 1);
  auto rep = pairwise_distortion(pts, pts, euclidean(), euclidean());
  EXPECT_EQ(rep.distortion, 1.0);
  EXPECT_TRUE(rep.exhaustive);
  EXPECT_EQ(rep.pair_count, 50u * 49u / 2u);
  std::vector<Vec> twice;
  for (auto& p : pts) twice.push_back(2.0 * p);
  auto rep2 = pairwise_distortion(pts, twice, euclidean(), euclidean());
  EXPECT_NEAR(rep2.distortion, 1.0, 1e-15);
  EXPECT_NEAR(rep2.min_ratio, 2.0, 1e-15);
  EXPECT_EQ(isometry_defect(pts, pts, euclidean(), euclidean()), 0.0);
}

TEST(PairwiseDistortion, DuplicatesAndCollapse) {
  auto pts = cloud(10, 2, 2);
  auto dup = pts;
  dup[7] = dup[3];
  EXPECT_THROW(pairwise_distortion(dup, dup, euclidean(), euclidean()), InvalidArgument);
  auto img = pts;
  img[5] = img[1];
  auto rep = pairwise_distortion(pts, img, euclidean(), euclidean());
  EXPECT_TRUE(rep.non_embedding);
  EXPECT_TRUE(std::isinf(rep.distortion));
  EXPECT_THROW(pairwise_distortion({pts[0]}, {pts[0]}, euclidean(), euclidean()), InvalidArgument);
}

TEST(PairwiseDistortion, BendingImagesWithinEpsBracket) {
  BendingMap t(BendingParams::make(0.1, 1.0, UncondNorm2::l2(), 3));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, std::log(10.0) + t.params().R.log_value);
  std::normal_distribution<double> g;
  std::vector<Vec> pts, img;
  for (int k = 0; k < 400; ++k) {
    Vec x(3);
    for (int j = 0; j < 3; ++j) x[j] = g(rng);
    x *= std::exp(u(rng)) / x.norm();
    pts.push_back(x);
    img.push_back(t.apply_flat(x));
  }
  auto rep = pairwise_distortion(pts, img, euclidean(), t.image_norm_fn());
  EXPECT_LE(rep.distortion, 1.1 / 0.9);
  EXPECT_GE(rep.distortion, 1.0);
}

TEST(PairwiseDistortion, InnerRegimeIsIsometric) {
  BendingMap t(BendingParams::make(0.2, 5.0, UncondNorm2::linf(), 2));
  auto pts = cloud(100, 2, 3, 1.0);
  std::vector<Vec> in, img;
  for (auto& p : pts)
    if (p.norm() <= 5.0) in.push_back(p), img.push_back(t.apply_flat(p));
  EXPECT_EQ(isometry_defect(in, img, euclidean(), t.image_norm_fn()), 0.0);
}

TEST(PairwiseDistortion, PermutationInvariant) {
  auto pts = cloud(120, 3, 4);
  std::vector<Vec> img;
  for (auto& p : pts) img.push_back((Vec(3) << p[0], 2 * p[1], p[2] + 0.1 * p[0]).finished());
  auto a = pairwise_distortion(pts, img, euclidean(), euclidean());
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(9));
  std::vector<Vec> p2, i2;
  for (auto k : perm) p2.push_back(pts[k]), i2.push_back(img[k]);
  auto b = pairwise_distortion(p2, i2, euclidean(), euclidean());
  EXPECT_EQ(a.min_ratio, b.min_ratio);
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_EQ(a.distortion, b.distortion);
}

TEST(PairwiseDistortion, SampledNeverExceedsExhaustive) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    auto pts = cloud(300 + 50 * s, 3, 10 + s);
    std::vector<Vec> img;
    for (auto& p : pts) img.push_back(p * (1.0 + 0.1 * std::sin(p.norm())));
    PairOptions o;
    o.mode = PairMode::sampled;
    o.sample_pairs = 20000;
    o.seed = s;
    auto sam = pairwise_distortion(pts, img, euclidean(), euclidean(), o);
    auto exh = pairwise_distortion(pts, img, euclidean(), euclidean());
    EXPECT_FALSE(sam.exhaustive);
    EXPECT_LE(sam.distortion, exh.distortion);
    EXPECT_GE(sam.min_ratio, exh.min_ratio);
    EXPECT_LE(sam.max_ratio, exh.max_ratio);
  }
}

TEST(PairwiseDistortion, ThreadCountDoesNotChangeResult) {
  auto pts = cloud(500, 3, 21);
  std::vector<Vec> img;
  for (auto& p : pts) img.push_back(p * (1.0 + 0.2 * std::cos(p[0])));
  PairOptions a, b;
  a.threads = 1;
  b.threads = 4;
  auto ra = pairwise_distortion(pts, img, euclidean(), euclidean(), a);
  auto rb = pairwise_distortion(pts, img, euclidean(), euclidean(), b);
  EXPECT_EQ(ra.min_ratio, rb.min_ratio);
  EXPECT_EQ(ra.max_ratio, rb.max_ratio);
  EXPECT_EQ(ra.argmin, rb.argmin);
  EXPECT_EQ(ra.argmax, rb.argmax);
}

TEST(PairwiseDistortion, HugeMagnitudes) {
  std::vector<Vec> pts{(Vec(2) << 0, 0).finished(), (Vec(2) << 1e305, 0).finished(),
                       (Vec(2) << 0, 1e306).finished()};
  auto rep = pairwise_distortion(pts, pts, euclidean(), euclidean());
  EXPECT_NEAR(rep.distortion, 1.0, 1e-12);
}
