#pragma once

#include "spiralbend/common.hpp"
#include "spiralbend/model_space.hpp"

#include <array>
#include <numeric>
#include <random>
#include <vector>

namespace spiralbend {

struct DistortionReport {
  double min_ratio = kInf;
  double max_ratio = 0.0;
  double distortion = 1.0;
  std::array<std::size_t, 2> argmin{0, 0};
  std::array<std::size_t, 2> argmax{0, 0};
  std::size_t pair_count = 0;
  std::uint64_t seed = 0;
  bool exhaustive = true;
  bool non_embedding = false;  // some distinct sources collapse to one image
};

enum class PairMode { automatic, exhaustive, sampled };

struct PairOptions {
  PairMode mode = PairMode::automatic;
  std::size_t exhaustive_limit = 2000;
  std::size_t sample_pairs = 1000000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: thread_count()
};

// dst(a) / src(b) without overflow in the quotient.
inline double safe_ratio(double num, double den) {
  if (num > 1e300 || den > 1e300 || (num > 0 && num < 1e-300) || den < 1e-300)
    return num == 0.0 ? 0.0 : std::exp(std::log(num) - std::log(den));
  return num / den;
}

namespace detail {

inline void reject_duplicates(const std::vector<Vec>& pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const Vec& x = pts[a];
    const Vec& y = pts[b];
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (x[k] != y[k]) return x[k] < y[k];
    return false;
  };
  std::sort(idx.begin(), idx.end(), less);
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (!less(idx[k - 1], idx[k]))
      throw InvalidArgument("duplicate source points " + std::to_string(idx[k - 1]) + " and " +
                            std::to_string(idx[k]));
}

struct PairStat {
  double lo = kInf, hi = -kInf;
  std::array<std::size_t, 2> alo{0, 0}, ahi{0, 0};
};

}  // namespace detail

inline DistortionReport pairwise_distortion(const std::vector<Vec>& points,
                                            const std::vector<Vec>& images, const VecNorm& src,
                                            const VecNorm& dst, const PairOptions& opt = {}) {
  const std::size_t n = points.size();
  require(n == images.size(), "points and images differ in count");
  require(n >= 2, "pairwise distortion needs >= 2 points");
  for (std::size_t k = 1; k < n; ++k)
    require(points[k].size() == points[0].size() && images[k].size() == images[0].size(),
            "inconsistent dimensions in point list");
  detail::reject_duplicates(points);

  const unsigned threads = opt.threads ? opt.threads : thread_count();
  const bool exhaustive = opt.mode == PairMode::exhaustive ||
                          (opt.mode == PairMode::automatic && n <= opt.exhaustive_limit);
  auto ratio = [&](std::size_t i, std::size_t j) {
    return safe_ratio(dst(images[i] - images[j]), src(points[i] - points[j]));
  };
  auto absorb = [](detail::PairStat& s, double r, std::size_t i, std::size_t j) {
    if (r < s.lo) s.lo = r, s.alo = {i, j};
    if (r > s.hi) s.hi = r, s.ahi = {i, j};
  };

  DistortionReport rep;
  rep.seed = opt.seed;
  rep.exhaustive = exhaustive;
  detail::PairStat total;
  if (exhaustive) {
    // One stat per row; rows are merged in order so the result is independent
    // of the thread count.
    std::vector<detail::PairStat> rows(n);
    parallel_chunks(n, threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i)
        for (std::size_t j = i + 1; j < n; ++j) absorb(rows[i], ratio(i, j), i, j);
    });
    for (const auto& r : rows) {
      if (r.lo < total.lo) total.lo = r.lo, total.alo = r.alo;
      if (r.hi > total.hi) total.hi = r.hi, total.ahi = r.ahi;
    }
    rep.pair_count = n * (n - 1) / 2;
  } else {
    std::mt19937_64 rng(opt.seed);
    std::vector<std::array<std::size_t, 2>> pairs(opt.sample_pairs);
    for (auto& p : pairs) {
      std::uniform_int_distribution<std::size_t> a(0, n - 1), b(0, n - 2);
      std::size_t i = a(rng), j = b(rng);
      if (j >= i) ++j;
      p = {std::min(i, j), std::max(i, j)};
    }
    std::vector<double> r(pairs.size());
    parallel_chunks(pairs.size(), threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t k = b; k < e; ++k) r[k] = ratio(pairs[k][0], pairs[k][1]);
    });
    for (std::size_t k = 0; k < pairs.size(); ++k) absorb(total, r[k], pairs[k][0], pairs[k][1]);
    rep.pair_count = pairs.size();
  }
  rep.min_ratio = total.lo;
  rep.max_ratio = total.hi;
  rep.argmin = total.alo;
  rep.argmax = total.ahi;
  rep.non_embedding = !(total.lo > 0.0);
  rep.distortion = rep.non_embedding ? kInf : total.hi / total.lo;
  return rep;
}

// max |ratio - 1| over pairs.
inline double isometry_defect(const std::vector<Vec>& points, const std::vector<Vec>& images,
                              const VecNorm& src, const VecNorm& dst, const PairOptions& opt = {}) {
  const auto rep = pairwise_distortion(points, images, src, dst, opt);
  return std::max(rep.max_ratio - 1.0, 1.0 - rep.min_ratio);
}

}  // namespace spiralbend
