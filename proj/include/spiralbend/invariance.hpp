#pragma once

#include "spiralbend/common.hpp"
#include "spiralbend/model_space.hpp"
#include "spiralbend/norms2d.hpp"

#include <random>
#include <string>
#include <vector>

namespace spiralbend {

// R^{n1} (+) R^{n2} with a joint norm whose restriction to each summand is
// meant to be Euclidean.
struct PairedSpace {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  VecNorm norm;

  double operator()(const Vec& y1, const Vec& y2) const {
    require(static_cast<std::size_t>(y1.size()) == n1 && static_cast<std::size_t>(y2.size()) == n2,
            "paired space: dimension mismatch");
    Vec x(n1 + n2);
    x << y1, y2;
    return norm(x);
  }

  static PairedSpace from_direct_sum(const DirectSum& d) {
    return PairedSpace{d.left_dim, d.right_dim, [d](const Vec& x) { return d.joint(x); }};
  }
};

// An orthogonal matrix as a product of Givens rotations over all coordinate
// pairs, optionally followed by the reflection of the first coordinate.
struct OrthoParams {
  std::vector<double> angles;
  bool reflect = false;

  Eigen::MatrixXd matrix(std::size_t n) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    std::size_t a = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q, ++a) {
        const double c = std::cos(angles[a]), s = std::sin(angles[a]);
        for (std::size_t r = 0; r < n; ++r) {
          const double mp = m(r, p), mq = m(r, q);
          m(r, p) = c * mp - s * mq;
          m(r, q) = s * mp + c * mq;
        }
      }
    if (reflect) m.col(0) = -m.col(0);
    return m;
  }

  static OrthoParams random(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    OrthoParams o;
    o.angles.resize(n * (n - 1) / 2);
    for (auto& a : o.angles) a = u(rng);
    o.reflect = u(rng) < kPi;
    return o;
  }
};

struct InvarianceDefect {
  double eps = 0.0;
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  std::size_t samples = 0;
  std::size_t refinement_evals = 0;
  std::uint64_t seed = 0;
  OrthoParams worst_o1, worst_o2;
  Vec worst_y1, worst_y2;
};

namespace detail {

struct OrbitSample {
  Vec y1, y2;
  OrthoParams o1, o2;
};

inline double orbit_ratio(const PairedSpace& s, const OrbitSample& x) {
  const double base = s(x.y1, x.y2);
  if (base == 0.0) return 1.0;
  return s(x.o1.matrix(s.n1) * x.y1, x.o2.matrix(s.n2) * x.y2) / base;
}

inline OrbitSample random_orbit_sample(const PairedSpace& s, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  OrbitSample x{Vec(s.n1), Vec(s.n2), {}, {}};
  for (auto& v : x.y1) v = g(rng);
  for (auto& v : x.y2) v = g(rng);
  x.y2 *= std::exp(u(rng));
  x.o1 = OrthoParams::random(s.n1, rng);
  x.o2 = OrthoParams::random(s.n2, rng);
  return x;
}

// Coordinate search over rotation angles and the coordinates of y1, y2;
// maximizes sign * f. Returns the evaluation count.
template <class F>
std::size_t coordinate_search(OrbitSample& x, F f, double sign, bool move_points) {
  std::vector<double*> coords;
  for (auto& a : x.o1.angles) coords.push_back(&a);
  for (auto& a : x.o2.angles) coords.push_back(&a);
  if (move_points) {
    for (Eigen::Index k = 0; k < x.y1.size(); ++k) coords.push_back(&x.y1[k]);
    for (Eigen::Index k = 0; k < x.y2.size(); ++k) coords.push_back(&x.y2[k]);
  }
  std::size_t evals = 0;
  double best = sign * f(x);
  const double scale = std::max(x.y1.norm(), x.y2.norm());
  for (double step = 0.25; step > 1e-9; step *= 0.5) {
    bool improved = true;
    for (int pass = 0; improved && pass < 50; ++pass) {
      improved = false;
      for (std::size_t c = 0; c < coords.size(); ++c) {
        const bool is_point = c >= x.o1.angles.size() + x.o2.angles.size();
        const double h = is_point ? step * scale : step;
        for (double dir : {1.0, -1.0}) {
          const double keep = *coords[c];
          *coords[c] = keep + dir * h;
          const double v = sign * f(x);
          ++evals;
          if (v > best) {
            best = v;
            improved = true;
            break;
          }
          *coords[c] = keep;
        }
      }
    }
  }
  return evals;
}

}  // namespace detail

// Least eps with (1-eps)|y1+y2| <= |O1 y1 + O2 y2| <= (1+eps)|y1+y2| over
// sampled points and orthogonal pairs, with local refinement of the two
// extreme samples.
inline InvarianceDefect invariance_defect(const PairedSpace& s, std::size_t samples,
                                          std::uint64_t seed, bool refine = true,
                                          unsigned threads = 0) {
  require(s.n1 >= 1 && s.n2 >= 1 && s.n1 <= 6 && s.n2 <= 6,
          "invariance_defect supports summand dimensions 1..6");
  require(samples >= 1, "invariance_defect needs samples >= 1");
  std::mt19937_64 rng(seed);
  std::vector<detail::OrbitSample> xs(samples);
  for (auto& x : xs) x = detail::random_orbit_sample(s, rng);
  std::vector<double> r(samples);
  parallel_chunks(samples, threads ? threads : thread_count(),
                  [&](std::size_t b, std::size_t e, std::size_t) {
                    for (std::size_t k = b; k < e; ++k) r[k] = detail::orbit_ratio(s, xs[k]);
                  });
  std::size_t ihi = 0, ilo = 0;
  for (std::size_t k = 1; k < samples; ++k) {
    if (r[k] > r[ihi]) ihi = k;
    if (r[k] < r[ilo]) ilo = k;
  }
  InvarianceDefect out;
  out.samples = samples;
  out.seed = seed;
  detail::OrbitSample hi = xs[ihi], lo = xs[ilo];
  out.max_ratio = r[ihi];
  out.min_ratio = r[ilo];
  if (refine) {
    auto f = [&](const detail::OrbitSample& x) { return detail::orbit_ratio(s, x); };
    out.refinement_evals += detail::coordinate_search(hi, f, 1.0, true);
    out.refinement_evals += detail::coordinate_search(lo, f, -1.0, true);
    out.max_ratio = std::max(out.max_ratio, f(hi));
    out.min_ratio = std::min(out.min_ratio, f(lo));
  }
  out.eps = std::max({0.0, out.max_ratio - 1.0, 1.0 - out.min_ratio});
  const bool upper = out.max_ratio - 1.0 >= 1.0 - out.min_ratio;
  const auto& w = upper ? hi : lo;
  out.worst_o1 = w.o1;
  out.worst_o2 = w.o2;
  out.worst_y1 = w.y1;
  out.worst_y2 = w.y2;
  return out;
}

// sup over orthogonal pairs of |O1 y1 + O2 y2|: identity, seeded samples,
// and a local refinement of the best sample in every full block of 64. A
// larger sample count only appends samples, so the estimate never decreases.
inline double symmetrize_norm(const PairedSpace& s, const Vec& y1, const Vec& y2,
                              std::size_t samples = 1024, std::uint64_t seed = 0) {
  require(static_cast<std::size_t>(y1.size()) == s.n1 && static_cast<std::size_t>(y2.size()) == s.n2,
          "symmetrize_norm: dimension mismatch");
  double best = s(y1, y2);
  std::mt19937_64 rng(seed);
  auto value = [&](const detail::OrbitSample& x) {
    return s(x.o1.matrix(s.n1) * x.y1, x.o2.matrix(s.n2) * x.y2);
  };
  detail::OrbitSample block_best;
  double block_val = -kInf;
  for (std::size_t k = 0; k < samples; ++k) {
    detail::OrbitSample x{y1, y2, OrthoParams::random(s.n1, rng), OrthoParams::random(s.n2, rng)};
    const double v = value(x);
    if (v > block_val) block_val = v, block_best = x;
    if ((k + 1) % 64 == 0) {
      detail::coordinate_search(block_best, value, 1.0, false);
      best = std::max({best, block_val, value(block_best)});
      block_val = -kInf;
    }
  }
  return std::max(best, block_val);
}

class ExtractionRefused : public InvalidParameter {
 public:
  explicit ExtractionRefused(double defect)
      : InvalidParameter("input is not invariant enough for extraction, measured defect " +
                         std::to_string(defect)),
        defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

struct ExtractOptions {
  std::size_t nodes = 131073;
  double tolerance = 1e-6;
  std::size_t certify_samples = 2000;
  std::uint64_t seed = 0;
  Vec u1;  // empty: first basis vector of each summand
  Vec u2;
};

// Z(a1, a2) = |a1 u1 + a2 u2| for fixed unit vectors, tabulated in angle.
inline UncondNorm2 extract_z(const PairedSpace& s, const ExtractOptions& opt = {}) {
  const auto defect = invariance_defect(s, opt.certify_samples, opt.seed);
  if (defect.eps > opt.tolerance) throw ExtractionRefused(defect.eps);
  Vec u1 = opt.u1.size() ? opt.u1 : Vec(Vec::Unit(s.n1, 0));
  Vec u2 = opt.u2.size() ? opt.u2 : Vec(Vec::Unit(s.n2, 0));
  require(static_cast<std::size_t>(u1.size()) == s.n1 && static_cast<std::size_t>(u2.size()) == s.n2,
          "extract_z: unit vector dimension mismatch");
  u1 /= u1.norm();
  u2 /= u2.norm();
  require(opt.nodes >= 2, "extract_z needs >= 2 nodes");
  std::vector<double> ang(opt.nodes), rad(opt.nodes);
  for (std::size_t j = 0; j < opt.nodes; ++j) {
    const bool last = j + 1 == opt.nodes;
    const double t = last ? kHalfPi : kHalfPi * static_cast<double>(j) / static_cast<double>(opt.nodes - 1);
    ang[j] = t;
    rad[j] = 1.0 / s((last ? 0.0 : std::cos(t)) * u1, (last ? 1.0 : std::sin(t)) * u2);
  }
  if (std::abs(rad.front() - 1.0) > 1e-9 || std::abs(rad.back() - 1.0) > 1e-9)
    throw InvalidParameter("summand restriction is not Euclidean");
  return UncondNorm2::tabulated(std::move(ang), std::move(rad));
}

struct NetBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// ((1 - a(1 + (2-a)A))^2, (1 + a(1 + (2+a)A))^2).
inline NetBounds net_to_every_bounds(double alpha, double a) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
  if (!(a >= 1.0)) throw InvalidParameter("projection constant A must be >= 1");
  const double lo = 1.0 - alpha * (1.0 + (2.0 - alpha) * a);
  if (!(lo > 0.0)) throw InvalidParameter("1 - alpha(1 + (2-alpha)A) must be positive");
  const double hi = 1.0 + alpha * (1.0 + (2.0 + alpha) * a);
  return {lo * lo, hi * hi};
}

struct GordonResult {
  std::vector<long long> values;  // value after each iteration
  std::size_t first_below_one = 0;  // 1-based iteration, 0 if never
  long long final_value() const { return values.empty() ? 0 : values.back(); }
};

// s-fold iteration of g(N) = floor(delta^2 ln(sigma N) / beta), starting from
// ln N so that astronomically large N stay representable. Planning estimate:
// sigma and beta are unspecified universal constants.
inline GordonResult gordon_dimension_log(double log_n, double delta, double sigma, double beta,
                                         std::size_t iterations) {
  if (!(log_n >= 0.0)) throw InvalidArgument("N must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  if (!(sigma > 0.0 && beta > 0.0)) throw InvalidArgument("sigma and beta must be positive");
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  GordonResult out;
  double ln = log_n;
  for (std::size_t k = 1; k <= iterations; ++k) {
    const double g = delta * delta * (std::log(sigma) + ln) / beta;
    const long long v = g <= 0.0 ? 0 : static_cast<long long>(std::floor(g + 1e-12));
    out.values.push_back(v);
    if (v < 1) {
      out.first_below_one = k;
      break;
    }
    ln = std::log(static_cast<double>(v));
  }
  return out;
}

inline GordonResult gordon_dimension(double n, double delta, double sigma, double beta,
                                     std::size_t iterations) {
  if (!(n >= 1.0)) throw InvalidArgument("N must be >= 1");
  return gordon_dimension_log(std::log(n), delta, sigma, beta, iterations);
}

}  // namespace spiralbend
