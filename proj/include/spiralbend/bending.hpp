#pragma once

#include "spiralbend/common.hpp"
#include "spiralbend/harness.hpp"
#include "spiralbend/norms2d.hpp"

#include <random>
#include <utility>
#include <vector>

namespace spiralbend {

// A radius carried both linearly and as a logarithm; the linear value is
// +inf once it overflows.
struct Radius {
  double value = 0.0;
  double log_value = -kInf;
  bool overflow() const { return std::isinf(value); }

  static Radius from_log(double lg) { return {std::exp(lg), lg}; }
  static Radius from_value(double v) { return {v, std::log(v)}; }
};

inline void check_curve_constant(double c) {
  if (!(c >= 2.0 / kPi - 1e-12 && c <= 4.0))
    throw InvalidArgument("curve constant must lie in [2/pi, 4]");
}

// R = r exp(pi c / (2 eps)).
inline Radius solve_outer_radius(double eps, double r, double c = 4.0) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
  if (!(r > 0.0 && std::isfinite(r))) throw InvalidArgument("inner radius must be positive");
  check_curve_constant(c);
  return Radius::from_log(std::log(r) + kPi * c / (2.0 * eps));
}

struct BendingParams {
  double eps = 0.0;
  Radius r;
  Radius R;
  double c = 4.0;
  UncondNorm2 z = UncondNorm2::l2();
  std::size_t dim = 0;

  static BendingParams make(double eps, double r, UncondNorm2 z, std::size_t dim, double c = 4.0) {
    require(dim >= 1, "bending needs dim >= 1");
    return BendingParams{eps, Radius::from_value(r), solve_outer_radius(eps, r, c), c, std::move(z),
                         dim};
  }

  // Radii fixed externally (a schedule); eps is the value satisfying
  // (eps/c) ln(R/r) = pi/2.
  static BendingParams from_radii(Radius r, Radius R, UncondNorm2 z, std::size_t dim,
                                  double c = 4.0) {
    require(dim >= 1, "bending needs dim >= 1");
    require(r.log_value < R.log_value, "bending needs r < R");
    check_curve_constant(c);
    const double eps = c * kHalfPi / (R.log_value - r.log_value);
    return BendingParams{eps, r, R, c, std::move(z), dim};
  }
};

namespace detail {

// t <= radius, comparing linearly while both are representable.
inline bool at_most(double t, double log_t, const Radius& rad) {
  if (!rad.overflow() && std::isfinite(t)) return t <= rad.value;
  return log_t <= rad.log_value;
}

}  // namespace detail

inline double tau(double t, const BendingParams& p) {
  require(t >= 0.0, "tau needs t >= 0");
  const double lt = std::log(t);
  if (detail::at_most(t, lt, p.r)) return 0.0;
  if (!detail::at_most(t, lt, p.R) || t == p.R.value) return kHalfPi;
  return kHalfPi * (lt - p.r.log_value) / (p.R.log_value - p.r.log_value);
}

// (c, s) = (1, 0) inside r, (0, 1) outside R, u(tau) between.
inline std::pair<double, double> coefficients_at(double t, const BendingParams& p) {
  const double lt = std::log(t);
  if (detail::at_most(t, lt, p.r)) return {1.0, 0.0};
  if (!detail::at_most(t, lt, p.R) || t == p.R.value) return {0.0, 1.0};
  const auto u = sphere_point(p.z, tau(t, p));
  return {u[0], u[1]};
}

inline std::pair<double, double> coefficients(const Vec& x, const BendingParams& p) {
  return coefficients_at(norm2(x), p);
}

class BendingMap {
 public:
  explicit BendingMap(BendingParams p) : p_(std::move(p)) {}

  const BendingParams& params() const { return p_; }

  std::pair<Vec, Vec> apply(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != p_.dim)
      throw InvalidArgument("bending: dimension mismatch");
    const auto [c, s] = coefficients(x, p_);
    if (s == 0.0) return {x, Vec::Zero(x.size())};
    if (c == 0.0) return {Vec::Zero(x.size()), x};
    return {c * x, s * x};
  }

  // Image as the concatenation [first; second].
  Vec apply_flat(const Vec& x) const {
    auto [u, v] = apply(x);
    Vec out(2 * x.size());
    out << u, v;
    return out;
  }

  // ||(u, v)||_X = Z(||u||_2, ||v||_2) on a concatenated image.
  double image_norm(const Vec& uv) const {
    const auto n = static_cast<Eigen::Index>(p_.dim);
    require(uv.size() == 2 * n, "image has wrong dimension");
    return p_.z(norm2(uv.head(n)), norm2(uv.tail(n)));
  }

  VecNorm image_norm_fn() const {
    return [m = *this](const Vec& uv) { return m.image_norm(uv); };
  }

 private:
  BendingParams p_;
};

inline std::pair<Vec, Vec> apply(const BendingMap& t, const Vec& x) { return t.apply(x); }

// Radial law of the sampled pairs: log-uniform radii on [lo, hi].
struct RadialLaw {
  double log_lo = kInf;  // inf: r/10
  double log_hi = kInf;  // inf: 10 R, capped at 1e300
};

struct BendingCheck {
  DistortionReport ratios;  // arg pairs hold the sample index twice
  double eps = 0.0;
  std::size_t violations = 0;
  std::size_t str_checked = 0;
  std::size_t str_violations = 0;
  double str_worst = 0.0;  // max of lhs / rhs over checked pairs
  double norm_defect = 0.0;  // max | ||Tx|| - ||x|| | / ||x||
  std::array<double, 2> worst_radii{0.0, 0.0};  // (||x||, ||y||) of the worst ratio
  bool passed() const { return violations == 0 && str_violations == 0; }
};

inline BendingCheck verify_distortion(const BendingMap& t, std::size_t pairs, std::uint64_t seed,
                                      RadialLaw law = {}, unsigned threads = 0,
                                      double tol = 1e-12) {
  require(pairs >= 1, "verify_distortion needs pairs >= 1");
  const auto& p = t.params();
  const double lo = std::isinf(law.log_lo) ? p.r.log_value - std::log(10.0) : law.log_lo;
  const double hi = std::isinf(law.log_hi) ? std::min(p.R.log_value + std::log(10.0), 690.0)
                                           : law.log_hi;
  require(lo < hi, "radial law range is empty");
  const auto n = static_cast<Eigen::Index>(p.dim);
  const unsigned nthreads = threads ? threads : thread_count();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  auto direction = [&] {
    Vec v(n);
    do {
      for (Eigen::Index k = 0; k < n; ++k) v[k] = gauss(rng);
    } while (v.norm() < 1e-8);
    return Vec(v / v.norm());
  };
  auto log_uniform = [&] { return std::exp(lo + (hi - lo) * unit(rng)); };
  // Radii of every sampled point stay inside [lo, hi].
  auto clamp_radius = [&](Vec v) {
    const double nv = norm2(v);
    const double lg = std::clamp(std::log(nv), lo, hi);
    if (lg != std::log(nv)) v *= std::exp(lg) / nv;
    return v;
  };
  auto shell = [&] {
    const Radius& b = unit(rng) < 0.5 ? p.r : p.R;
    const double lg = std::min(b.log_value, 690.0) + (unit(rng) - 0.5) * 2e-3;
    return std::exp(std::clamp(lg, lo, hi));
  };

  BendingCheck out;
  out.eps = p.eps;
  out.ratios.seed = seed;
  out.ratios.exhaustive = false;
  out.ratios.pair_count = pairs;
  detail::PairStat stat;
  const std::size_t batch = 65536;
  std::vector<Vec> xs, ys;
  std::vector<double> ratio, str_l, str_r, defect;
  for (std::size_t start = 0; start < pairs; start += batch) {
    const std::size_t m = std::min(batch, pairs - start);
    xs.assign(m, Vec());
    ys.assign(m, Vec());
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t kind = (start + k) % 4;
      Vec x, y;
      if (kind == 0) {
        x = log_uniform() * direction();
        y = log_uniform() * direction();
      } else if (kind == 1) {
        const double rx = log_uniform();
        x = rx * direction();
        y = rx * std::exp(0.01 * gauss(rng)) * direction();
      } else if (kind == 2) {
        const double rx = log_uniform();
        x = rx * direction();
        y = x + rx * std::pow(10.0, -1.0 - 5.0 * unit(rng)) * direction();
      } else {
        const double rx = shell();
        x = rx * direction();
        y = unit(rng) < 0.5 ? Vec(x + rx * std::pow(10.0, -1.0 - 5.0 * unit(rng)) * direction())
                            : Vec(shell() * direction());
      }
      y = clamp_radius(std::move(y));
      if ((x - y).norm() == 0.0) y = clamp_radius(x + 1e-3 * norm2(x) * direction());
      xs[k] = std::move(x);
      ys[k] = std::move(y);
    }
    ratio.assign(m, 0.0);
    str_l.assign(m, 0.0);
    str_r.assign(m, -1.0);
    defect.assign(m, 0.0);
    parallel_chunks(m, nthreads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t k = b; k < e; ++k) {
        const Vec tx = t.apply_flat(xs[k]), ty = t.apply_flat(ys[k]);
        ratio[k] = safe_ratio(t.image_norm(tx - ty), norm2(xs[k] - ys[k]));
        const double nx = norm2(xs[k]), ny = norm2(ys[k]);
        defect[k] = std::max(std::abs(t.image_norm(tx) - nx) / nx, std::abs(t.image_norm(ty) - ny) / ny);
        const double big = std::max(nx, ny), small = std::min(nx, ny);
        if (small > 0.0) {
          const auto ux = coefficients_at(nx, p), uy = coefficients_at(ny, p);
          str_l[k] = p.z(ux.first - uy.first, ux.second - uy.second);
          str_r[k] = p.eps * (big - small) / small;
        }
      }
    });
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t idx = start + k;
      if (ratio[k] < stat.lo) {
        stat.lo = ratio[k], stat.alo = {idx, idx};
      }
      if (ratio[k] > stat.hi) {
        stat.hi = ratio[k], stat.ahi = {idx, idx};
        out.worst_radii = {norm2(xs[k]), norm2(ys[k])};
      }
      if (ratio[k] < 1.0 - p.eps - tol || ratio[k] > 1.0 + p.eps + tol) ++out.violations;
      out.norm_defect = std::max(out.norm_defect, defect[k]);
      if (str_r[k] >= 0.0) {
        ++out.str_checked;
        if (str_l[k] > str_r[k] * (1.0 + 1e-9) + 1e-13) ++out.str_violations;
        if (str_r[k] > 0.0) out.str_worst = std::max(out.str_worst, str_l[k] / str_r[k]);
      }
    }
  }
  out.ratios.min_ratio = stat.lo;
  out.ratios.max_ratio = stat.hi;
  out.ratios.argmin = stat.alo;
  out.ratios.argmax = stat.ahi;
  out.ratios.non_embedding = !(stat.lo > 0.0);
  out.ratios.distortion = out.ratios.non_embedding ? kInf : stat.hi / stat.lo;
  return out;
}

}  // namespace spiralbend
