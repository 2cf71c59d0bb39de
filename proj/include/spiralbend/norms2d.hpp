#pragma once

#include "spiralbend/common.hpp"

#include <array>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spiralbend {

enum class NormFamily { lp, weighted_lp, max_functionals, tabulated_radial, custom };

inline const char* family_name(NormFamily f) {
  switch (f) {
    case NormFamily::lp: return "lp";
    case NormFamily::weighted_lp: return "weighted-lp";
    case NormFamily::max_functionals: return "max-of-functionals";
    case NormFamily::tabulated_radial: return "tabulated-radial";
    case NormFamily::custom: return "custom";
  }
  return "unknown";
}

namespace detail {

inline double lp_value(double p, double a, double b) {
  if (p == 1.0) return a + b;
  if (p == 2.0) return std::hypot(a, b);
  if (std::isinf(p)) return std::max(a, b);
  const double m = std::max(a, b);
  if (m == 0.0) return 0.0;
  const double x = a / m, y = b / m;
  return m * std::pow(std::pow(x, p) + std::pow(y, p), 1.0 / p);
}

struct Lp {
  double p;
};

struct WeightedLp {
  std::vector<std::pair<double, double>> terms;  // (weight, p)
};

// max(|a|, |b|, alpha_j |a| + beta_j |b|)
struct MaxFunctionals {
  std::vector<std::array<double, 2>> coeffs;
};

struct Tabulated {
  std::vector<double> angles;
  std::vector<double> radii;
  double tolerance = 0.0;
};

struct Custom {
  std::function<double(double, double)> fn;
};

}  // namespace detail

// A norm on R^2 that is symmetric in the signs of both coordinates and
// takes the value 1 on both basis vectors. Immutable.
class UncondNorm2 {
 public:
  static UncondNorm2 lp(double p) {
    require(p >= 1.0, "lp norm needs p >= 1");
    return UncondNorm2(NormFamily::lp, lp_name(p), detail::Lp{p});
  }
  static UncondNorm2 l1() { return lp(1.0); }
  static UncondNorm2 l2() { return lp(2.0); }
  static UncondNorm2 linf() { return lp(kInf); }

  // Convex combination of lp norms; weights must sum to 1.
  static UncondNorm2 weighted_lp(std::vector<std::pair<double, double>> terms) {
    require(!terms.empty(), "weighted-lp needs at least one term");
    double total = 0.0;
    for (auto [w, p] : terms) {
      require(w > 0.0 && std::isfinite(w), "weighted-lp weights must be positive");
      require(p >= 1.0, "weighted-lp exponents must be >= 1");
      total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, "weighted-lp weights must sum to 1");
    return UncondNorm2(NormFamily::weighted_lp, "weighted-lp",
                       detail::WeightedLp{std::move(terms)});
  }

  // max(|a|, |b|, alpha|a| + beta|b|) with 0 <= alpha, beta <= 1.
  static UncondNorm2 max_functionals(std::vector<std::array<double, 2>> coeffs) {
    for (auto c : coeffs)
      require(c[0] >= 0.0 && c[0] <= 1.0 && c[1] >= 0.0 && c[1] <= 1.0,
              "functional coefficients must lie in [0,1]");
    return UncondNorm2(NormFamily::max_functionals, "max-of-functionals",
                       detail::MaxFunctionals{std::move(coeffs)});
  }

  // Radial function rho(theta) on [0, pi/2], interpolated linearly in angle;
  // Z(a,b) = |(a,b)|_2 / rho(angle).
  static UncondNorm2 tabulated(std::vector<double> angles, std::vector<double> radii) {
    require(angles.size() == radii.size() && angles.size() >= 2,
            "tabulated norm needs >= 2 (angle, radius) pairs");
    require(std::abs(angles.front()) <= 1e-12 && std::abs(angles.back() - kHalfPi) <= 1e-12,
            "tabulated angles must span [0, pi/2]");
    angles.front() = 0.0;
    angles.back() = kHalfPi;
    for (std::size_t i = 1; i < angles.size(); ++i)
      require(angles[i] > angles[i - 1], "tabulated angles must be strictly increasing");
    for (double r : radii) require(r > 0.0 && std::isfinite(r), "radii must be positive");
    require(std::abs(radii.front() - 1.0) <= 1e-9 && std::abs(radii.back() - 1.0) <= 1e-9,
            "tabulated norm must be normalized on the basis vectors");
    radii.front() = 1.0;
    radii.back() = 1.0;
    detail::Tabulated t{std::move(angles), std::move(radii), 0.0};
    // Linear interpolation error estimate from second differences.
    for (std::size_t i = 1; i + 1 < t.radii.size(); ++i) {
      const double h0 = t.angles[i] - t.angles[i - 1], h1 = t.angles[i + 1] - t.angles[i];
      const double s0 = (t.radii[i] - t.radii[i - 1]) / h0;
      const double s1 = (t.radii[i + 1] - t.radii[i]) / h1;
      const double curv = std::abs(s1 - s0) / (0.5 * (h0 + h1));
      const double h = std::max(h0, h1);
      t.tolerance = std::max(t.tolerance, curv * h * h / 8.0 / t.radii[i]);
    }
    return UncondNorm2(NormFamily::tabulated_radial, "tabulated-radial", std::move(t));
  }

  // Unchecked evaluator receiving signed arguments; used to validate
  // candidate norms that may fail the axioms.
  static UncondNorm2 custom(std::string name, std::function<double(double, double)> fn) {
    return UncondNorm2(NormFamily::custom, std::move(name), detail::Custom{std::move(fn)});
  }

  // Parses "l1", "l2", "linf", "l1.5", "lp:3".
  static UncondNorm2 parse(const std::string& s) {
    std::string body = s;
    if (body.rfind("lp:", 0) == 0) body = body.substr(3);
    else if (!body.empty() && body[0] == 'l') body = body.substr(1);
    else throw InvalidArgument("unknown norm family '" + s + "'");
    if (body == "inf") return linf();
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(body, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("unknown norm family '" + s + "'");
    }
    if (used != body.size() || !(p >= 1.0)) throw InvalidArgument("unknown norm family '" + s + "'");
    return lp(p);
  }

  double operator()(double a, double b) const {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("norm argument not finite");
    if (auto* c = std::get_if<detail::Custom>(impl_.get())) return c->fn(a, b);
    return eval_abs(std::abs(a), std::abs(b));
  }

  NormFamily family() const { return family_; }
  const std::string& name() const { return name_; }

  // Relative error bound of the interpolation; zero for analytic families.
  double interpolation_tolerance() const {
    if (auto* t = std::get_if<detail::Tabulated>(impl_.get())) return t->tolerance;
    return 0.0;
  }

  // Exponent for the lp family, nullopt-like NaN otherwise.
  double lp_exponent() const {
    if (auto* l = std::get_if<detail::Lp>(impl_.get())) return l->p;
    return std::numeric_limits<double>::quiet_NaN();
  }

  const detail::Tabulated* table() const { return std::get_if<detail::Tabulated>(impl_.get()); }

 private:
  using Impl = std::variant<detail::Lp, detail::WeightedLp, detail::MaxFunctionals,
                            detail::Tabulated, detail::Custom>;

  UncondNorm2(NormFamily f, std::string name, Impl impl)
      : family_(f), name_(std::move(name)), impl_(std::make_shared<const Impl>(std::move(impl))) {}

  static std::string lp_name(double p) {
    if (std::isinf(p)) return "linf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "l%g", p);
    return buf;
  }

  double eval_abs(double a, double b) const {
    return std::visit(
        [&](const auto& n) -> double {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, detail::Lp>) {
            return detail::lp_value(n.p, a, b);
          } else if constexpr (std::is_same_v<T, detail::WeightedLp>) {
            double s = 0.0;
            for (auto [w, p] : n.terms) s += w * detail::lp_value(p, a, b);
            return s;
          } else if constexpr (std::is_same_v<T, detail::MaxFunctionals>) {
            double m = std::max(a, b);
            for (auto c : n.coeffs) m = std::max(m, c[0] * a + c[1] * b);
            return m;
          } else if constexpr (std::is_same_v<T, detail::Tabulated>) {
            const double r = std::hypot(a, b);
            if (r == 0.0) return 0.0;
            const double th = std::atan2(b, a);
            auto it = std::upper_bound(n.angles.begin(), n.angles.end(), th);
            std::size_t j = static_cast<std::size_t>(it - n.angles.begin());
            if (j == 0) j = 1;
            if (j >= n.angles.size()) j = n.angles.size() - 1;
            const double t0 = n.angles[j - 1], t1 = n.angles[j];
            const double w = std::clamp((th - t0) / (t1 - t0), 0.0, 1.0);
            const double rho = (1.0 - w) * n.radii[j - 1] + w * n.radii[j];
            return r / rho;
          } else {
            return n.fn(a, b);
          }
        },
        *impl_);
  }

  NormFamily family_;
  std::string name_;
  std::shared_ptr<const Impl> impl_;
};

inline double eval_norm(const UncondNorm2& z, double a, double b) { return z(a, b); }

// u(tau) = (cos tau, sin tau) / Z(cos tau, sin tau); the Z unit circle in the
// first quadrant parametrized by Euclidean angle.
inline std::array<double, 2> sphere_point(const UncondNorm2& z, double tau) {
  if (!(tau >= 0.0 && tau <= kHalfPi)) throw InvalidArgument("tau must lie in [0, pi/2]");
  const double c = std::cos(tau), s = (tau == kHalfPi) ? 1.0 : std::sin(tau);
  const double cc = (tau == kHalfPi) ? 0.0 : c;
  const double n = z(cc, s);
  return {cc / n, s / n};
}

struct NormConstants {
  double m_z = 0.0;
  double M_z = 0.0;
  double c_z = std::numeric_limits<double>::quiet_NaN();
  std::size_t grid = 0;
  double tolerance = 0.0;  // propagated interpolation tolerance
};

namespace detail {

template <class F>
double trisect(F f, double lo, double hi, bool maximize, double tol) {
  while (hi - lo > tol) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    const double f1 = f(m1), f2 = f(m2);
    if (maximize ? (f1 < f2) : (f1 > f2)) lo = m1;
    else hi = m2;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Min and max of tau -> Z(cos tau, sin tau) on [0, pi/2].
inline NormConstants extremal_constants(const UncondNorm2& z, std::size_t grid_size = 4096,
                                        double tol = 1e-10) {
  require(grid_size >= 64, "extremal_constants needs grid_size >= 64");
  auto f = [&](double t) { return z(std::cos(t), std::sin(t)); };
  const double h = kHalfPi / static_cast<double>(grid_size);
  std::size_t imin = 0, imax = 0;
  double vmin = kInf, vmax = -kInf;
  for (std::size_t j = 0; j <= grid_size; ++j) {
    const double t = j == grid_size ? kHalfPi : h * static_cast<double>(j);
    const double v = j == grid_size ? z(0.0, 1.0) : f(t);
    if (v < vmin) vmin = v, imin = j;
    if (v > vmax) vmax = v, imax = j;
  }
  auto refine = [&](std::size_t j, bool maximize, double best) {
    const double lo = j == 0 ? 0.0 : h * static_cast<double>(j - 1);
    const double hi = std::min(kHalfPi, h * static_cast<double>(j + 1));
    const double t = detail::trisect(f, lo, hi, maximize, tol);
    const double v = f(t);
    return maximize ? std::max(best, v) : std::min(best, v);
  };
  NormConstants out;
  out.m_z = refine(imin, false, vmin);
  out.M_z = refine(imax, true, vmax);
  out.grid = grid_size;
  out.tolerance = z.interpolation_tolerance();
  return out;
}

// Lipschitz constant of u on [0, pi/2] measured in Z. The sup over all grid
// pairs equals the max over adjacent pairs (triangle inequality), so only
// adjacent chords are scanned; the diagonal limit is taken from central and
// one-sided finite-difference speeds at every node (one-sided ones catch
// corners of the unit circle).
inline double curve_lipschitz(const UncondNorm2& z, std::size_t grid_size = 4096,
                              double fd_step = 1e-4) {
  require(grid_size >= 256, "curve_lipschitz needs grid_size >= 256");
  const double h = kHalfPi / static_cast<double>(grid_size);
  auto node = [&](std::size_t j) {
    return j == grid_size ? kHalfPi : h * static_cast<double>(j);
  };
  auto dist = [&](const std::array<double, 2>& p, const std::array<double, 2>& q) {
    return z(p[0] - q[0], p[1] - q[1]);
  };
  double best = 0.0;
  std::array<double, 2> prev = sphere_point(z, 0.0);
  for (std::size_t j = 0; j <= grid_size; ++j) {
    const double t = node(j);
    const auto cur = sphere_point(z, t);
    if (j > 0) best = std::max(best, dist(cur, prev) / (t - node(j - 1)));
    const double lo = std::max(0.0, t - fd_step), hi = std::min(kHalfPi, t + fd_step);
    const auto ulo = sphere_point(z, lo), uhi = sphere_point(z, hi);
    best = std::max(best, dist(uhi, ulo) / (hi - lo));
    if (lo < t) best = std::max(best, dist(cur, ulo) / (t - lo));
    if (hi > t) best = std::max(best, dist(uhi, cur) / (hi - t));
    prev = cur;
  }
  return best;
}

struct ValidationReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double normalization = 0.0;
  double sign_symmetry = 0.0;
  double homogeneity = 0.0;
  double triangle = 0.0;
  double sandwich = 0.0;  // Z between max(|a|,|b|) and |a|+|b|
  double worst = 0.0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Seeded check of every norm invariant; violations are relative magnitudes.
inline ValidationReport validate_unconditional(const UncondNorm2& z, std::size_t samples,
                                               std::uint64_t seed, double tolerance = -1.0) {
  require(samples >= 1, "validate_unconditional needs samples >= 1");
  ValidationReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.tolerance = tolerance >= 0.0 ? tolerance : std::max(1e-12, 4.0 * z.interpolation_tolerance());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto eval = [&](double a, double b) {
    try {
      const double v = z(a, b);
      return std::isfinite(v) ? v : kInf;
    } catch (const std::exception&) {
      return kInf;
    }
  };
  rep.normalization = std::max({std::abs(eval(1, 0) - 1), std::abs(eval(0, 1) - 1),
                                std::abs(eval(-1, 0) - 1), std::abs(eval(0, -1) - 1)});
  for (std::size_t k = 0; k < samples; ++k) {
    const double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
    const double t = std::exp(u(rng)) * (g(rng) < 0 ? -1.0 : 1.0);
    const double n = eval(a, b);
    const double scale = std::max(n, 1e-300);
    for (auto [sa, sb] : {std::pair{-1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}})
      rep.sign_symmetry = std::max(rep.sign_symmetry, std::abs(eval(sa * a, sb * b) - n) / scale);
    rep.homogeneity =
        std::max(rep.homogeneity, std::abs(eval(t * a, t * b) - std::abs(t) * n) / (std::abs(t) * scale));
    const double m = eval(c, d);
    rep.triangle = std::max(rep.triangle, (eval(a + c, b + d) - n - m) / std::max(n + m, 1e-300));
    const double lo = std::max(std::abs(a), std::abs(b)), hi = std::abs(a) + std::abs(b);
    rep.sandwich = std::max({rep.sandwich, (lo - n) / scale, (n - hi) / scale});
  }
  auto check = [&](double v, const char* what) {
    if (!(v <= rep.tolerance)) rep.failures.push_back(what);
    rep.worst = std::max(rep.worst, std::isnan(v) ? kInf : v);
  };
  check(rep.normalization, "normalization");
  check(rep.sign_symmetry, "sign-symmetry");
  check(rep.homogeneity, "homogeneity");
  check(rep.triangle, "triangle");
  check(rep.sandwich, "l1-linf-sandwich");
  return rep;
}

// Tabulates Z on a uniform angle grid; the inverse of the tabulated family.
inline UncondNorm2 tabulate(const UncondNorm2& z, std::size_t nodes) {
  require(nodes >= 2, "tabulate needs >= 2 nodes");
  std::vector<double> ang(nodes), rad(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double t = kHalfPi * static_cast<double>(j) / static_cast<double>(nodes - 1);
    ang[j] = t;
    const double c = j + 1 == nodes ? 0.0 : std::cos(t), s = j + 1 == nodes ? 1.0 : std::sin(t);
    rad[j] = 1.0 / z(c, s);
  }
  return UncondNorm2::tabulated(std::move(ang), std::move(rad));
}

}  // namespace spiralbend
