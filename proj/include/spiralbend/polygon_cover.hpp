#pragma once

#include "spiralbend/common.hpp"
#include "spiralbend/norms2d.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spiralbend {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

// Intersection of line a1a2 with line b1b2; nullopt when (nearly) parallel.
inline std::optional<Point2> intersect_lines(Point2 a1, Point2 a2, Point2 b1, Point2 b2) {
  const Point2 d1 = a2 - a1, d2 = b2 - b1;
  const double det = cross(d1, d2);
  const double scale = std::hypot(d1.x, d1.y) * std::hypot(d2.x, d2.y);
  if (!(std::abs(det) > 1e-14 * scale)) return std::nullopt;
  const double s = cross(b1 - a1, d2) / det;
  return a1 + s * d1;
}

// Planar convex body symmetric about both axes, given by its gauge.
class Body2 {
 public:
  using Gauge = std::function<double(double, double)>;

  Body2(std::string name, Gauge gauge, std::optional<double> top = std::nullopt)
      : name_(std::move(name)), gauge_(std::move(gauge)), top_(top) {}

  // Unit ball of the 2D lp norm.
  static Body2 lp_ball(double p) {
    const auto z = UncondNorm2::lp(p);
    return Body2(z.name() + "-ball", [z](double x, double y) { return z(x, y); },
                 std::isinf(p) ? 1.0 : 0.0);
  }
  static Body2 disk() { return lp_ball(2.0).renamed("disk"); }
  static Body2 diamond() { return lp_ball(1.0).renamed("l1-ball"); }
  static Body2 square() { return lp_ball(kInf).renamed("square"); }
  static Body2 superellipse(double p) { return lp_ball(p).renamed("superellipse"); }

  // { (x,y) : |y| <= 1, |x| <= r(|y|) } for a concave r on [0,1].
  static Body2 from_radial(std::string name, std::function<double(double)> r) {
    auto member = [r](double x, double y) {
      const double ay = std::abs(y);
      return ay <= 1.0 && std::abs(x) <= r(ay);
    };
    Gauge g = [member](double x, double y) {
      if (x == 0.0 && y == 0.0) return 0.0;
      double hi = 1.0;
      while (!member(x / hi, y / hi)) hi *= 2.0;
      double lo = hi / 2.0;
      while (member(x / lo, y / lo) && lo > 1e-300) lo /= 2.0;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (member(x / mid, y / mid) ? hi : lo) = mid;
      }
      return hi;
    };
    const double top = r(1.0);
    return Body2(std::move(name), std::move(g), top);
  }

  // Piecewise-linear radial function through raw samples r_i at heights
  // 1 - i/k.
  static Body2 from_samples(std::string name, std::vector<double> r) {
    const std::size_t k = r.size() - 1;
    auto f = [r, k](double t) {
      const double s = (1.0 - t) * static_cast<double>(k);
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::floor(s)), k - 1);
      const double w = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
      return (1.0 - w) * r[i] + w * r[i + 1];
    };
    return from_radial(std::move(name), f);
  }

  double gauge(double x, double y) const { return gauge_(x, y); }
  double gauge(Point2 p) const { return gauge_(p.x, p.y); }
  const std::string& name() const { return name_; }

  // Largest x with (x, 1) in the body.
  double top_halfwidth() const {
    if (top_) return *top_;
    double lo = 0.0, hi = 1.0;
    if (gauge_(hi, 1.0) <= 1.0) return hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gauge_(mid, 1.0) <= 1.0 ? lo : hi) = mid;
    }
    // Rounding lets gauge(x, 1) read exactly 1 for x ~ 1e-8 on smooth tops.
    return lo < 1e-6 ? 0.0 : lo;
  }

  Body2 renamed(std::string n) const { return Body2(std::move(n), gauge_, top_); }

  // { (sx x, sy y) : (x, y) in body }.
  Body2 stretched(double sx, double sy) const {
    auto g = gauge_;
    std::optional<double> top;
    if (sy == 1.0 && top_) top = sx * *top_;
    return Body2(name_ + "-stretched", [g, sx, sy](double x, double y) { return g(x / sx, y / sy); },
                 top);
  }

 private:
  std::string name_;
  Gauge gauge_;
  std::optional<double> top_;
};

// Radii r_0..r_k of a body at heights 1 - i delta, delta = 1/k.
struct RadialProfile {
  std::size_t k = 0;
  double delta = 0.0;
  std::vector<double> r;
  bool flat_top = false;
  std::optional<Body2> body;

  double height(std::size_t i) const { return 1.0 - static_cast<double>(i) * delta; }
  // L_i = r_i - r_{i-1}, L_0 = r_0.
  double L(std::size_t i) const { return i == 0 ? r[0] : r[i] - r[i - 1]; }

  const Body2& oracle() const {
    if (!body) throw InvalidArgument("profile has no body oracle");
    return *body;
  }
};

class InvalidBody : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

namespace detail {

inline void check_profile(const RadialProfile& p) {
  if (p.k < 5) throw InvalidArgument("profile needs k >= 5");
  if (p.r.size() != p.k + 1) throw InvalidArgument("profile needs k+1 radii");
  if (p.r[p.k] != 1.0) throw InvalidBody("profile must end at r_k = 1");
  for (std::size_t i = 0; i <= p.k; ++i)
    if (!(p.r[i] >= 0.0 && p.r[i] <= 1.0)) throw InvalidBody("radii must lie in [0,1]");
  for (std::size_t i = 1; i < p.k; ++i)
    if (p.L(i + 1) > p.L(i) + 1e-12)
      throw InvalidBody("increments L_i must be nonincreasing for i >= 1 (fails at i=" +
                        std::to_string(i + 1) + ")");
}

}  // namespace detail

inline RadialProfile sample_profile(const Body2& body, std::size_t k) {
  if (k < 5) throw InvalidArgument("sample_profile needs k >= 5");
  const double tol = 1e-9;
  for (auto [x, y] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}})
    if (std::abs(body.gauge(x, y) - 1.0) > tol)
      throw InvalidBody("body must have (+-1,0) and (0,+-1) on its boundary");
  for (auto [x, y] : {std::pair{0.3, 0.7}, {0.8, 0.1}, {0.55, 0.55}}) {
    const double g = body.gauge(x, y);
    for (auto [sx, sy] : {std::pair{-1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}})
      if (std::abs(body.gauge(sx * x, sy * y) - g) > tol * g)
        throw InvalidBody("body is not symmetric about the axes");
  }
  RadialProfile p;
  p.k = k;
  p.delta = 1.0 / static_cast<double>(k);
  p.r.assign(k + 1, 0.0);
  p.r[0] = body.top_halfwidth();
  p.flat_top = p.r[0] > 1e-12;
  if (!p.flat_top) p.r[0] = 0.0;
  p.r[k] = 1.0;
  for (std::size_t i = 1; i < k; ++i) {
    const double y = p.height(i);
    double lo = 0.0, hi = 1.0;
    if (body.gauge(hi, y) <= 1.0) {
      p.r[i] = 1.0;
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      (body.gauge(mid, y) <= 1.0 ? lo : hi) = mid;
    }
    p.r[i] = lo;
  }
  p.body = body;
  detail::check_profile(p);
  return p;
}

// Raw radii r_0..r_k; the body oracle is their piecewise-linear hull.
inline RadialProfile profile_from_samples(std::vector<double> r) {
  RadialProfile p;
  require(r.size() >= 6, "profile needs k >= 5");
  p.k = r.size() - 1;
  p.delta = 1.0 / static_cast<double>(p.k);
  p.flat_top = r[0] > 1e-12;
  if (!p.flat_top) r[0] = 0.0;
  p.r = std::move(r);
  detail::check_profile(p);
  p.body = Body2::from_samples("sampled", p.r);
  return p;
}

struct RadialReport {
  double worst_concavity = 0.0;  // max increase of slope between neighbours
  double worst_evenness = 0.0;
  double worst_increase = 0.0;  // on [0, 1]
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Discrete concavity, even symmetry and monotonicity of sampled r on [-1,1];
// samples must sit on a grid symmetric about 0.
inline RadialReport check_radial_function(const std::vector<double>& t, const std::vector<double>& r,
                                          double tol = 1e-12) {
  require(t.size() == r.size() && t.size() >= 3, "radial check needs >= 3 samples");
  RadialReport rep;
  const std::size_t n = t.size();
  for (std::size_t j = 1; j < n; ++j) require(t[j] > t[j - 1], "sample heights must increase");
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double s0 = (r[j] - r[j - 1]) / (t[j] - t[j - 1]);
    const double s1 = (r[j + 1] - r[j]) / (t[j + 1] - t[j]);
    const double v = s1 - s0;
    rep.worst_concavity = std::max(rep.worst_concavity, v);
    if (v > tol) rep.violations.push_back("concavity at t=" + std::to_string(t[j]));
  }
  for (std::size_t j = 0; j < n; ++j) {
    require(std::abs(t[j] + t[n - 1 - j]) <= 1e-12, "sample grid must be symmetric about 0");
    const double v = std::abs(r[j] - r[n - 1 - j]);
    rep.worst_evenness = std::max(rep.worst_evenness, v);
    if (v > tol && j < n / 2) rep.violations.push_back("evenness at t=" + std::to_string(t[j]));
  }
  for (std::size_t j = 1; j < n; ++j)
    if (t[j - 1] >= 0.0) {
      const double v = r[j] - r[j - 1];
      rep.worst_increase = std::max(rep.worst_increase, v);
      if (v > tol) rep.violations.push_back("increase at t=" + std::to_string(t[j]));
    }
  return rep;
}

inline RadialReport check_radial_function(const std::function<double(double)>& f, std::size_t n = 2001,
                                          double tol = 1e-12) {
  std::vector<double> t(n), r(n);
  for (std::size_t j = 0; j < n; ++j) {
    t[j] = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n - 1);
    if (2 * j + 1 == n) t[j] = 0.0;
  }
  for (std::size_t j = 0; j < n / 2; ++j) t[n - 1 - j] = -t[j];
  for (std::size_t j = 0; j < n; ++j) r[j] = f(t[j]);
  return check_radial_function(t, r, tol);
}

inline double omega(double delta) { return 4.0 * delta + std::sqrt(delta); }

struct CoverPolygon {
  std::size_t k = 0;
  double delta = 0.0;
  double omega = 0.0;
  bool sharp_top = false;
  double alpha = std::numeric_limits<double>::quiet_NaN();  // sharp top only
  std::vector<Point2> P;  // P_0..P_k
  std::vector<Point2> R;  // R_0..R_{k-1}
  std::vector<Point2> Q;  // Q_0..Q_{k-1}
  std::vector<Point2> T;  // T_0..T_k, entries 0 and 1 unused
  std::vector<std::size_t> degenerate;  // R indices whose lines were parallel

  // First-quadrant chain P_0, R_0, P_1, ..., R_{k-1}, P_k.
  std::vector<Point2> chain() const {
    std::vector<Point2> c;
    for (std::size_t i = 0; i < k; ++i) c.push_back(P[i]), c.push_back(R[i]);
    c.push_back(P[k]);
    return c;
  }
};

inline CoverPolygon build_polygon(const RadialProfile& p) {
  detail::check_profile(p);
  const double d = p.delta;
  if (!(d < 0.25)) throw InvalidArgument("polygon cover needs delta < 1/4");
  const std::size_t k = p.k;
  CoverPolygon c;
  c.k = k;
  c.delta = d;
  c.omega = omega(d);
  c.sharp_top = !p.flat_top;
  auto A = [&](std::size_t i) { return Point2{p.r[i], p.height(i)}; };
  c.P.resize(k + 1);
  c.P[0] = {0.0, 1.0};
  for (std::size_t i = 1; i <= k; ++i) c.P[i] = {(1.0 + d) * p.r[i], p.height(i)};
  c.P[k] = {1.0 + d, 0.0};
  c.R.assign(k, Point2{});
  auto put = [&](std::size_t i, std::optional<Point2> q) {
    if (q) c.R[i] = *q;
    else c.degenerate.push_back(i);
  };
  for (std::size_t i = 1; i + 2 <= k; ++i)
    put(i, intersect_lines(A(i - 1), c.P[i], c.P[i + 1], A(i + 2)));
  put(k - 1, intersect_lines(Point2{p.r[k - 2], 2.0 * d}, c.P[k - 1], Point2{p.r[k - 1], -d}, c.P[k]));
  if (p.flat_top) {
    put(0, intersect_lines(c.P[1], A(2), Point2{0.0, 1.0}, Point2{1.0, 1.0}));
  } else {
    put(0, intersect_lines(Point2{-p.r[1], 1.0 - d}, Point2{0.0, 1.0}, Point2{1.0, 0.0}, c.P[1]));
    const double r1 = p.r[1];
    c.alpha = ((1.0 + d) * r1 - d) / ((1.0 - 2.0 * d - d * d) * r1 + d);
  }
  // Diagnostic points as line extensions by one level.
  c.Q.resize(k);
  for (std::size_t i = 1; i + 1 <= k; ++i) {
    const Point2 a = c.P[i], b = A(i + 1);
    c.Q[i - 1] = {a.x + (a.x - b.x), p.height(i - 1)};
  }
  c.Q[k - 1] = {2.0 * (1.0 + d) - p.r[k - 1], d};
  c.T.assign(k + 1, Point2{});
  for (std::size_t i = 2; i <= k; ++i) {
    const Point2 a = c.P[i - 1], b = A(i - 2);
    c.T[i] = {a.x + (a.x - b.x), p.height(i)};
  }
  return c;
}

struct Clause {
  std::string name;
  std::size_t index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct ContainmentCertificate {
  double omega = 0.0;
  double max_vertex_gauge = 0.0;
  double max_sample_gauge = 0.0;
  std::size_t samples = 0;
  std::vector<Point2> counterexamples;
  std::vector<Clause> clauses;
  bool certified = false;

  std::size_t failed_clauses() const {
    std::size_t n = 0;
    for (const auto& c : clauses) n += !c.holds;
    return n;
  }
};

inline ContainmentCertificate verify_containment(const CoverPolygon& c, const RadialProfile& p,
                                                 std::size_t samples = 10000) {
  const Body2& body = p.oracle();
  const double w = c.omega, d = c.delta;
  const std::size_t k = c.k;
  const double tol = 1e-12;
  ContainmentCertificate cert;
  cert.omega = w;
  auto clause = [&](std::string name, std::size_t i, double lhs, double rhs) {
    cert.clauses.push_back({std::move(name), i, lhs, rhs, lhs >= rhs - tol});
  };
  const auto& r = p.r;
  auto L = [&](std::size_t i) { return p.L(i); };
  const double root_k = 1.0 / std::sqrt(d);
  // Horizontal stretch below 1 - sqrt(delta).
  for (std::size_t i = 2; i <= k; ++i) {
    if (static_cast<double>(i) < root_k + 1.0) continue;
    if (i <= k - 1)
      clause("B", i - 1, (1 + w) * r[i - 1], r[i - 1] + 2 * d * r[i] + (L(i) - L(i + 1)));
    clause("T", i, (1 + w) * r[i], r[i] + 2 * d * r[i - 1] + (L(i - 1) - L(i)));
  }
  clause("last", k - 1, (1 + w) * r[k - 1], 2 + 2 * d - r[k - 1]);
  // Full dilation above 1 - sqrt(delta).
  for (std::size_t i = 1; i <= k && static_cast<double>(i - 1) < root_k; ++i)
    clause("lift", i, (1 + w) * p.height(i), 1 - static_cast<double>(i - 1) * d);
  for (std::size_t i = 1; i + 1 <= k; ++i)
    clause("stretch", i, (1 + w) * r[i], r[i - 1] + 2 * d * r[i] + (L(i) - L(i + 1)));
  if (c.sharp_top) {
    const double a = c.alpha, r1 = r[1];
    clause("xR0", 0, 1 + w, a);
    clause("yR0", 0, (1 - d) * w, d * (1 + a));
    clause("yR0-aux", 0, (1 - d) * w, d * (2 + w));
    const double num = (3 + d) * r1 - 2, den = (1 - 2 * d - d * d) * r1 + d;
    clause("nar", 0, w, d * num / den);
    if (num > 0) {
      const double bound = d * (3 + 4 * d + d * d) / (2 - d - d * d);
      clause("nar-case2", 0, d * (3 + 4 * d + d * d) / (2 - d - d * d), d * num / den);
      clause("nar-case2-4delta", 0, 4 * d, bound);
    }
    clause("R0-x", 0, (1 + w) * r1, c.R[0].x);
    clause("R0-y", 0, (1 + w) * (1 - d), c.R[0].y);
  }
  // Gauge at vertices and along the chain.
  const double limit = 1 + w + 1e-9;
  const auto chain = c.chain();
  for (const auto& v : chain) {
    const double g = body.gauge(v);
    cert.max_vertex_gauge = std::max(cert.max_vertex_gauge, g);
    if (g > limit) cert.counterexamples.push_back(v);
  }
  double total = 0.0;
  std::vector<double> len(chain.size() - 1);
  for (std::size_t s = 0; s + 1 < chain.size(); ++s) {
    len[s] = std::hypot(chain[s + 1].x - chain[s].x, chain[s + 1].y - chain[s].y);
    total += len[s];
  }
  for (std::size_t s = 0; s + 1 < chain.size(); ++s) {
    const std::size_t m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::round(static_cast<double>(samples) * len[s] / total)));
    for (std::size_t j = 0; j < m; ++j) {
      const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
      const Point2 q = chain[s] + t * (chain[s + 1] - chain[s]);
      const double g = body.gauge(q);
      cert.max_sample_gauge = std::max(cert.max_sample_gauge, g);
      if (g > limit) cert.counterexamples.push_back(q);
      ++cert.samples;
    }
  }
  cert.certified = cert.counterexamples.empty() && cert.failed_clauses() == 0 && c.degenerate.empty();
  return cert;
}

struct IntervalCheck {
  std::size_t level = 0;
  double inner_gauge = 0.0;  // gauge of H at (r_i, y_i)
  double outer_gauge = 0.0;  // gauge of H at ((1+delta) r_i, y_i)
  double crossing = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

struct IntervalCertificate {
  double omega = 0.0;
  double top_error = 0.0;  // |gauge_H(0,1) - 1|
  std::vector<IntervalCheck> intervals;
  std::optional<std::size_t> failing_level;
  double contains_a = 0.0;  // max gauge of H over the boundary of A
  double max_gauge = 0.0;   // max gauge of A over the boundary of H
  std::size_t samples = 0;
  bool hypothesis_ok = false;
  bool certified = false;
};

// Checks that the boundary of H crosses every interval [r_i, (1+delta) r_i]
// at height 1 - i delta (i = 1..k; at i = k this allows the crossing of the
// x-axis anywhere in [1, 1+delta]), that H contains A and touches (0,1), then
// samples the boundary of H against (1 + omega) A.
inline IntervalCertificate verify_interval_body(const Body2& h, const RadialProfile& p,
                                                std::size_t samples = 10000, double tol = 1e-9) {
  const Body2& a = p.oracle();
  IntervalCertificate cert;
  cert.omega = omega(p.delta);
  cert.top_error = std::abs(h.gauge(0.0, 1.0) - 1.0);
  bool ok = cert.top_error <= tol;
  if (!ok) cert.failing_level = 0;
  for (std::size_t i = 1; i <= p.k; ++i) {
    IntervalCheck iv;
    iv.level = i;
    const double y = p.height(i), x0 = p.r[i], x1 = (1.0 + p.delta) * p.r[i];
    iv.inner_gauge = h.gauge(x0, y);
    iv.outer_gauge = h.gauge(x1, y);
    iv.ok = iv.inner_gauge <= 1.0 + tol && iv.outer_gauge >= 1.0 - tol;
    if (iv.ok) {
      double lo = x0, hi = x1;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h.gauge(mid, y) <= 1.0 ? lo : hi) = mid;
      }
      iv.crossing = lo;
    } else if (!cert.failing_level) {
      cert.failing_level = i;
    }
    ok = ok && iv.ok;
    cert.intervals.push_back(iv);
  }
  cert.samples = samples;
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = kHalfPi * static_cast<double>(j) / static_cast<double>(samples - 1);
    const double cx = j + 1 == samples ? 0.0 : std::cos(t), cy = j + 1 == samples ? 1.0 : std::sin(t);
    const double ga = a.gauge(cx, cy), gh = h.gauge(cx, cy);
    cert.contains_a = std::max(cert.contains_a, gh / ga);
    cert.max_gauge = std::max(cert.max_gauge, ga / gh);
  }
  cert.hypothesis_ok = ok && cert.contains_a <= 1.0 + tol;
  cert.certified = cert.hypothesis_ok && cert.max_gauge <= 1.0 + cert.omega + tol;
  return cert;
}

struct SectionCertificate {
  double delta = 0.0;
  RadialReport radial;
  IntervalCertificate interval;
  bool certified = false;
};

// A = { |x| <= r(y) }, H = { |x| <= h(y) } on |y| <= 1, delta = 1/k.
inline SectionCertificate section_check(const std::function<double(double)>& r,
                                        const std::function<double(double)>& h, double delta,
                                        std::size_t samples = 10000) {
  const double kk = std::round(1.0 / delta);
  require(std::abs(kk * delta - 1.0) <= 1e-12, "delta must be 1/k for an integer k");
  SectionCertificate s;
  s.delta = delta;
  s.radial = check_radial_function(r, 2001, 1e-9);
  auto even = [](std::function<double(double)> f) {
    return [f](double t) { return f(std::abs(t)); };
  };
  const Body2 a = Body2::from_radial("section-A", even(r));
  const Body2 hb = Body2::from_radial("section-H", even(h));
  const RadialProfile p = sample_profile(a, static_cast<std::size_t>(kk));
  s.interval = verify_interval_body(hb, p, samples);
  s.certified = s.radial.ok() && s.interval.certified;
  return s;
}

}  // namespace spiralbend
