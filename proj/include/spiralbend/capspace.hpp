#pragma once

#include "spiralbend/common.hpp"
#include "spiralbend/model_space.hpp"

#include <Eigen/Dense>
#include <boost/geometry/algorithms/intersects.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace spiralbend {

using Vec4 = Eigen::Vector4d;
using Frame4 = Eigen::Matrix<double, 4, 2>;

// Cap of the Euclidean ball cut by the hyperplane <w, x> = h.
struct CapSpec {
  Vec4 w = Vec4::Zero();
  double h = 1.0;
  bool structured = false;
};

// Chordal radius delta puts the cutting plane at height 1 - delta^2/2.
inline double cap_height(double delta) { return 1.0 - 0.5 * delta * delta; }

// Omega between 2-planes of R^4 from the smallest singular value of U^T W.
// Loses accuracy below ~1e-8; use spherical_opening when that matters.
inline double opening_fast(const Frame4& u, const Frame4& w) {
  const Eigen::Matrix2d m = u.transpose() * w;
  const double f = m.squaredNorm(), d = m.determinant();
  const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * d * d));
  const double smin = std::sqrt(std::max(0.0, 0.5 * (f - disc)));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::min(1.0, smin)));
}

inline Frame4 random_frame(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Frame4 f;
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 4; ++r) f(r, c) = g(rng);
  f.col(0).normalize();
  f.col(1) -= f.col(0).dot(f.col(1)) * f.col(0);
  f.col(1).normalize();
  f.col(1) -= f.col(0).dot(f.col(1)) * f.col(0);
  f.col(1).normalize();
  return f;
}

inline Frame4 frame_of(const Subspace& s) {
  require(s.ambient() == 4 && s.dim() == 2, "expected a 2-plane in R^4");
  return s.frame();
}

inline Frame4 y1_frame() {
  Frame4 f = Frame4::Zero();
  f(0, 0) = f(1, 1) = 1.0;
  return f;
}
inline Frame4 y2_frame() {
  Frame4 f = Frame4::Zero();
  f(2, 0) = f(3, 1) = 1.0;
  return f;
}

inline Subspace y1_plane() { return Subspace(Eigen::MatrixXd(y1_frame())); }
inline Subspace y2_plane() { return Subspace(Eigen::MatrixXd(y2_frame())); }

// Distance from a unit vector to the unit sphere of Y1 (coordinates 0,1) or Y2.
inline double dist_to_sphere(const Vec4& w, int which) {
  const double p = which == 1 ? std::sqrt(w[0] * w[0] + w[1] * w[1]) : std::sqrt(w[2] * w[2] + w[3] * w[3]);
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * p));
}

// Self-dual and anti-self-dual halves of the Pluecker vector of a 2-plane,
// each a unit vector in R^3. With alpha, beta the angles between matching
// halves of two planes, the largest principal angle is
// min((alpha + beta) / 2, pi - (alpha + beta) / 2).
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> plucker_halves(const Frame4& f) {
  auto p = [&](int i, int j) { return f(i, 0) * f(j, 1) - f(j, 0) * f(i, 1); };
  const Eigen::Vector3d a(p(0, 1) + p(2, 3), p(0, 2) - p(1, 3), p(0, 3) + p(1, 2));
  const Eigen::Vector3d b(p(0, 1) - p(2, 3), p(0, 2) + p(1, 3), p(0, 3) - p(1, 2));
  return {a.normalized(), b.normalized()};
}

namespace detail {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using P4 = bg::model::point<double, 4, bg::cs::cartesian>;
using Entry4 = std::pair<P4, std::uint32_t>;
using Tree4 = bgi::rtree<Entry4, bgi::quadratic<16>>;

template <class P, std::size_t N, class V>
P make_point(const V& v) {
  P p;
  [&]<std::size_t... I>(std::index_sequence<I...>) { (bg::set<I>(p, v[I]), ...); }
  (std::make_index_sequence<N>{});
  return p;
}

template <class P, std::size_t N, class V>
bg::model::box<P> make_box(const V& v, double r) {
  std::array<double, N> lo, hi;
  for (std::size_t i = 0; i < N; ++i) lo[i] = v[i] - r, hi[i] = v[i] + r;
  return {make_point<P, N>(lo), make_point<P, N>(hi)};
}

inline std::array<double, 6> plane_key(const Frame4& f, double sign) {
  const auto [a, b] = plucker_halves(f);
  return {sign * a[0], sign * a[1], sign * a[2], sign * b[0], sign * b[1], sign * b[2]};
}

// Planes bucketed on a dense grid over the self-dual half, both signs.
// Omega < rho forces alpha, beta < 2 theta_rho, which bounds each coordinate
// difference of the halves by the same amount.
class PlaneIndex {
 public:
  PlaneIndex(const std::vector<Frame4>* planes, double rho) : planes_(planes) {
    side_ = (2.0 * 2.0 * std::asin(std::min(1.0, 0.5 * rho)) + 1e-9) / 2.0;
    n_ = static_cast<int>(std::ceil(2.0 / side_)) + 1;
    cells_.resize(static_cast<std::size_t>(n_) * n_ * n_);
  }

  void insert(std::uint32_t i) {
    for (double s : {1.0, -1.0}) {
      const auto k = plane_key((*planes_)[i], s);
      cells_[cell(k[0], k[1], k[2])].push_back({k, i});
    }
  }

  // Visits members that may lie within Omega < rho of f (a superset); stops
  // when fn returns true.
  template <class Fn>
  bool visit(const Frame4& f, double rho, Fn&& fn) const {
    const auto k = plane_key(f, 1.0);
    const double reach = 2.0 * 2.0 * std::asin(std::min(1.0, 0.5 * rho)) + 1e-9;
    const double cos_r = std::cos(std::min(kPi, reach));
    int lo[3], hi[3];
    for (int d = 0; d < 3; ++d) lo[d] = coord(k[d] - reach), hi[d] = coord(k[d] + reach);
    for (int x = lo[0]; x <= hi[0]; ++x)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int z = lo[2]; z <= hi[2]; ++z)
          for (const auto& e : cells_[index(x, y, z)]) {
            if (e.key[0] * k[0] + e.key[1] * k[1] + e.key[2] * k[2] < cos_r) continue;
            if (e.key[3] * k[3] + e.key[4] * k[4] + e.key[5] * k[5] < cos_r) continue;
            if (fn(e.id)) return true;
          }
    return false;
  }

  std::vector<std::uint32_t> candidates(const Frame4& f, double rho) const {
    std::vector<std::uint32_t> out;
    visit(f, rho, [&](std::uint32_t i) { return out.push_back(i), false; });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool any_within(const Frame4& f, double rho) const {
    return visit(f, rho, [&](std::uint32_t i) { return opening_fast(f, (*planes_)[i]) < rho; });
  }

  // Nearest Omega; exact below rho, brute force beyond.
  double nearest(const Frame4& f, double rho) const {
    double best = kInf;
    visit(f, rho, [&](std::uint32_t i) { return best = std::min(best, opening_fast(f, (*planes_)[i])), false; });
    if (best < rho) return best;
    for (const auto& w : *planes_) best = std::min(best, opening_fast(f, w));
    return best;
  }

 private:
  struct Entry {
    std::array<double, 6> key;
    std::uint32_t id;
  };
  int coord(double v) const { return std::clamp(static_cast<int>(std::floor((v + 1.0) / side_)), 0, n_ - 1); }
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * n_ + y) * n_ + z;
  }
  std::size_t cell(double x, double y, double z) const { return index(coord(x), coord(y), coord(z)); }

  const std::vector<Frame4>* planes_;
  double side_ = 0.0;
  int n_ = 0;
  std::vector<std::vector<Entry>> cells_;
};

}  // namespace detail

struct NetInfo {
  std::vector<Frame4> planes;  // planes[0] = Y1, planes[1] = Y2
  std::size_t pool = 0;
  std::size_t validation = 0;
  double separation = 0.0;           // min pairwise Omega
  double covering_radius = 0.0;      // max over validation planes of min Omega
  bool covering_achieved = false;    // covering_radius < delta
  std::vector<std::size_t> uncapped;  // members whose centre search fell short of delta
  std::size_t members = 0;            // net size, kept when planes are not stored
};

class CapSpace4 {
 public:
  CapSpace4(double delta, std::uint64_t seed, std::vector<CapSpec> caps, NetInfo net = {})
      : delta_(delta), seed_(seed), caps_(std::move(caps)), net_(std::move(net)) {
    if (!(delta > 0.0 && delta < 0.25)) throw InvalidParameter("cap space needs delta in (0, 1/4)");
    std::set<std::array<double, 4>> seen;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < caps_.size(); ++i) {
      const auto& c = caps_[i];
      require(std::abs(c.w.norm() - 1.0) <= 1e-12, "cap centre must be a unit vector");
      require(c.h > 0.0 && c.h < 1.0, "cap height must lie in (0,1)");
      if (seen.count({-c.w[0], -c.w[1], -c.w[2], -c.w[3]})) continue;
      seen.insert({c.w[0], c.w[1], c.w[2], c.w[3]});
      keep.push_back(i);
    }
    // Scaled functionals w/h, one per +- pair.
    fn_.resize(static_cast<Eigen::Index>(keep.size()), 4);
    for (std::size_t j = 0; j < keep.size(); ++j)
      fn_.row(static_cast<Eigen::Index>(j)) = caps_[keep[j]].w.transpose() / caps_[keep[j]].h;
    // Only caps whose centre is within chord delta of +-x/|x| can exceed the
    // Euclidean norm, so large cap sets are queried through an rtree.
    if (keep.size() > 256) {
      std::vector<detail::Entry4> entries;
      for (std::size_t j = 0; j < keep.size(); ++j)
        for (double sg : {1.0, -1.0}) {
          const Vec4 w = sg * caps_[keep[j]].w;
          entries.push_back({detail::make_point<detail::P4, 4>(w), static_cast<std::uint32_t>(j)});
          reach_ = std::max(reach_, std::sqrt(std::max(0.0, 2.0 - 2.0 * caps_[keep[j]].h)));
        }
      tree_ = std::make_shared<const detail::Tree4>(entries.begin(), entries.end());
    }
  }

  double delta() const { return delta_; }
  std::uint64_t seed() const { return seed_; }
  double sigma() const { return cap_height(delta_); }
  double tau() const { return std::sqrt(1.0 - sigma() * sigma()); }
  double a() const { return tau() / sigma(); }
  double h() const { return cap_height(delta_); }
  const std::vector<CapSpec>& caps() const { return caps_; }
  const NetInfo& net() const { return net_; }
  std::size_t structured_count() const {
    std::size_t n = 0;
    for (const auto& c : caps_) n += c.structured;
    return n;
  }

  // max(||x||_2, max |<w,x>|/h). Cap values within 8 ulp of the Euclidean
  // norm are rounding from caps tangent to S(Y1), S(Y2) and read as Euclidean.
  double operator()(const Vec4& x) const {
    const double e = norm2(Vec(x));
    if (fn_.rows() == 0 || e == 0.0) return e;
    double c = 0.0;
    if (tree_) {
      const Vec4 xh = x / e;
      std::vector<detail::Entry4> hits;
      tree_->query(detail::bgi::intersects(detail::make_box<detail::P4, 4>(xh, reach_ * (1.0 + 1e-6) + 1e-12)),
                   std::back_inserter(hits));
      for (const auto& hh : hits)
        c = std::max(c, std::abs(fn_.row(static_cast<Eigen::Index>(hh.second)).dot(x)));
    } else {
      for (Eigen::Index j = 0; j < fn_.rows(); ++j) c = std::max(c, std::abs(fn_.row(j).dot(x)));
    }
    return c > e * (1.0 + 8.0 * std::numeric_limits<double>::epsilon()) ? c : e;
  }
  double operator()(const Vec& x) const {
    require(x.size() == 4, "cap space vectors live in R^4");
    return (*this)(Vec4(x));
  }

  // Reference evaluation over every cap, without the index.
  double brute(const Vec4& x) const {
    const double e = norm2(Vec(x));
    double c = 0.0;
    for (Eigen::Index j = 0; j < fn_.rows(); ++j) c = std::max(c, std::abs(fn_.row(j).dot(x)));
    return c > e * (1.0 + 8.0 * std::numeric_limits<double>::epsilon()) ? c : e;
  }

 private:
  double delta_;
  std::uint64_t seed_;
  std::vector<CapSpec> caps_;
  NetInfo net_;
  Eigen::Matrix<double, Eigen::Dynamic, 4> fn_;
  std::shared_ptr<const detail::Tree4> tree_;
  double reach_ = 0.0;
};

inline double eval_norm(const CapSpace4& c, const Vec& x) { return c(x); }

// The 32 caps tangent to S(Y1) and S(Y2): +-sigma e_j +- tau e_l.
inline std::vector<CapSpec> structured_caps(double delta) {
  const double s = cap_height(delta), t = std::sqrt(1.0 - s * s), h = cap_height(delta);
  const std::pair<int, int> pairs[] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {3, 0}, {3, 1}};
  std::vector<CapSpec> out;
  for (auto [j, l] : pairs)
    for (double sj : {1.0, -1.0})
      for (double sl : {1.0, -1.0}) {
        CapSpec c;
        c.w = Vec4::Zero();
        c.w[j] = sj * s;
        c.w[l] = sl * t;
        c.h = h;
        c.structured = true;
        out.push_back(c);
      }
  return out;
}

struct CentreSearch {
  Vec4 w = Vec4::Zero();
  double objective = 0.0;  // min distance to S(Y1), S(Y2)
};

// Maximizes min(dist(w, S(Y1)), dist(w, S(Y2))) over the unit circle of a plane.
inline CentreSearch best_centre(const Frame4& f, std::size_t grid = 32) {
  auto point = [&](double phi) -> Vec4 { return std::cos(phi) * f.col(0) + std::sin(phi) * f.col(1); };
  auto obj = [&](double phi) {
    const Vec4 w = point(phi);
    return std::min(dist_to_sphere(w, 1), dist_to_sphere(w, 2));
  };
  const double step = kPi / static_cast<double>(grid);
  std::size_t best = 0;
  double bv = -1.0;
  for (std::size_t j = 0; j < grid; ++j) {
    const double v = obj(step * static_cast<double>(j));
    if (v > bv) bv = v, best = j;
  }
  double lo = step * (static_cast<double>(best) - 1.0), hi = step * (static_cast<double>(best) + 1.0);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo), f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 48; ++it) {
    if (f1 < f2) lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = obj(x2);
    else hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = obj(x1);
  }
  double phi = 0.5 * (lo + hi);
  if (obj(phi) < bv) phi = step * static_cast<double>(best);
  CentreSearch r;
  r.w = point(phi).normalized();
  r.objective = std::min(dist_to_sphere(r.w, 1), dist_to_sphere(r.w, 2));
  return r;
}

// 1e5 candidates at delta = 0.2, scaled with the volume of a delta-ball in
// the 4-dimensional Grassmannian.
inline std::size_t default_pool(double delta) {
  return static_cast<std::size_t>(std::ceil(1e5 * std::pow(0.2 / delta, 4)));
}

struct CapBuildOptions {
  std::size_t pool = 0;            // candidate planes for the greedy net; 0 picks default_pool
  std::size_t validation = 20000;  // fresh planes for the covering radius
  int threads = 0;
};

inline CapSpace4 build_capspace(double delta, std::uint64_t seed, const CapBuildOptions& opt = {}) {
  if (!(delta > 0.0 && delta < 0.25)) throw InvalidParameter("cap space needs delta in (0, 1/4)");
  std::mt19937_64 rng(seed);
  NetInfo net;
  net.validation = opt.validation;
  net.pool = opt.pool ? opt.pool : default_pool(delta);
  net.planes = {y1_frame(), y2_frame()};
  detail::PlaneIndex index(&net.planes, delta);
  index.insert(0);
  index.insert(1);
  for (std::size_t i = 0; i < net.pool; ++i) {
    const Frame4 f = random_frame(rng);
    if (!index.any_within(f, delta)) {
      net.planes.push_back(f);
      index.insert(static_cast<std::uint32_t>(net.planes.size() - 1));
    }
  }
  net.separation = kInf;
  for (std::size_t i = 0; i < net.planes.size(); ++i)
    for (auto j : index.candidates(net.planes[i], 1.5 * delta))
      if (j != i) net.separation = std::min(net.separation, opening_fast(net.planes[i], net.planes[j]));
  std::vector<Frame4> fresh(opt.validation);
  for (auto& f : fresh) f = random_frame(rng);
  std::vector<double> d(fresh.size());
  parallel_chunks(fresh.size(), opt.threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) d[i] = index.nearest(fresh[i], 2.0 * delta);
  });
  net.covering_radius = 0.0;
  for (double v : d) net.covering_radius = std::max(net.covering_radius, v);
  net.covering_achieved = net.covering_radius < delta;
  net.members = net.planes.size();

  auto caps = structured_caps(delta);
  const double h = cap_height(delta);
  for (std::size_t i = 2; i < net.planes.size(); ++i) {
    const auto c = best_centre(net.planes[i]);
    if (c.objective < delta) {
      net.uncapped.push_back(i);
      continue;
    }
    caps.push_back({c.w, h, false});
    caps.push_back({Vec4(-c.w), h, false});
  }
  return CapSpace4(delta, seed, std::move(caps), std::move(net));
}

struct PropertyCertificate {
  std::size_t plane_samples = 0;
  std::size_t samples = 0;
  std::size_t triples = 0;
  // Isometry on the summands: max |‖y‖_X - ‖y‖_2| over sampled S(Y1), S(Y2).
  double iso_error = 0.0;
  double cap_clearance = -kInf;  // max |<w,y>| - h over caps and plane samples
  // Norm-one projections.
  double proj_max_ratio = 0.0;
  bool proj_equality = false;
  // Norm equivalence (1 - delta^2/2)‖x‖_X <= ‖x‖_2 <= ‖x‖_X.
  double ratio_min = kInf;  // min ‖x‖_2 / ‖x‖_X
  double ratio_max = 0.0;
  double sandwich_slack = 0.0;  // worst violation of either side, relative
  double triangle_worst = -kInf;
  double homogeneity_worst = 0.0;
  double symmetry_worst = 0.0;
  std::vector<Vec4> counterexamples;
  bool isometric_ok = false;
  bool projection_ok = false;
  bool sandwich_ok = false;
  bool axioms_ok = false;
  bool certified() const { return isometric_ok && projection_ok && sandwich_ok && axioms_ok; }
};

inline PropertyCertificate certify_properties(const CapSpace4& c, std::size_t samples, std::uint64_t seed,
                                              std::size_t triples = 100000, int threads = 0) {
  PropertyCertificate cert;
  const double h = c.h();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;

  // Summand spheres. Caps whose projection onto the plane stays below h - 0.01
  // can never come near the circle, so the clearance scan skips them.
  cert.plane_samples = samples;
  for (int which : {1, 2}) {
    std::vector<const CapSpec*> near;
    for (const auto& cap : c.caps()) {
      const int o = which == 1 ? 0 : 2;
      if (std::hypot(cap.w[o], cap.w[o + 1]) >= cap.h - 0.01) near.push_back(&cap);
    }
    for (std::size_t j = 0; j < samples; ++j) {
      const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(samples);
      Vec4 y = Vec4::Zero();
      const int o = which == 1 ? 0 : 2;
      y[o] = std::cos(t);
      y[o + 1] = std::sin(t);
      const double err = std::abs(c(y) - norm2(Vec(y)));
      cert.iso_error = std::max(cert.iso_error, err);
      if (err != 0.0) cert.counterexamples.push_back(y);
      for (const auto* cap : near)
        cert.cap_clearance = std::max(cert.cap_clearance, std::abs(cap->w.dot(y)) - cap->h);
    }
  }
  cert.isometric_ok = cert.iso_error == 0.0 && cert.cap_clearance <= 0.0;

  // Random points with spread-out scales, plus the cap centres.
  std::vector<Vec4> pts;
  for (std::size_t j = 0; j < samples; ++j) {
    Vec4 x;
    for (int i = 0; i < 4; ++i) x[i] = gauss(rng);
    pts.push_back(std::pow(10.0, -3.0 + 6.0 * unit(rng)) * x);
  }
  for (const auto& cap : c.caps()) pts.push_back(cap.w);
  for (std::size_t j = 0; j < samples; ++j) {  // points on Y1 and Y2 themselves
    Vec4 x = Vec4::Zero();
    const int o = j % 2 == 0 ? 0 : 2;
    x[o] = gauss(rng);
    x[o + 1] = gauss(rng);
    pts.push_back(x);
  }
  cert.samples = pts.size();
  std::vector<std::array<double, 4>> res(pts.size());
  parallel_chunks(pts.size(), threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec4& x = pts[i];
      const double nx = c(x), n2 = norm2(Vec(x));
      Vec4 p1 = x, p2 = x;
      p1.tail<2>().setZero();
      p2.head<2>().setZero();
      res[i] = {nx, n2, c(p1) / nx, c(p2) / nx};
    }
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [nx, n2, q1, q2] = res[i];
    const double ratio = n2 / nx;
    cert.ratio_min = std::min(cert.ratio_min, ratio);
    cert.ratio_max = std::max(cert.ratio_max, ratio);
    const double slack = std::max(ratio - 1.0, h - ratio);
    cert.sandwich_slack = std::max(cert.sandwich_slack, slack);
    if (slack > 1e-9) cert.counterexamples.push_back(pts[i]);
    cert.proj_max_ratio = std::max({cert.proj_max_ratio, q1, q2});
    if (q1 == 1.0 || q2 == 1.0) cert.proj_equality = true;
    if (std::max(q1, q2) > 1.0) cert.counterexamples.push_back(pts[i]);
  }
  cert.projection_ok = cert.proj_max_ratio <= 1.0 && cert.proj_equality;
  cert.sandwich_ok = cert.sandwich_slack <= 1e-9;

  // Norm axioms on triples (x, y, scalar).
  cert.triples = triples;
  std::vector<std::array<Vec4, 2>> tri(triples);
  std::vector<double> lam(triples);
  for (std::size_t j = 0; j < triples; ++j) {
    for (auto& v : tri[j])
      for (int i = 0; i < 4; ++i) v[i] = gauss(rng);
    lam[j] = gauss(rng) * std::pow(10.0, -2.0 + 4.0 * unit(rng));
  }
  std::vector<std::array<double, 3>> ax(triples);
  parallel_chunks(triples, threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t j = b; j < e; ++j) {
      const Vec4 &x = tri[j][0], &y = tri[j][1];
      const double nx = c(x), ny = c(y);
      const double tri_v = (c(Vec4(x + y)) - nx - ny) / (nx + ny);
      const double hom = std::abs(c(Vec4(lam[j] * x)) - std::abs(lam[j]) * nx) / (std::abs(lam[j]) * nx);
      const double sym = std::abs(c(Vec4(-x)) - nx);
      ax[j] = {tri_v, hom, sym};
    }
  });
  for (std::size_t j = 0; j < triples; ++j) {
    cert.triangle_worst = std::max(cert.triangle_worst, ax[j][0]);
    cert.homogeneity_worst = std::max(cert.homogeneity_worst, ax[j][1]);
    cert.symmetry_worst = std::max(cert.symmetry_worst, ax[j][2]);
  }
  cert.axioms_ok = cert.triangle_worst <= 1e-12 && cert.homogeneity_worst <= 1e-12 &&
                   cert.symmetry_worst == 0.0;
  return cert;
}

struct FlatnessWitness {
  bool precondition_ok = false;
  double omega1 = 0.0;
  double omega2 = 0.0;
  bool found = false;
  std::size_t cap = 0;
  Vec4 u = Vec4::Zero();
  Vec4 v = Vec4::Zero();
  double u_norm = 0.0;
  double v_norm = 0.0;
  double midpoint_norm = 0.0;
  double chord = 0.0;
  double margin = -kInf;  // max over caps of |P_Z w| - h; > 0 means S(Z) is cut
};

// Looks for a cap whose plane cuts the unit circle of Z and returns the flat
// chord it leaves on the X-sphere of Z.
inline FlatnessWitness flatness_witness(const CapSpace4& c, const Subspace& z, double gamma) {
  const Frame4 f = frame_of(z);
  FlatnessWitness out;
  out.omega1 = spherical_opening(z, y1_plane());
  out.omega2 = spherical_opening(z, y2_plane());
  out.precondition_ok = out.omega1 >= gamma && out.omega2 >= gamma;
  if (!out.precondition_ok) return out;
  const auto& caps = c.caps();
  std::vector<Eigen::Vector2d> g(caps.size());
  for (std::size_t i = 0; i < caps.size(); ++i) g[i] = f.transpose() * caps[i].w;
  for (std::size_t i = 0; i < caps.size(); ++i) out.margin = std::max(out.margin, g[i].norm() - caps[i].h);
  // Try caps in order of margin until one leaves a chord of positive length.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < caps.size(); ++i)
    if (g[i].norm() > caps[i].h) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = g[a].norm() - caps[a].h, mb = g[b].norm() - caps[b].h;
    return ma != mb ? ma > mb : a < b;
  });
  for (std::size_t j : order) {
    const double rho = g[j].norm(), s0 = caps[j].h / rho;
    const Eigen::Vector2d p = g[j] / rho, q(-p[1], p[0]);
    double lo = -std::sqrt(1.0 - s0 * s0), hi = -lo;
    for (std::size_t i = 0; i < caps.size() && lo < hi; ++i) {
      if (i == j) continue;
      const double al = s0 * g[i].dot(p), be = g[i].dot(q), hh = caps[i].h;
      if (std::abs(be) < 1e-300) {
        if (std::abs(al) > hh) hi = lo;
        continue;
      }
      double t1 = (-hh - al) / be, t2 = (hh - al) / be;
      if (t1 > t2) std::swap(t1, t2);
      lo = std::max(lo, t1);
      hi = std::min(hi, t2);
    }
    if (hi - lo <= 1e-12) continue;
    out.found = true;
    out.cap = j;
    out.u = f * (s0 * p + lo * q);
    out.v = f * (s0 * p + hi * q);
    out.u_norm = c(out.u);
    out.v_norm = c(out.v);
    out.midpoint_norm = c(Vec4(0.5 * (out.u + out.v)));
    out.chord = (out.u - out.v).norm();
    break;
  }
  return out;
}

struct WitnessSweep {
  double gamma = 0.0;
  std::size_t planes = 0;
  std::size_t found = 0;
  std::size_t rejected = 0;  // draws discarded for opening below gamma
  double min_margin = kInf;  // over planes with a witness
  double worst_midpoint_error = 0.0;
  std::vector<double> shortfall_margins;  // planes without a witness
  double rate() const { return planes ? static_cast<double>(found) / static_cast<double>(planes) : 0.0; }
};

// Seeded random planes with min(Omega(Z, Y1), Omega(Z, Y2)) >= gamma.
inline WitnessSweep witness_sweep(const CapSpace4& c, std::size_t planes, std::uint64_t seed,
                                  double gamma = -1.0) {
  WitnessSweep out;
  out.gamma = gamma < 0.0 ? 2.0 * c.delta() : gamma;
  std::mt19937_64 rng(seed);
  std::vector<Subspace> zs;
  while (zs.size() < planes) {
    const Frame4 f = random_frame(rng);
    if (std::min(opening_fast(f, y1_frame()), opening_fast(f, y2_frame())) < out.gamma) {
      ++out.rejected;
      continue;
    }
    zs.emplace_back(Eigen::MatrixXd(f));
  }
  std::vector<FlatnessWitness> ws(zs.size());
  parallel_chunks(zs.size(), thread_count(), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) ws[i] = flatness_witness(c, zs[i], out.gamma);
  });
  out.planes = zs.size();
  for (const auto& w : ws) {
    if (w.found) {
      ++out.found;
      out.min_margin = std::min(out.min_margin, w.margin);
      out.worst_midpoint_error = std::max(
          {out.worst_midpoint_error, std::abs(w.midpoint_norm - 1.0), std::abs(w.u_norm - 1.0),
           std::abs(w.v_norm - 1.0)});
    } else {
      out.shortfall_margins.push_back(w.margin);
    }
  }
  return out;
}

struct ComponentBoundReport {
  double omega1 = 0.0;
  double omega2 = 0.0;
  int clause = 0;  // 1: near Y1, bounds ‖y2‖; 2: near Y2, bounds ‖y1‖
  std::size_t samples = 0;
  double worst = 0.0;  // max ‖y_other‖_2 / ‖y‖_X
  double slack = 0.0;  // gamma - worst
  std::optional<Vec4> counterexample;
  bool ok() const { return !counterexample; }
};

inline ComponentBoundReport component_bound_check(const CapSpace4& c, const Subspace& z, double gamma,
                                                  std::size_t samples = 10000) {
  const Frame4 f = frame_of(z);
  ComponentBoundReport r;
  r.omega1 = spherical_opening(z, y1_plane());
  r.omega2 = spherical_opening(z, y2_plane());
  if (r.omega1 <= gamma) r.clause = 1;
  else if (r.omega2 <= gamma) r.clause = 2;
  else throw InvalidArgument("component bound needs Omega(Z, Y1) or Omega(Z, Y2) <= gamma");
  r.samples = samples;
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(samples);
    const Vec4 y = std::cos(t) * f.col(0) + std::sin(t) * f.col(1);
    const double other = r.clause == 1 ? std::hypot(y[2], y[3]) : std::hypot(y[0], y[1]);
    const double q = other / c(y);
    r.worst = std::max(r.worst, q);
    if (q > gamma * (1.0 + 1e-12) && !r.counterexample) r.counterexample = y;
  }
  r.slack = gamma - r.worst;
  return r;
}

enum class Color { Blue, Yellow, Neither };
enum class Quadrature { Left, Midpoint };

inline const char* color_name(Color c) {
  return c == Color::Blue ? "blue" : c == Color::Yellow ? "yellow" : "neither";
}

struct ColorOptions {
  double gamma = std::numeric_limits<double>::quiet_NaN();  // default 2 delta
  std::size_t samples = 1000;
  double fd_step = 1e-5;  // relative to the segment length
  Quadrature rule = Quadrature::Midpoint;
  double window = 0.5;  // sliding window for F, as a fraction of the segment
};

struct ColoringProfile {
  double gamma = 0.0;
  double length = 0.0;
  std::vector<double> params;  // arc length of each sample
  std::vector<Color> colors;
  std::vector<double> omega1, omega2;
  std::vector<std::size_t> flagged;  // non-finite or rank-deficient Jacobians
  double blue = 0.0, yellow = 0.0, neither = 0.0;  // measure fractions
  double ftc_residual = 0.0;  // ‖(T(b)-T(a)) - sum DT u ds‖_2
  double chord_ratio = 0.0;   // ‖T(b)-T(a)‖_X / ‖b-a‖
  std::vector<double> F;      // integral of c(s) over sliding windows
  std::optional<double> zero_crossing;
};

using PlaneMap = std::function<Vec(const Vec&)>;

inline ColoringProfile color_segment(const PlaneMap& t, const Vec& a, const Vec& b, const CapSpace4& c,
                                     ColorOptions opt = {}) {
  require(a.size() == 2 && b.size() == 2, "segment endpoints must be in R^2");
  require(opt.samples >= 2, "coloring needs >= 2 samples");
  ColoringProfile out;
  out.gamma = std::isnan(opt.gamma) ? 2.0 * c.delta() : opt.gamma;
  const Vec dir = b - a;
  out.length = dir.norm();
  require(out.length > 0.0, "segment must have positive length");
  const Vec u = dir / out.length;
  const double hstep = opt.fd_step * out.length, ds = out.length / static_cast<double>(opt.samples);
  const Subspace y1 = y1_plane(), y2 = y2_plane();
  const std::size_t n = opt.samples;
  out.params.resize(n);
  out.colors.assign(n, Color::Neither);
  out.omega1.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.omega2 = out.omega1;
  Vec sum = Vec::Zero(4);
  std::size_t nb = 0, ny = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double s = (static_cast<double>(j) + (opt.rule == Quadrature::Midpoint ? 0.5 : 0.0)) * ds;
    out.params[j] = s;
    const Vec p = a + s * u;
    Eigen::MatrixXd jac(4, 2);
    for (int k = 0; k < 2; ++k) {
      Vec e = Vec::Zero(2);
      e[k] = hstep;
      const Vec fp = t(Vec(p + e)), fm = t(Vec(p - e));
      require(fp.size() == 4 && fm.size() == 4, "map must land in R^4");
      jac.col(k) = (fp - fm) / (2.0 * hstep);
    }
    if (!jac.allFinite()) {
      out.flagged.push_back(j);
      continue;
    }
    sum += jac * u * ds;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto sv = svd.singularValues();
    if (!(sv[1] > 1e-8 * sv[0])) {
      out.flagged.push_back(j);
      continue;
    }
    const Subspace plane = Subspace::span(jac);
    out.omega1[j] = spherical_opening(plane, y1);
    out.omega2[j] = spherical_opening(plane, y2);
    if (out.omega1[j] < out.gamma) out.colors[j] = Color::Blue, ++nb;
    else if (out.omega2[j] < out.gamma) out.colors[j] = Color::Yellow, ++ny;
  }
  const double dn = static_cast<double>(n);
  out.blue = static_cast<double>(nb) / dn;
  out.yellow = static_cast<double>(ny) / dn;
  out.neither = 1.0 - out.blue - out.yellow;
  const Vec ta = t(a), tb = t(b);
  out.ftc_residual = norm2(Vec((tb - ta) - sum));
  out.chord_ratio = c(Vec(tb - ta)) / out.length;
  // F over windows of m samples: blue counts -1, yellow +1.
  const std::size_t m = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::round(opt.window * dn)), 1, n);
  double acc = 0.0;
  auto val = [&](std::size_t j) {
    return out.colors[j] == Color::Blue ? -1.0 : out.colors[j] == Color::Yellow ? 1.0 : 0.0;
  };
  for (std::size_t j = 0; j < m; ++j) acc += val(j);
  out.F.push_back(acc * ds);
  for (std::size_t j = m; j < n; ++j) {
    acc += val(j) - val(j - m);
    out.F.push_back(acc * ds);
  }
  for (std::size_t j = 0; j + 1 < out.F.size(); ++j) {
    const double f0 = out.F[j], f1 = out.F[j + 1];
    if (f0 == 0.0) {
      out.zero_crossing = static_cast<double>(j) * ds;
      break;
    }
    if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      out.zero_crossing = (static_cast<double>(j) + f0 / (f0 - f1)) * ds;
      break;
    }
  }
  if (!out.zero_crossing && !out.F.empty() && out.F.back() == 0.0)
    out.zero_crossing = static_cast<double>(out.F.size() - 1) * ds;
  return out;
}

struct PreconditionReport {
  double gamma = 0.0, eps = 0.0, delta = 0.0;
  double gamma_cap = 0.0;   // 2^(1/6) - 1
  bool gamma_ok = false;    // 2^(1/6) - 1 > gamma > 0
  bool eps_ok = false;      // 0 < eps < gamma; eps(gamma) itself is not computable
  double lhs = 0.0;         // 1 - delta^2/2
  double cube_bound = 0.0;  // (1+gamma)^3 / sqrt 2
  bool delta_ok = false;    // lhs > cube_bound
  double bending_bound = 0.0;  // (1+gamma)(1+eps)^2 / sqrt 2
  bool bending_inequality = false;  // lhs <= bending_bound, forced by a bending
  bool chained_inequality = false;  // lhs < cube_bound
  bool contradiction() const { return gamma_ok && eps_ok && delta_ok && !bending_inequality; }
};

inline PreconditionReport precondition_chain(double gamma, double eps, double delta) {
  PreconditionReport r;
  r.gamma = gamma, r.eps = eps, r.delta = delta;
  r.gamma_cap = std::pow(2.0, 1.0 / 6.0) - 1.0;
  r.gamma_ok = gamma > 0.0 && gamma < r.gamma_cap;
  r.eps_ok = eps > 0.0 && eps < gamma;
  r.lhs = cap_height(delta);
  r.cube_bound = std::pow(1.0 + gamma, 3) / std::sqrt(2.0);
  r.delta_ok = r.lhs > r.cube_bound;
  r.bending_bound = (1.0 + gamma) * (1.0 + eps) * (1.0 + eps) / std::sqrt(2.0);
  r.bending_inequality = r.lhs <= r.bending_bound;
  r.chained_inequality = r.lhs < r.cube_bound;
  return r;
}

}  // namespace spiralbend
