#pragma once

#include "spiralbend/bending.hpp"
#include "spiralbend/common.hpp"
#include "spiralbend/harness.hpp"
#include "spiralbend/model_space.hpp"

#include <optional>
#include <vector>

namespace spiralbend {

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double quotient() const { return upper / lower; }
};

// Lower/upper ratio brackets for pairs within an odd chart, within an even
// chart, and in far-apart annuli; overall = max upper / min lower.
struct CaseBounds {
  Bracket same_odd;
  Bracket same_even;
  Bracket far_apart;
  double overall = 0.0;
  double max_case_quotient = 0.0;
};

inline CaseBounds case_bounds(double psi, double gamma, double zeta, double d, double eps) {
  if (!(psi > 0.0 && psi < 1.0)) throw InvalidParameter("psi must lie in (0,1)");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidParameter("gamma must lie in [0,1)");
  if (!(zeta >= 0.0 && zeta < 1.0)) throw InvalidParameter("zeta must lie in [0,1)");
  if (!(d >= 1.0)) throw InvalidParameter("d must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("eps must lie in (0,1)");
  const double e = eps / d;
  const double g2 = (1.0 + gamma) * (1.0 + gamma);
  CaseBounds b;
  b.same_odd = {(1.0 - psi) / ((1.0 + zeta) * g2), 1.0 + psi};
  b.same_even = {(1.0 - psi) / (1.0 + gamma), 1.0 + psi};
  b.far_apart = {(1.0 / (1.0 + e)) * (1.0 / ((1.0 + zeta) * g2) - e), (1.0 + e) / (1.0 - e)};
  for (const Bracket* k : {&b.same_odd, &b.same_even, &b.far_apart})
    if (!(k->lower > 0.0)) throw InvalidParameter("nonpositive lower distortion bound");
  b.overall = std::max({b.same_odd.upper, b.same_even.upper, b.far_apart.upper}) /
              std::min({b.same_odd.lower, b.same_even.lower, b.far_apart.lower});
  b.max_case_quotient =
      std::max({b.same_odd.quotient(), b.same_even.quotient(), b.far_apart.quotient()});
  return b;
}

struct ParamSet {
  double eps = 0.0;
  double gamma = 0.0;
  double psi = 0.0;
  double zeta = 0.0;
  int d = 1;
  std::vector<double> gamma_seq;  // gamma_i = gamma / 2^(i+1), i = 1..64
  double gamma_product = 1.0;
  CaseBounds bounds;
};

// psi: largest value whose same-chart quotient fits in sqrt(1+eps); d: the
// smallest integer that then brings the overall quotient under 1+eps.
inline ParamSet choose_parameters(double eps, double gamma = 0.0, double zeta = 0.0) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
  if (!(gamma >= 0.0 && gamma < 1.0) || !(zeta >= 0.0 && zeta < 1.0))
    throw InvalidArgument("gamma and zeta must lie in [0,1)");
  const double slack = (1.0 + zeta) * (1.0 + gamma) * (1.0 + gamma);
  const double budget = std::sqrt(1.0 + eps);
  if (!(slack < budget)) throw InvalidParameter("gamma and zeta leave no room for eps");
  auto same_chart = [&](double psi) { return (1.0 + psi) * slack / (1.0 - psi); };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (same_chart(mid) <= budget ? lo : hi) = mid;
  }
  ParamSet out;
  out.eps = eps;
  out.gamma = gamma;
  out.zeta = zeta;
  out.psi = lo;
  auto fits = [&](long d) {
    try {
      return case_bounds(out.psi, gamma, zeta, static_cast<double>(d), eps).overall <= 1.0 + eps;
    } catch (const InvalidParameter&) {
      return false;
    }
  };
  long dhi = 1;
  while (!fits(dhi)) dhi *= 2;
  long dlo = dhi / 2;  // fails, or 0
  while (dhi - dlo > 1) {
    const long mid = (dlo + dhi) / 2;
    (fits(mid) ? dhi : dlo) = mid;
  }
  out.d = static_cast<int>(dhi);
  out.bounds = case_bounds(out.psi, gamma, zeta, out.d, eps);
  for (int i = 1; i <= 64; ++i) {
    out.gamma_seq.push_back(gamma / std::ldexp(1.0, i + 1));
    out.gamma_product *= 1.0 + out.gamma_seq.back();
  }
  return out;
}

// R_1 = 1; ln(R_2i / R_2i-1) = c pi / (2 psi); R_2i+1 / R_2i = d / eps.
class RadiusSchedule {
 public:
  RadiusSchedule(double psi, double eps, double d, std::size_t m, double c = 4.0)
      : psi_(psi), eps_(eps), d_(d), c_(c) {
    if (!(psi > 0.0 && psi < 1.0)) throw InvalidArgument("psi must lie in (0,1)");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
    if (!(d >= 1.0)) throw InvalidArgument("d must be >= 1");
    if (m < 2) throw InvalidArgument("schedule needs at least 2 radii");
    check_curve_constant(c);
    logs_.push_back(0.0);
    extend_to(m);
  }

  double psi() const { return psi_; }
  double eps() const { return eps_; }
  double d() const { return d_; }
  double c() const { return c_; }
  std::size_t size() const { return logs_.size(); }
  double bend_log_ratio() const { return c_ * kPi / (2.0 * psi_); }
  double gap_log_ratio() const { return std::log(d_ / eps_); }

  // 1-based; index 0 is the degenerate radius 0.
  Radius operator[](std::size_t j) const {
    if (j == 0) return {0.0, -kInf};
    if (j > logs_.size()) throw ScheduleTooShort(j);
    const double lg = logs_[j - 1] + shift_;
    return {j == 1 && shift_ == 0.0 ? 1.0 : std::exp(lg), lg};
  }

  void extend_to(std::size_t m) {
    while (logs_.size() < m) {
      const std::size_t next = logs_.size() + 1;
      logs_.push_back(logs_.back() + (next % 2 == 0 ? bend_log_ratio() : gap_log_ratio()));
    }
  }

  // Same schedule with every radius multiplied by lambda.
  RadiusSchedule scaled(double lambda) const {
    require(lambda > 0.0, "scale must be positive");
    RadiusSchedule s = *this;
    s.shift_ += std::log(lambda);
    return s;
  }

 private:
  double psi_, eps_, d_, c_;
  double shift_ = 0.0;
  std::vector<double> logs_;  // ln R_1 ... ln R_m without shift
};

inline RadiusSchedule build_schedule(double psi, double eps, double d, std::size_t m,
                                     double c = 4.0) {
  return RadiusSchedule(psi, eps, d, m, c);
}

namespace detail {

inline bool radius_le(double t, const Radius& rad) {
  if (std::isinf(rad.log_value) && rad.log_value < 0) return t <= 0.0;
  return at_most(t, std::log(t), rad);
}

inline bool radius_lt(double t, const Radius& rad) {
  if (std::isinf(rad.log_value) && rad.log_value < 0) return false;
  if (!rad.overflow() && std::isfinite(t)) return t < rad.value;
  return std::log(t) < rad.log_value;
}

}  // namespace detail

// Chart k covers the closed annulus R_{2k-2} <= |x| <= R_{2k+1} and bends
// between R_{2k-1} and R_{2k}; odd charts are the Z-pairs, even charts the
// l2 pairings between consecutive pairs.
inline std::vector<std::size_t> assign_radius(double t, const RadiusSchedule& s) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1;; ++k) {
    if (2 * k - 2 > s.size()) throw ScheduleTooShort(2 * k - 2);
    if (detail::radius_lt(t, s[2 * k - 2])) break;
    if (2 * k + 1 > s.size()) throw ScheduleTooShort(2 * k + 1);
    if (detail::radius_le(t, s[2 * k + 1])) out.push_back(k);
  }
  return out;
}

inline std::vector<std::size_t> assign_annuli(const Vec& x, const RadiusSchedule& s) {
  return assign_radius(norm2(x), s);
}

struct PointCloud {
  std::size_t dim = 0;
  std::vector<Vec> points;
  bool contains_origin = false;

  void validate() const {
    require(dim >= 1, "cloud dimension must be >= 1");
    require(!points.empty(), "cloud is empty");
    for (const auto& p : points) {
      require(static_cast<std::size_t>(p.size()) == dim, "cloud point has wrong dimension");
      require(p.allFinite(), "cloud point is not finite");
    }
    if (contains_origin) {
      bool found = false;
      for (const auto& p : points) found = found || (p.array() == 0.0).all();
      require(found, "cloud flagged as containing the origin but has no zero point");
    }
  }
};

struct EmbeddingReport {
  std::vector<std::vector<std::size_t>> charts;  // per point
  DistortionReport distortion;
  CaseBounds bounds;
  double bound = 0.0;  // overall quotient
  std::size_t overlap_points = 0;
  double overlap_max_diff = 0.0;
  bool overlap_consistent = true;
  double norm_defect = 0.0;
  std::optional<Vec> translation;
  std::size_t radii_used = 0;
  bool within_bound() const { return distortion.distortion <= bound; }
};

struct EmbedResult {
  ModelSpace space;
  std::vector<Vec> images;
  EmbeddingReport report;
  RadiusSchedule schedule;
};

struct EmbedOptions {
  PairOptions pairs;
  bool measure = true;
  unsigned threads = 0;
};

namespace detail {

inline Vec chart_image(const Vec& x, std::size_t k, const RadiusSchedule& s,
                       const std::vector<UncondNorm2>& zs, std::size_t blocks) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  const UncondNorm2 z = k % 2 == 1 ? zs[std::min((k + 1) / 2, zs.size()) - 1] : UncondNorm2::l2();
  BendingMap t(BendingParams::from_radii(s[2 * k - 1], s[2 * k], z, n, s.c()));
  auto [a, b] = t.apply(x);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(blocks * n));
  out.segment((k - 1) * n, n) = a;
  out.segment(k * n, n) = b;
  return out;
}

}  // namespace detail

// Maps every point through its chart bendings into the model space. Pair i
// uses zs[i-1], the last entry repeating.
inline EmbedResult embed_cloud(PointCloud cloud, RadiusSchedule s, const std::vector<UncondNorm2>& zs,
                               const EmbedOptions& opt = {}) {
  cloud.validate();
  require(!zs.empty(), "embed needs at least one combiner");
  EmbeddingReport rep;
  if (!cloud.contains_origin) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cloud.points.size(); ++i)
      if (norm2(cloud.points[i]) < norm2(cloud.points[best])) best = i;
    const Vec shift = cloud.points[best];
    for (auto& p : cloud.points) p -= shift;
    rep.translation = -shift;
  }
  double tmax = 0.0;
  for (const auto& p : cloud.points) tmax = std::max(tmax, norm2(p));
  for (;;) {
    try {
      assign_radius(tmax, s);
      break;
    } catch (const ScheduleTooShort& e) {
      s.extend_to(std::max(e.needed(), s.size() + 1));
    }
  }
  const std::size_t np = cloud.points.size();
  rep.charts.resize(np);
  std::size_t kmax = 1;
  for (std::size_t i = 0; i < np; ++i) {
    rep.charts[i] = assign_annuli(cloud.points[i], s);
    kmax = std::max(kmax, rep.charts[i].back());
  }
  const std::size_t pairs = (kmax + 2) / 2;
  std::vector<UncondNorm2> combiners;
  for (std::size_t i = 1; i <= pairs; ++i) combiners.push_back(zs[std::min(i, zs.size()) - 1]);
  ModelSpace space(cloud.dim, combiners);

  std::vector<Vec> images(np);
  std::vector<double> diffs(np, 0.0), defects(np, 0.0);
  parallel_chunks(np, opt.threads ? opt.threads : thread_count(),
                  [&](std::size_t b, std::size_t e, std::size_t) {
                    for (std::size_t i = b; i < e; ++i) {
                      const Vec& x = cloud.points[i];
                      images[i] = detail::chart_image(x, rep.charts[i][0], s, zs, space.blocks());
                      for (std::size_t j = 1; j < rep.charts[i].size(); ++j) {
                        const Vec other =
                            detail::chart_image(x, rep.charts[i][j], s, zs, space.blocks());
                        diffs[i] = std::max(diffs[i], (other - images[i]).cwiseAbs().maxCoeff());
                      }
                      const double nx = norm2(x);
                      defects[i] = nx == 0.0 ? space.norm(images[i])
                                             : std::abs(space.norm(images[i]) - nx) / nx;
                    }
                  });
  for (std::size_t i = 0; i < np; ++i) {
    if (rep.charts[i].size() > 1) ++rep.overlap_points;
    rep.norm_defect = std::max(rep.norm_defect, defects[i]);
    const double scale = std::max(norm2(cloud.points[i]), 1e-300);
    rep.overlap_max_diff = std::max(rep.overlap_max_diff, diffs[i] / scale);
  }
  rep.overlap_consistent = rep.overlap_max_diff <= 1e-12;
  if (!rep.overlap_consistent)
    throw ConsistencyError("chart images disagree on an overlap by " +
                           std::to_string(rep.overlap_max_diff));
  rep.bounds = case_bounds(s.psi(), 0.0, 0.0, s.d(), s.eps());
  rep.bound = rep.bounds.overall;
  rep.radii_used = s.size();
  if (opt.measure && np >= 2) {
    PairOptions po = opt.pairs;
    if (!po.threads) po.threads = opt.threads;
    rep.distortion = pairwise_distortion(cloud.points, images, euclidean(),
                                         [&space](const Vec& v) { return space.norm(v); }, po);
  }
  return EmbedResult{std::move(space), std::move(images), std::move(rep), std::move(s)};
}

}  // namespace spiralbend
