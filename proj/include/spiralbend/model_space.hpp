#pragma once

#include "spiralbend/common.hpp"
#include "spiralbend/norms2d.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace spiralbend {

using VecNorm = std::function<double(const Vec&)>;

inline VecNorm euclidean() {
  return [](const Vec& v) { return norm2(v); };
}

// Y_left (+)_Z Y_right: ||(u,v)|| = Z(||u||_left, ||v||_right).
struct DirectSum {
  std::size_t left_dim = 0;
  std::size_t right_dim = 0;
  UncondNorm2 z = UncondNorm2::l2();
  VecNorm left = euclidean();
  VecNorm right = euclidean();

  static DirectSum euclidean_blocks(std::size_t n1, std::size_t n2, UncondNorm2 z) {
    return DirectSum{n1, n2, std::move(z), euclidean(), euclidean()};
  }

  double operator()(const Vec& u, const Vec& v) const {
    if (static_cast<std::size_t>(u.size()) != left_dim ||
        static_cast<std::size_t>(v.size()) != right_dim)
      throw InvalidArgument("direct sum: dimension mismatch");
    return z(left(u), right(v));
  }

  // Norm on the concatenation [u; v].
  double joint(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != left_dim + right_dim)
      throw InvalidArgument("direct sum: dimension mismatch");
    return (*this)(x.head(left_dim), x.tail(right_dim));
  }
};

inline double direct_sum_norm(const DirectSum& d, const Vec& u, const Vec& v) { return d(u, v); }

// Blocks x_1 ... x_{2I} of equal dimension n. Pair i joins blocks (2i-1, 2i)
// through Z_i; pairs are joined by an outer l2 sum. Blocks are stored
// contiguously, block j (1-based) at offset (j-1)*n.
class ModelSpace {
 public:
  ModelSpace(std::size_t block_dim, std::vector<UncondNorm2> combiners)
      : n_(block_dim), z_(std::move(combiners)) {
    require(n_ >= 1, "model space needs block dimension >= 1");
    require(!z_.empty(), "model space needs at least one pair");
  }

  std::size_t block_dim() const { return n_; }
  std::size_t pairs() const { return z_.size(); }
  std::size_t blocks() const { return 2 * z_.size(); }
  std::size_t dim() const { return blocks() * n_; }
  const UncondNorm2& combiner(std::size_t pair) const { return z_.at(pair - 1); }

  auto block(Vec& x, std::size_t j) const { return x.segment((j - 1) * n_, n_); }
  auto block(const Vec& x, std::size_t j) const { return x.segment((j - 1) * n_, n_); }

  double norm(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != dim())
      throw InvalidArgument("model norm: shape mismatch");
    std::vector<double> terms(pairs());
    double m = 0.0;
    for (std::size_t i = 1; i <= pairs(); ++i) {
      terms[i - 1] = z_[i - 1](norm2(block(x, 2 * i - 1)), norm2(block(x, 2 * i)));
      m = std::max(m, terms[i - 1]);
    }
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double t : terms) s += (t / m) * (t / m);
    return m * std::sqrt(s);
  }

 private:
  std::size_t n_;
  std::vector<UncondNorm2> z_;
};

inline double model_norm(const ModelSpace& m, const Vec& x) { return m.norm(x); }

// max{ ||x1||~, ||x2||~, ||x1 + x2|| }.
inline double max_renorm(const Vec& x1, const Vec& x2, const VecNorm& ambient,
                         const VecNorm& tilde1, const VecNorm& tilde2) {
  require(x1.size() == x2.size(), "max_renorm: dimension mismatch");
  return std::max({tilde1(x1), tilde2(x2), ambient(x1 + x2)});
}

// Subspace given by an orthonormal frame.
class Subspace {
 public:
  explicit Subspace(Eigen::MatrixXd frame) : frame_(std::move(frame)) {
    require(frame_.cols() >= 1, "subspace must be at least one-dimensional");
    require(frame_.cols() <= frame_.rows(), "subspace dimension exceeds ambient");
    const double err =
        (frame_.transpose() * frame_ - Eigen::MatrixXd::Identity(frame_.cols(), frame_.cols()))
            .cwiseAbs()
            .maxCoeff();
    require(err <= 1e-12, "subspace frame is not orthonormal");
  }

  // Orthonormalizes the columns of an arbitrary full-rank basis.
  static Subspace span(const Eigen::MatrixXd& basis) {
    require(basis.cols() >= 1, "subspace must be at least one-dimensional");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
    Eigen::MatrixXd r = qr.matrixQR().topRows(basis.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      require(std::abs(r(j, j)) > 1e-12 * basis.norm(), "subspace basis is rank deficient");
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    // One re-orthogonalization pass keeps the frame orthonormal to 1e-15.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr2(q);
    Eigen::MatrixXd q2 = qr2.householderQ() * Eigen::MatrixXd::Identity(q.rows(), q.cols());
    for (Eigen::Index j = 0; j < q.cols(); ++j)
      if (q2.col(j).dot(q.col(j)) < 0) q2.col(j) = -q2.col(j);
    return Subspace(std::move(q2));
  }

  // span(e_i, e_j, ...) in R^n, 0-based coordinate indices.
  static Subspace coordinate(std::size_t n, std::initializer_list<std::size_t> axes) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(axes.size()));
    Eigen::Index c = 0;
    for (std::size_t a : axes) f(static_cast<Eigen::Index>(a), c++) = 1.0;
    return Subspace(std::move(f));
  }

  const Eigen::MatrixXd& frame() const { return frame_; }
  std::size_t dim() const { return static_cast<std::size_t>(frame_.cols()); }
  std::size_t ambient() const { return static_cast<std::size_t>(frame_.rows()); }
  Vec point(const Vec& coeffs) const { return frame_ * coeffs; }

 private:
  Eigen::MatrixXd frame_;
};

// Largest principal angle, from the smallest cosine and largest sine so the
// result stays accurate near 0 and near pi/2.
inline double max_principal_angle(const Subspace& u, const Subspace& w) {
  require(u.ambient() == w.ambient(), "subspaces live in different ambients");
  require(u.dim() == w.dim(), "subspaces must have equal dimension");
  const Eigen::MatrixXd m = u.frame().transpose() * w.frame();
  const Eigen::MatrixXd resid = w.frame() - u.frame() * m;
  Eigen::JacobiSVD<Eigen::MatrixXd> s1(m), s2(resid);
  const double cmin = std::clamp(s1.singularValues().minCoeff(), 0.0, 1.0);
  const double smax = std::clamp(s2.singularValues().maxCoeff(), 0.0, 1.0);
  return std::atan2(smax, cmin);
}

// Omega(U, W): Hausdorff distance between the unit spheres, 2 sin(theta_max/2).
inline double spherical_opening(const Subspace& u, const Subspace& w) {
  return 2.0 * std::sin(0.5 * max_principal_angle(u, w));
}

// Brute-force Omega for 1- or 2-dimensional subspaces by scanning both unit
// circles; accurate to about twice the angular step.
inline double spherical_opening_grid(const Subspace& u, const Subspace& w, std::size_t steps) {
  require(u.dim() == w.dim() && u.dim() <= 2, "grid opening supports dims 1 and 2");
  require(steps >= 4, "grid opening needs >= 4 steps");
  auto circle = [&](const Subspace& s) {
    std::vector<Vec> pts;
    if (s.dim() == 1) {
      pts.push_back(s.frame().col(0));
      pts.push_back(-s.frame().col(0));
      return pts;
    }
    for (std::size_t j = 0; j < steps; ++j) {
      const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(steps);
      pts.push_back(std::cos(t) * s.frame().col(0) + std::sin(t) * s.frame().col(1));
    }
    return pts;
  };
  const auto a = circle(u), b = circle(w);
  auto one_sided = [](const std::vector<Vec>& p, const std::vector<Vec>& q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = kInf;
      for (const auto& y : q) best = std::min(best, (x - y).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace spiralbend
