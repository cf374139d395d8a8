#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "thresh/grid.hpp"
#include "thresh/random.hpp"

namespace thresh {

/// Ordered list of sample points, stored column-wise (dim x count).
template <typename Scalar>
class PointCloud {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PointCloud() = default;
  explicit PointCloud(Matrix points) : points_(std::move(points)) {
    if (points_.rows() != 2 && points_.rows() != 3) {
      throw std::invalid_argument("point cloud dimension must be 2 or 3");
    }
    if (points_.cols() == 0) throw std::invalid_argument("point cloud is empty");
  }

  int dim() const { return static_cast<int>(points_.rows()); }
  Eigen::Index size() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  auto point(Eigen::Index i) const { return points_.col(i); }

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
           a.points_ == b.points_;
  }

 private:
  Matrix points_;
};

/// Throws unless every point lies strictly inside (-extent, extent)^dim.
template <typename Scalar>
void require_inside(const PointCloud<Scalar>& cloud, const Grid<Scalar>& grid) {
  if (cloud.dim() != grid.dim()) {
    throw std::invalid_argument("cloud dimension " + std::to_string(cloud.dim()) +
                                " does not match grid dimension " + std::to_string(grid.dim()));
  }
  const Scalar e = grid.extent();
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    if ((cloud.point(i).array().abs() >= e).any()) {
      throw std::invalid_argument("cloud point " + std::to_string(i) +
                                  " lies outside the computational domain");
    }
  }
}

enum class PolarShape { five_fold, three_fold, m_fold };

/// Star-shaped closed curve r(theta) sampled at uniform angles.
struct PolarCloudSpec {
  int n_points = 200;
  PolarShape shape = PolarShape::five_fold;
  int m = 5;                 // lobe count for m_fold
  double amplitude = 0.5;    // 0.5 for five/three-fold, 0.4 for m-fold
  double phase = std::numbers::pi / 2;

  static PolarCloudSpec five_fold(int n = 200) { return {n, PolarShape::five_fold, 5, 0.5, std::numbers::pi / 2}; }
  static PolarCloudSpec three_fold(int n = 100) { return {n, PolarShape::three_fold, 3, 0.5, std::numbers::pi / 2}; }
  static PolarCloudSpec m_fold(int m, int n = 200) { return {n, PolarShape::m_fold, m, 0.4, 0.0}; }

  void validate() const {
    if (n_points < 3) throw std::invalid_argument("polar cloud needs at least 3 points");
    if (!(amplitude >= 0.0 && amplitude < 1.0)) {
      throw std::invalid_argument("polar amplitude must lie in [0, 1) so the radius stays positive");
    }
    if (shape == PolarShape::m_fold && m < 1) throw std::invalid_argument("m-fold needs m >= 1");
  }

  /// Radius of the reference curve at angle theta.
  double radius(double theta) const {
    switch (shape) {
      case PolarShape::five_fold: return 1.0 + amplitude * std::cos(5.0 * (theta - phase));
      case PolarShape::three_fold: return 1.0 + amplitude * std::cos(3.0 * (theta - phase));
      case PolarShape::m_fold: return 1.0 + amplitude * std::sin(m * theta);
    }
    return 1.0;
  }

  std::string name() const {
    switch (shape) {
      case PolarShape::five_fold: return "five-fold";
      case PolarShape::three_fold: return "three-fold";
      case PolarShape::m_fold: return "m-fold(m=" + std::to_string(m) + ")";
    }
    return "polar";
  }
};

/// theta_i = 2 pi i / N for i = 0..N-1; the endpoint 2 pi is excluded.
template <typename Scalar = double>
PointCloud<Scalar> gen_polar_cloud(const PolarCloudSpec& spec) {
  spec.validate();
  typename PointCloud<Scalar>::Matrix pts(2, spec.n_points);
  for (int i = 0; i < spec.n_points; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / spec.n_points;
    const double r = spec.radius(theta);
    pts(0, i) = static_cast<Scalar>(r * std::cos(theta));
    pts(1, i) = static_cast<Scalar>(r * std::sin(theta));
  }
  return PointCloud<Scalar>(std::move(pts));
}

struct TorusCloudSpec {
  int n_points = 2000;
  double major_radius = 1.0;
  double minor_radius = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_points < 4) throw std::invalid_argument("torus cloud needs at least 4 points");
  }
};

template <typename Scalar = double>
Point<Scalar> torus_point(const TorusCloudSpec& spec, double u, double v) {
  Point<Scalar> p(3);
  const double ring = spec.major_radius + spec.minor_radius * std::cos(u);
  p << static_cast<Scalar>(ring * std::cos(v)), static_cast<Scalar>(ring * std::sin(v)),
      static_cast<Scalar>(spec.minor_radius * std::sin(u));
  return p;
}

/// Torus points from (u, v) drawn uniformly on [0, 2 pi)^2.
template <typename Scalar = double>
PointCloud<Scalar> gen_torus_cloud(const TorusCloudSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  typename PointCloud<Scalar>::Matrix pts(3, spec.n_points);
  for (int i = 0; i < spec.n_points; ++i) {
    const double u = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double v = rng.uniform(0.0, 2.0 * std::numbers::pi);
    pts.col(i) = torus_point<Scalar>(spec, u, v);
  }
  return PointCloud<Scalar>(std::move(pts));
}

/// x + mu * nu with nu i.i.d. standard normal per coordinate.
template <typename Scalar>
PointCloud<Scalar> add_noise(const PointCloud<Scalar>& cloud, double mu, std::uint64_t seed) {
  if (!(mu >= 0.0)) throw std::invalid_argument("noise intensity must be non-negative");
  if (mu == 0.0) return cloud;
  Rng rng(seed);
  auto pts = cloud.points();
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    for (Eigen::Index a = 0; a < pts.rows(); ++a) pts(a, j) += static_cast<Scalar>(mu * rng.normal());
  }
  return PointCloud<Scalar>(std::move(pts));
}

}  // namespace thresh
