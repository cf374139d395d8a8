#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "thresh/cloud.hpp"
#include "thresh/grid.hpp"
#include "thresh/parallel.hpp"

namespace thresh {

/// Exact unsigned distance from x to the nearest cloud point (Euclidean, not periodic).
template <typename Scalar, typename Derived>
Scalar distance_to_cloud(const PointCloud<Scalar>& cloud, const Eigen::MatrixBase<Derived>& x) {
  return std::sqrt((cloud.points().colwise() - x).colwise().squaredNorm().minCoeff());
}

/// Brute-force distance field: every node against every cloud point.
template <typename Scalar>
ScalarField<Scalar> distance_brute(const PointCloud<Scalar>& cloud, const Grid<Scalar>& grid) {
  require_inside(cloud, grid);
  ScalarField<Scalar> d(grid);
  parallel_for(0, grid.size(), [&](Eigen::Index i) { d[i] = distance_to_cloud(cloud, grid.node(i)); },
               256);
  return d;
}

struct SweepConfig {
  /// Stop once a full sweep changes no node by more than this. Non-positive
  /// means 1e-6 * h.
  double tolerance = 0.0;
  int max_rounds = 500;
  /// Chebyshev radius, in cells, of the exactly initialised source band.
  int freeze_radius = 2;

  void validate() const {
    if (max_rounds < 1) throw std::invalid_argument("sweep max_rounds must be >= 1");
    if (freeze_radius < 1) throw std::invalid_argument("sweep freeze_radius must be >= 1");
  }
};

struct SweepStats {
  int rounds = 0;
  int sweeps = 0;
  double residual = 0.0;
  Eigen::Index frozen_nodes = 0;
  bool converged = false;
};

class SweepDidNotConverge : public std::runtime_error {
 public:
  SweepDidNotConverge(int rounds, double residual)
      : std::runtime_error("fast sweeping did not converge after " + std::to_string(rounds) +
                           " rounds (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

namespace detail {

/// Nodes within `radius` cells (Chebyshev) of any cloud point.
template <typename Scalar>
std::vector<std::uint8_t> source_mask(const PointCloud<Scalar>& cloud, const Grid<Scalar>& grid,
                                      int radius) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid.size()), 0);
  const int dim = grid.dim();
  const int n = grid.cells_per_axis();
  const Scalar h = grid.spacing();
  const Scalar reach = Scalar(radius) * h * (Scalar(1) + Scalar(1e-12));
  for (Eigen::Index j = 0; j < cloud.size(); ++j) {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const Scalar x = cloud.points()(a, j);
      lo[a] = std::max(0, static_cast<int>(std::ceil((x - reach + grid.extent()) / h)));
      hi[a] = std::min(n - 1, static_cast<int>(std::floor((x + reach + grid.extent()) / h)));
    }
    if (dim == 2) {
      for (int i0 = lo[0]; i0 <= hi[0]; ++i0)
        for (int i1 = lo[1]; i1 <= hi[1]; ++i1) mask[static_cast<std::size_t>(grid.flat({i0, i1, 0}))] = 1;
    } else {
      for (int i0 = lo[0]; i0 <= hi[0]; ++i0)
        for (int i1 = lo[1]; i1 <= hi[1]; ++i1)
          for (int i2 = lo[2]; i2 <= hi[2]; ++i2)
            mask[static_cast<std::size_t>(grid.flat({i0, i1, i2}))] = 1;
    }
  }
  return mask;
}

}  // namespace detail

/// Distance field by Lax-Friedrichs fast sweeping on |grad d| = 1.
///
/// Each free node is relaxed with
///   d <- ( h (1 - |grad d|) + sum_axes (d_+ + d_-) / 2 ) / dim,
/// grad d by central differences, which is the unit-viscosity LF update and
/// reduces to the familiar 2D form for h = 1. Sweeps alternate over all 2^dim
/// orderings. Nodes within freeze_radius cells of a cloud point hold exact
/// distances and are never updated; the outer face uses linear extrapolation
/// (the distance is not periodic even though the grid is).
template <typename Scalar>
ScalarField<Scalar> distance_sweep(const PointCloud<Scalar>& cloud, const Grid<Scalar>& grid,
                                   const SweepConfig& cfg, SweepStats* stats = nullptr) {
  cfg.validate();
  require_inside(cloud, grid);
  const int dim = grid.dim();
  const int n = grid.cells_per_axis();
  const Scalar h = grid.spacing();
  const Scalar tol = cfg.tolerance > 0 ? Scalar(cfg.tolerance) : Scalar(1e-6) * h;

  const auto frozen = detail::source_mask(cloud, grid, cfg.freeze_radius);
  const Scalar far = Scalar(2) * grid.extent() * std::sqrt(Scalar(dim));
  ScalarField<Scalar> d(grid, far);
  SweepStats st;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (frozen[static_cast<std::size_t>(i)]) {
      d[i] = distance_to_cloud(cloud, grid.node(i));
      ++st.frozen_nodes;
    }
  }

  std::array<Eigen::Index, 3> stride{};
  for (int a = 0; a < dim; ++a) stride[a] = grid.stride(a);
  auto& v = d.values();

  auto relax = [&](const MultiIndex& idx) -> Scalar {
    const Eigen::Index f = grid.flat(idx);
    if (frozen[static_cast<std::size_t>(f)]) return Scalar(0);
    Scalar grad2 = 0;
    Scalar avg = 0;
    for (int a = 0; a < dim; ++a) {
      const Scalar c = v[f];
      Scalar minus = idx[a] > 0 ? v[f - stride[a]] : Scalar(0);
      Scalar plus = idx[a] < n - 1 ? v[f + stride[a]] : Scalar(0);
      if (idx[a] == 0) minus = Scalar(2) * c - plus;
      if (idx[a] == n - 1) plus = Scalar(2) * c - minus;
      const Scalar g = (plus - minus) / (Scalar(2) * h);
      grad2 += g * g;
      avg += (plus + minus) / Scalar(2);
    }
    Scalar cand = (h * (Scalar(1) - std::sqrt(grad2)) + avg) / Scalar(dim);
    cand = std::max(Scalar(0), std::min(cand, v[f]));
    const Scalar change = v[f] - cand;
    v[f] = cand;
    return change;
  };

  const int orderings = 1 << dim;
  bool done = false;
  Scalar residual = std::numeric_limits<Scalar>::infinity();
  for (int round = 0; round < cfg.max_rounds && !done; ++round) {
    ++st.rounds;
    for (int o = 0; o < orderings && !done; ++o) {
      Scalar sweep_change = 0;
      std::array<int, 3> start{}, step{};
      for (int a = 0; a < dim; ++a) {
        const bool rev = (o >> a) & 1;
        start[a] = rev ? n - 1 : 0;
        step[a] = rev ? -1 : 1;
      }
      MultiIndex idx{0, 0, 0};
      if (dim == 2) {
        for (int s0 = 0; s0 < n; ++s0) {
          idx[0] = start[0] + step[0] * s0;
          for (int s1 = 0; s1 < n; ++s1) {
            idx[1] = start[1] + step[1] * s1;
            sweep_change = std::max(sweep_change, relax(idx));
          }
        }
      } else {
        for (int s0 = 0; s0 < n; ++s0) {
          idx[0] = start[0] + step[0] * s0;
          for (int s1 = 0; s1 < n; ++s1) {
            idx[1] = start[1] + step[1] * s1;
            for (int s2 = 0; s2 < n; ++s2) {
              idx[2] = start[2] + step[2] * s2;
              sweep_change = std::max(sweep_change, relax(idx));
            }
          }
        }
      }
      ++st.sweeps;
      residual = sweep_change;
      if (sweep_change < tol) done = true;
    }
  }
  st.residual = static_cast<double>(residual);
  st.converged = done;
  if (stats) *stats = st;
  if (!done) throw SweepDidNotConverge(st.rounds, st.residual);
  return d;
}

enum class DistanceBackend { brute, sweep };

/// Brute force when points x nodes <= 2e9, fast sweeping otherwise.
template <typename Scalar>
DistanceBackend default_backend(const PointCloud<Scalar>& cloud, const Grid<Scalar>& grid) {
  return static_cast<double>(cloud.size()) * static_cast<double>(grid.size()) <= 2e9
             ? DistanceBackend::brute
             : DistanceBackend::sweep;
}

enum class WeightMode { full, half };

/// d^p (full) or d^(p/2) (half).
template <typename Scalar>
ScalarField<Scalar> weight_field(const ScalarField<Scalar>& d, Scalar p, WeightMode mode) {
  if (!(p > Scalar(0))) throw std::invalid_argument("weight exponent p must be positive");
  if ((d.values() < Scalar(0)).any()) throw std::invalid_argument("distance field has negative values");
  const Scalar e = mode == WeightMode::full ? p : p / Scalar(2);
  if (e == Scalar(1)) return d;
  if (e == Scalar(2)) return ScalarField<Scalar>(d.grid(), d.values().square());
  return ScalarField<Scalar>(d.grid(), d.values().pow(e));
}

}  // namespace thresh
