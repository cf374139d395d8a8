#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "thresh/grid.hpp"

namespace thresh {

/// Reusable workspace for heat-kernel convolution on a periodic grid.
///
/// The kernel is applied as the exact heat-semigroup multiplier
/// exp(-tau |k|^2) on the real-to-half-complex spectrum, so constants are
/// preserved exactly and repeated application composes. One plan per thread.
template <typename Scalar>
class SpectralPlan {
 public:
  using Complex = std::complex<Scalar>;
  using Array = typename ScalarField<Scalar>::Array;

  explicit SpectralPlan(const Grid<Scalar>& grid) : grid_(grid) {
    n_ = grid.cells_per_axis();
    half_ = n_ / 2 + 1;
    rows_ = grid.size() / n_;
    spectrum_.resize(static_cast<std::size_t>(rows_ * half_));
    line_in_.resize(static_cast<std::size_t>(n_));
    line_out_.resize(static_cast<std::size_t>(n_));
    multiplier_.resize(rows_ * half_);
    fft_.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
  }

  const Grid<Scalar>& grid() const { return grid_; }

  /// Angular wavenumber of spectral index j on an axis of the grid.
  Scalar wavenumber(int j) const {
    const int signed_j = j <= n_ / 2 ? j : j - n_;
    return Scalar(signed_j) * Scalar(std::numbers::pi) / grid_.extent();
  }

  /// exp(-tau |k|^2) per stored mode; recomputed only when tau changes.
  const Array& multiplier(Scalar tau) {
    if (tau != cached_tau_) {
      const int dim = grid_.dim();
      for (Eigen::Index r = 0; r < rows_; ++r) {
        Scalar k2_rows = 0;
        if (dim == 2) {
          k2_rows = sq(wavenumber(static_cast<int>(r)));
        } else {
          k2_rows = sq(wavenumber(static_cast<int>(r / n_))) + sq(wavenumber(static_cast<int>(r % n_)));
        }
        for (int j = 0; j < half_; ++j) {
          const Scalar kl = Scalar(j) * Scalar(std::numbers::pi) / grid_.extent();
          multiplier_[r * half_ + j] = std::exp(-tau * (k2_rows + kl * kl));
        }
      }
      cached_tau_ = tau;
    }
    return multiplier_;
  }

  /// G_tau * f on the grid. Counts as one convolution.
  Array convolve(const Array& f, Scalar tau) {
    if (!(tau > Scalar(0))) throw std::invalid_argument("heat convolution needs tau > 0");
    if (f.size() != grid_.size()) throw std::invalid_argument("heat convolution: grid mismatch");
    ++convolutions_;
    const Array& mult = multiplier(tau);

    for (Eigen::Index r = 0; r < rows_; ++r) fft_.fwd(row(r), f.data() + r * n_, n_);
    transform_leading_axes(true);
    for (Eigen::Index i = 0; i < rows_ * half_; ++i) spectrum_[static_cast<std::size_t>(i)] *= mult[i];
    transform_leading_axes(false);

    Array out(grid_.size());
    for (Eigen::Index r = 0; r < rows_; ++r) fft_.inv(out.data() + r * n_, row(r), n_);
    return out;
  }

  std::uint64_t convolution_count() const { return convolutions_; }
  void reset_convolution_count() { convolutions_ = 0; }

 private:
  static Scalar sq(Scalar x) { return x * x; }

  Complex* row(Eigen::Index r) { return spectrum_.data() + r * half_; }

  // Complex transforms along every axis but the last (which is the real one).
  void transform_leading_axes(bool forward) {
    const int dim = grid_.dim();
    for (int axis = 0; axis < dim - 1; ++axis) {
      // Spectrum layout: [i0][i1]...[k_last], with the last extent = half_.
      const Eigen::Index stride = axis == dim - 2 ? half_ : Eigen::Index(n_) * half_;
      const Eigen::Index outer = rows_ * half_ / (Eigen::Index(n_) * stride);
      for (Eigen::Index o = 0; o < outer; ++o) {
        for (Eigen::Index s = 0; s < stride; ++s) {
          const Eigen::Index base = o * Eigen::Index(n_) * stride + s;
          for (int j = 0; j < n_; ++j) line_in_[static_cast<std::size_t>(j)] = spectrum_[static_cast<std::size_t>(base + j * stride)];
          if (forward) {
            fft_.fwd(line_out_.data(), line_in_.data(), n_);
          } else {
            fft_.inv(line_out_.data(), line_in_.data(), n_);
          }
          for (int j = 0; j < n_; ++j) spectrum_[static_cast<std::size_t>(base + j * stride)] = line_out_[static_cast<std::size_t>(j)];
        }
      }
    }
  }

  Grid<Scalar> grid_;
  int n_ = 0;
  int half_ = 0;
  Eigen::Index rows_ = 0;
  Eigen::FFT<Scalar> fft_;
  std::vector<Complex> spectrum_;
  std::vector<Complex> line_in_;
  std::vector<Complex> line_out_;
  Array multiplier_;
  Scalar cached_tau_ = Scalar(-1);
  std::uint64_t convolutions_ = 0;
};

template <typename Scalar>
ScalarField<Scalar> gauss_convolve(const ScalarField<Scalar>& f, Scalar tau, SpectralPlan<Scalar>& plan) {
  require_same_grid(f.grid(), plan.grid(), "gauss_convolve");
  return ScalarField<Scalar>(f.grid(), plan.convolve(f.values(), tau));
}

/// Largest grid gauss_convolve_direct accepts (its cost is O(nodes * N)).
inline constexpr Eigen::Index kDirectConvolutionMaxNodes = 64 * 64;

/// 1D periodized heat kernel sum_m G_tau(t + m L), truncated once the images
/// fall below 1e-17 relative.
template <typename Scalar>
Scalar periodized_gaussian_1d(Scalar t, Scalar tau, Scalar period) {
  t = t - period * std::round(t / period);
  const Scalar norm = Scalar(1) / std::sqrt(Scalar(4) * Scalar(std::numbers::pi) * tau);
  const int images = static_cast<int>(std::ceil(std::sqrt(Scalar(160) * tau) / period)) + 1;
  Scalar s = 0;
  for (int m = -images; m <= images; ++m) {
    const Scalar y = t + Scalar(m) * period;
    s += std::exp(-y * y / (Scalar(4) * tau));
  }
  return norm * s;
}

template <typename Scalar>
constexpr Scalar square(Scalar x) {
  return x * x;
}

/// Smallest quadrature refinement R for which the fine grid resolves G_tau to
/// below double rounding: tau * (omega (R N - N/2))^2 >= 40.
template <typename Scalar>
int direct_refinement(const Grid<Scalar>& grid, Scalar tau) {
  const Scalar omega = Scalar(std::numbers::pi) / grid.extent();
  const int n = grid.cells_per_axis();
  int r = 1;
  while (tau * square(omega * (Scalar(r * n) - Scalar(n) / 2)) < Scalar(40)) ++r;
  return r;
}

/// Per-axis matrix A of the direct convolution:
///   A(i, j) = hf * sum_q G_per(x_i - y_q) D(y_q - x_j)
/// where y_q is a grid refined R times and D the trigonometric interpolation
/// kernel of the coarse grid. For R = 1, D(y_q - x_j) = delta_qj and
/// A(i, j) = h G_per(x_i - x_j), the plain node-sum quadrature.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> direct_axis_operator(const Grid<Scalar>& grid, Scalar tau,
                                                                           int refine) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = grid.cells_per_axis();
  const Scalar period = Scalar(2) * grid.extent();
  const Scalar omega = Scalar(2) * Scalar(std::numbers::pi) / period;
  const Scalar h = grid.spacing();
  const int fine = refine * n;
  const Scalar hf = h / Scalar(refine);

  // Kernel samples G_per(x_i - y_q).
  Mat kernel(n, fine);
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < fine; ++q)
      kernel(i, q) = periodized_gaussian_1d(Scalar(i) * h - Scalar(q) * hf, tau, period);
  if (refine == 1) return h * kernel;

  // Interpolation D(y_q - x_j), Nyquist term halved for even n.
  Mat interp(fine, n);
  for (int q = 0; q < fine; ++q) {
    for (int j = 0; j < n; ++j) {
      const Scalar t = Scalar(q) * hf - Scalar(j) * h;
      Scalar s = 1;
      const int kmax = (n - 1) / 2;
      for (int k = 1; k <= kmax; ++k) s += Scalar(2) * std::cos(Scalar(k) * omega * t);
      if (n % 2 == 0) s += std::cos(Scalar(n / 2) * omega * t);
      interp(q, j) = s / Scalar(n);
    }
  }
  return hf * kernel * interp;
}

/// Oracle for gauss_convolve: direct quadrature of the convolution integral
/// with the periodized Gaussian, applied axis by axis (the kernel is a tensor
/// product). refine = 0 picks direct_refinement(); refine = 1 is the literal
/// node sum h^dim sum_y G_per(x - y) f(y).
template <typename Scalar>
ScalarField<Scalar> gauss_convolve_direct(const ScalarField<Scalar>& f, Scalar tau, int refine = 0) {
  if (!(tau > Scalar(0))) throw std::invalid_argument("heat convolution needs tau > 0");
  const auto& g = f.grid();
  if (g.size() > kDirectConvolutionMaxNodes) {
    throw std::invalid_argument("gauss_convolve_direct: grid too large for direct summation");
  }
  const int r = refine > 0 ? refine : direct_refinement(g, tau);
  const auto a = direct_axis_operator(g, tau, r);
  const int n = g.cells_per_axis();

  typename ScalarField<Scalar>::Array cur = f.values();
  typename ScalarField<Scalar>::Array next(cur.size());
  for (int axis = 0; axis < g.dim(); ++axis) {
    const Eigen::Index stride = g.stride(axis);
    for (Eigen::Index base = 0; base < g.size(); ++base) {
      if ((base / stride) % n != 0) continue;  // first node of each line along axis
      for (int i = 0; i < n; ++i) {
        Scalar s = 0;
        for (int j = 0; j < n; ++j) s += a(i, j) * cur[base + j * stride];
        next[base + i * stride] = s;
      }
    }
    cur.swap(next);
  }
  return ScalarField<Scalar>(g, std::move(cur));
}

}  // namespace thresh
