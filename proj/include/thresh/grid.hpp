#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace thresh {

/// Coordinates of a single grid node or cloud point. Fixed capacity of 3 so no
/// heap allocation happens per node.
template <typename Scalar>
using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

using MultiIndex = std::array<int, 3>;

/// Uniform periodic node-centred grid on [-extent, extent)^dim. The node at
/// +extent is identified with the node at -extent.
template <typename Scalar>
class Grid {
 public:
  Grid() = default;

  Grid(int dim, int cells_per_axis, Scalar extent)
      : dim_(dim), n_(cells_per_axis), extent_(extent) {
    if (dim != 2 && dim != 3) {
      throw std::invalid_argument("grid dimension must be 2 or 3, got " + std::to_string(dim));
    }
    if (cells_per_axis < 8) {
      throw std::invalid_argument("grid needs at least 8 cells per axis, got " +
                                  std::to_string(cells_per_axis));
    }
    if (!(extent > Scalar(0)) || !std::isfinite(static_cast<double>(extent))) {
      throw std::invalid_argument("grid extent must be positive and finite");
    }
    h_ = Scalar(2) * extent_ / Scalar(n_);
  }

  int dim() const { return dim_; }
  int cells_per_axis() const { return n_; }
  Scalar extent() const { return extent_; }
  Scalar spacing() const { return h_; }

  Eigen::Index size() const {
    Eigen::Index m = 1;
    for (int a = 0; a < dim_; ++a) m *= n_;
    return m;
  }

  /// Quadrature weight h^dim of the periodic trapezoid rule.
  Scalar cell_volume() const { return dim_ == 2 ? h_ * h_ : h_ * h_ * h_; }

  Scalar coord(int i) const { return -extent_ + Scalar(i) * h_; }

  int wrap(int i) const {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  /// Row-major flat index, last axis fastest. Indices are wrapped.
  Eigen::Index flat(const MultiIndex& idx) const {
    Eigen::Index f = 0;
    for (int a = 0; a < dim_; ++a) f = f * n_ + wrap(idx[a]);
    return f;
  }

  MultiIndex unflat(Eigen::Index f) const {
    MultiIndex idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % n_);
      f /= n_;
    }
    return idx;
  }

  Point<Scalar> node(Eigen::Index f) const {
    const MultiIndex idx = unflat(f);
    Point<Scalar> x(dim_);
    for (int a = 0; a < dim_; ++a) x[a] = coord(idx[a]);
    return x;
  }

  /// Stride of the given axis in the flat layout.
  Eigen::Index stride(int axis) const {
    Eigen::Index s = 1;
    for (int a = dim_ - 1; a > axis; --a) s *= n_;
    return s;
  }

  bool contains_strictly(const Point<Scalar>& x) const {
    for (int a = 0; a < dim_; ++a) {
      if (!(x[a] > -extent_ && x[a] < extent_)) return false;
    }
    return true;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.extent_ == b.extent_;
  }

 private:
  int dim_ = 2;
  int n_ = 8;
  Scalar extent_ = Scalar(std::numbers::pi);
  Scalar h_ = Scalar(2 * std::numbers::pi / 8);
};

template <typename Scalar = double>
Grid<Scalar> make_grid(int dim, int cells_per_axis,
                       Scalar extent = Scalar(std::numbers::pi)) {
  return Grid<Scalar>(dim, cells_per_axis, extent);
}

template <typename Scalar>
void require_same_grid(const Grid<Scalar>& a, const Grid<Scalar>& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

/// Real-valued function sampled at the nodes of a grid.
template <typename Scalar>
class ScalarField {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  ScalarField() = default;
  explicit ScalarField(const Grid<Scalar>& g, Scalar fill = Scalar(0))
      : grid_(g), values_(Array::Constant(g.size(), fill)) {}
  ScalarField(const Grid<Scalar>& g, Array values) : grid_(g), values_(std::move(values)) {
    if (values_.size() != g.size()) {
      throw std::invalid_argument("field value count does not match grid");
    }
  }

  const Grid<Scalar>& grid() const { return grid_; }
  const Array& values() const { return values_; }
  Array& values() { return values_; }

  Scalar operator[](Eigen::Index i) const { return values_[i]; }
  Scalar& operator[](Eigen::Index i) { return values_[i]; }
  Scalar at(const MultiIndex& idx) const { return values_[grid_.flat(idx)]; }

  bool all_finite() const { return values_.isFinite().all(); }

 private:
  Grid<Scalar> grid_;
  Array values_;
};

/// Binary field on a grid. Storage is one byte per node but the only way in
/// is through bool, so values are always exactly 0 or 1.
template <typename Scalar>
class IndicatorField {
 public:
  IndicatorField() = default;
  explicit IndicatorField(const Grid<Scalar>& g, bool fill = false)
      : grid_(g), bits_(static_cast<std::size_t>(g.size()), fill ? 1 : 0) {}

  const Grid<Scalar>& grid() const { return grid_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(bits_.size()); }

  bool operator[](Eigen::Index i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
  void set(Eigen::Index i, bool v) { bits_[static_cast<std::size_t>(i)] = v ? 1 : 0; }

  const std::vector<std::uint8_t>& bytes() const { return bits_; }

  Eigen::Index count() const {
    Eigen::Index c = 0;
    for (auto b : bits_) c += b;
    return c;
  }

  bool degenerate() const {
    const Eigen::Index c = count();
    return c == 0 || c == size();
  }

  /// Values as 0/1 reals, ready for expression arithmetic.
  typename ScalarField<Scalar>::Array as_array() const {
    typename ScalarField<Scalar>::Array a(size());
    for (Eigen::Index i = 0; i < size(); ++i) a[i] = bits_[static_cast<std::size_t>(i)];
    return a;
  }

  friend bool operator==(const IndicatorField& a, const IndicatorField& b) {
    return a.grid_ == b.grid_ && a.bits_ == b.bits_;
  }

 private:
  Grid<Scalar> grid_;
  std::vector<std::uint8_t> bits_;
};

/// Number of nodes where two indicators differ.
template <typename Scalar>
Eigen::Index hamming(const IndicatorField<Scalar>& a, const IndicatorField<Scalar>& b) {
  require_same_grid(a.grid(), b.grid(), "hamming");
  Eigen::Index c = 0;
  for (std::size_t i = 0; i < a.bytes().size(); ++i) c += a.bytes()[i] != b.bytes()[i];
  return c;
}

/// Samples f at every node. f receives a Point<Scalar> and returns a Scalar.
template <typename Scalar, typename Fn>
ScalarField<Scalar> sample(const Grid<Scalar>& grid, Fn&& f) {
  ScalarField<Scalar> out(grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar v = f(grid.node(i));
    if (!std::isfinite(static_cast<double>(v))) {
      throw std::domain_error("sample: function produced a non-finite value at node " +
                              std::to_string(i));
    }
    out[i] = v;
  }
  return out;
}

/// Indicator of the nodes where pred(x) holds.
template <typename Scalar, typename Pred>
IndicatorField<Scalar> sample_indicator(const Grid<Scalar>& grid, Pred&& pred) {
  IndicatorField<Scalar> out(grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i) out.set(i, pred(grid.node(i)));
  return out;
}

/// Node-sum quadrature of a field, times h^dim.
template <typename Scalar, typename Derived>
Scalar integrate(const Grid<Scalar>& grid, const Eigen::ArrayBase<Derived>& values) {
  return values.sum() * grid.cell_volume();
}

}  // namespace thresh
