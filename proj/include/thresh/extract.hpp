#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Geometry>

#include "thresh/cloud.hpp"
#include "thresh/grid.hpp"
#include "thresh/marching_tables.hpp"

namespace thresh {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// Isocontour of a 2D field. Loops run counterclockwise around the region
/// where the field is above the iso level.
template <typename Scalar>
struct Polyline2D {
  struct Loop {
    std::vector<Vec2<Scalar>> vertices;
    /// False only for chains cut open by the periodic seam.
    bool closed = true;
  };
  std::vector<Loop> loops;
  bool crosses_seam = false;

  std::size_t vertex_count() const {
    std::size_t n = 0;
    for (const auto& l : loops) n += l.vertices.size();
    return n;
  }

  Scalar length() const {
    Scalar s = 0;
    for (const auto& l : loops) {
      const std::size_t n = l.vertices.size();
      for (std::size_t i = 0; i + 1 < n; ++i) s += (l.vertices[i + 1] - l.vertices[i]).norm();
      if (l.closed && n > 1) s += (l.vertices.front() - l.vertices.back()).norm();
    }
    return s;
  }

  /// Signed area (shoelace) over closed loops; positive for counterclockwise.
  Scalar signed_area() const {
    Scalar s = 0;
    for (const auto& l : loops) {
      if (!l.closed) continue;
      const std::size_t n = l.vertices.size();
      for (std::size_t i = 0; i < n; ++i) {
        const auto& p = l.vertices[i];
        const auto& q = l.vertices[(i + 1) % n];
        s += p[0] * q[1] - q[0] * p[1];
      }
    }
    return s / 2;
  }
};

/// Isosurface of a 3D field. Triangle normals point out of the region where
/// the field is above the iso level.
template <typename Scalar>
struct TriMesh {
  std::vector<Vec3<Scalar>> vertices;
  std::vector<std::array<int, 3>> triangles;
  bool crosses_seam = false;

  Vec3<Scalar> normal(std::size_t t) const {
    const auto& tr = triangles[t];
    const auto& a = vertices[static_cast<std::size_t>(tr[0])];
    return (vertices[static_cast<std::size_t>(tr[1])] - a).cross(vertices[static_cast<std::size_t>(tr[2])] - a) / 2;
  }

  Scalar area() const {
    Scalar s = 0;
    for (std::size_t t = 0; t < triangles.size(); ++t) s += normal(t).norm();
    return s;
  }

  /// Divergence-theorem volume; positive when normals point outward.
  Scalar signed_volume() const {
    Scalar s = 0;
    for (const auto& tr : triangles) {
      s += vertices[static_cast<std::size_t>(tr[0])].dot(
          vertices[static_cast<std::size_t>(tr[1])].cross(vertices[static_cast<std::size_t>(tr[2])]));
    }
    return s / 6;
  }
};

class EmptyLevelSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

template <typename Scalar>
void check_iso(const ScalarField<Scalar>& f, Scalar iso) {
  if (!f.all_finite()) throw std::invalid_argument("extract_iso: field has non-finite values");
  if (!(f.values().minCoeff() < iso && iso < f.values().maxCoeff())) {
    throw EmptyLevelSet("extract_iso: iso level outside the field range (empty level set)");
  }
}

// Vertices live on edges of the unwrapped lattice {0..n}^dim, so a cell on the
// seam gets its own copies rather than joining the far side of the domain.
struct EdgeKey {
  std::int64_t operator()(const MultiIndex& node, int axis, int dim, int n) const {
    std::int64_t k = 0;
    for (int a = 0; a < dim; ++a) k = k * (n + 1) + node[static_cast<std::size_t>(a)];
    return k * dim + axis;
  }
};

}  // namespace detail

/// Marching squares with linear interpolation along edges.
template <typename Scalar>
Polyline2D<Scalar> extract_iso_2d(const ScalarField<Scalar>& f, Scalar iso) {
  const auto& g = f.grid();
  if (g.dim() != 2) throw std::invalid_argument("extract_iso_2d needs a 2D field");
  detail::check_iso(f, iso);
  const int n = g.cells_per_axis();
  const Scalar h = g.spacing();

  std::unordered_map<std::int64_t, int> ids;
  std::vector<Vec2<Scalar>> pos;
  std::vector<std::array<int, 2>> segs;
  Polyline2D<Scalar> out;

  auto vertex = [&](int i, int j, int e, const std::array<Scalar, 4>& v) {
    const int axis = marching::square_edge_axis(e);
    const int c0 = marching::square_edge_base(e);
    const int c1 = c0 | (1 << axis);
    MultiIndex base{i + (c0 & 1), j + ((c0 >> 1) & 1), 0};
    const auto key = detail::EdgeKey{}(base, axis, 2, n);
    auto [it, fresh] = ids.try_emplace(key, static_cast<int>(pos.size()));
    if (fresh) {
      const Scalar t = (iso - v[static_cast<std::size_t>(c0)]) / (v[static_cast<std::size_t>(c1)] - v[static_cast<std::size_t>(c0)]);
      Vec2<Scalar> p(g.coord(base[0]), g.coord(base[1]));
      p[axis] += t * h;
      if (p[0] >= g.extent() || p[1] >= g.extent()) out.crosses_seam = true;
      pos.push_back(p);
    }
    return it->second;
  };

  const auto& table = marching::square_table();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::array<Scalar, 4> v{};
      unsigned mask = 0;
      for (int c = 0; c < 4; ++c) {
        v[static_cast<std::size_t>(c)] = f.at({i + (c & 1), j + ((c >> 1) & 1), 0});
        if (v[static_cast<std::size_t>(c)] > iso) mask |= 1u << c;
      }
      for (const auto& s : table[mask]) segs.push_back({vertex(i, j, s[0], v), vertex(i, j, s[1], v)});
    }
  }

  std::vector<int> next(pos.size(), -1);
  std::vector<char> has_prev(pos.size(), 0);
  for (const auto& s : segs) {
    next[static_cast<std::size_t>(s[0])] = s[1];
    has_prev[static_cast<std::size_t>(s[1])] = 1;
  }
  std::vector<char> used(pos.size(), 0);
  auto walk = [&](int start) {
    typename Polyline2D<Scalar>::Loop loop;
    int v = start;
    while (v != -1 && !used[static_cast<std::size_t>(v)]) {
      used[static_cast<std::size_t>(v)] = 1;
      const auto& p = pos[static_cast<std::size_t>(v)];
      if (loop.vertices.empty() || (p - loop.vertices.back()).norm() > Scalar(0)) loop.vertices.push_back(p);
      v = next[static_cast<std::size_t>(v)];
    }
    loop.closed = v == start;
    if (loop.closed) {
      while (loop.vertices.size() > 1 && (loop.vertices.front() - loop.vertices.back()).norm() == Scalar(0)) {
        loop.vertices.pop_back();
      }
    }
    if (loop.vertices.size() >= 3 || (!loop.closed && loop.vertices.size() >= 2)) out.loops.push_back(std::move(loop));
  };
  // open chains first so they are walked from their true start
  for (const auto& s : segs)
    if (!has_prev[static_cast<std::size_t>(s[0])] && !used[static_cast<std::size_t>(s[0])]) walk(s[0]);
  for (const auto& s : segs)
    if (!used[static_cast<std::size_t>(s[0])]) walk(s[0]);
  return out;
}

/// Marching cubes with linear interpolation along edges.
template <typename Scalar>
TriMesh<Scalar> extract_iso_3d(const ScalarField<Scalar>& f, Scalar iso) {
  const auto& g = f.grid();
  if (g.dim() != 3) throw std::invalid_argument("extract_iso_3d needs a 3D field");
  detail::check_iso(f, iso);
  const int n = g.cells_per_axis();
  const Scalar h = g.spacing();
  const Scalar min_area = Scalar(1e-12) * h * h;

  std::unordered_map<std::int64_t, int> ids;
  TriMesh<Scalar> mesh;
  const auto& table = marching::cube_table();

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        std::array<Scalar, 8> v{};
        unsigned mask = 0;
        for (int c = 0; c < 8; ++c) {
          v[static_cast<std::size_t>(c)] = f.at({i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)});
          if (v[static_cast<std::size_t>(c)] > iso) mask |= 1u << c;
        }
        if (mask == 0 || mask == 255) continue;
        auto vertex = [&](int e) {
          const int axis = marching::cube_edge_axis(e);
          const int c0 = marching::cube_edge_base(e);
          const int c1 = c0 | (1 << axis);
          const MultiIndex base{i + (c0 & 1), j + ((c0 >> 1) & 1), k + ((c0 >> 2) & 1)};
          auto [it, fresh] = ids.try_emplace(detail::EdgeKey{}(base, axis, 3, n), static_cast<int>(mesh.vertices.size()));
          if (fresh) {
            const Scalar t =
                (iso - v[static_cast<std::size_t>(c0)]) / (v[static_cast<std::size_t>(c1)] - v[static_cast<std::size_t>(c0)]);
            Vec3<Scalar> p(g.coord(base[0]), g.coord(base[1]), g.coord(base[2]));
            p[axis] += t * h;
            if ((p.array() >= g.extent()).any()) mesh.crosses_seam = true;
            mesh.vertices.push_back(p);
          }
          return it->second;
        };
        for (const auto& tr : table[mask]) {
          const std::array<int, 3> t{vertex(tr[0]), vertex(tr[1]), vertex(tr[2])};
          mesh.triangles.push_back(t);
          if (mesh.normal(mesh.triangles.size() - 1).norm() <= min_area) mesh.triangles.pop_back();
        }
      }
    }
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// Sampling and Hausdorff distance

template <typename Scalar>
using Samples = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;  // dim x count

inline constexpr Eigen::Index kMinHausdorffSamples = 10000;

/// Points spaced evenly along every segment, at least `count` in total.
template <typename Scalar>
Samples<Scalar> sample_polyline(const Polyline2D<Scalar>& poly, Eigen::Index count = kMinHausdorffSamples) {
  const Scalar total = poly.length();
  if (poly.loops.empty() || !(total > 0)) throw std::invalid_argument("sample_polyline: empty polyline");
  std::vector<Vec2<Scalar>> pts;
  for (const auto& l : poly.loops) {
    const std::size_t n = l.vertices.size();
    const std::size_t segs = l.closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i) {
      const auto& a = l.vertices[i];
      const auto& b = l.vertices[(i + 1) % n];
      const auto k = static_cast<Eigen::Index>(std::ceil((b - a).norm() / total * Scalar(count))) + 1;
      for (Eigen::Index s = 0; s < k; ++s) pts.push_back(a + (b - a) * (Scalar(s) / Scalar(k)));
    }
    if (!l.closed) pts.push_back(l.vertices.back());
  }
  Samples<Scalar> out(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pts[i];
  return out;
}

/// Barycentric lattice on every triangle, at least `count` points in total.
template <typename Scalar>
Samples<Scalar> sample_mesh(const TriMesh<Scalar>& mesh, Eigen::Index count = kMinHausdorffSamples) {
  if (mesh.triangles.empty()) throw std::invalid_argument("sample_mesh: empty mesh");
  const Scalar total = mesh.area();
  std::vector<Vec3<Scalar>> pts(mesh.vertices.begin(), mesh.vertices.end());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const auto& a = mesh.vertices[static_cast<std::size_t>(tr[0])];
    const auto& b = mesh.vertices[static_cast<std::size_t>(tr[1])];
    const auto& c = mesh.vertices[static_cast<std::size_t>(tr[2])];
    // a lattice with m subdivisions has about m^2 / 2 interior points
    const int m = 1 + static_cast<int>(std::ceil(std::sqrt(2 * mesh.normal(t).norm() / total * Scalar(count))));
    for (int p = 0; p <= m; ++p)
      for (int q = 0; p + q <= m; ++q) {
        if ((p == 0 && q == 0) || (p == m) || (q == m)) continue;  // corners are already vertices
        const Scalar s = Scalar(p) / Scalar(m), r = Scalar(q) / Scalar(m);
        pts.push_back(a + s * (b - a) + r * (c - a));
      }
  }
  Samples<Scalar> out(3, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pts[i];
  return out;
}

/// `count` points of a closed parametric curve at evenly spaced parameters in [0, 2 pi).
template <typename Scalar>
Samples<Scalar> sample_curve(const std::function<Vec2<Scalar>(Scalar)>& curve,
                             Eigen::Index count = 4 * kMinHausdorffSamples) {
  Samples<Scalar> out(2, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    out.col(i) = curve(Scalar(2) * Scalar(std::numbers::pi) * Scalar(i) / Scalar(count));
  }
  return out;
}

/// The analytic curve behind a polar cloud.
template <typename Scalar>
Samples<Scalar> sample_polar_curve(const PolarCloudSpec& spec, Eigen::Index count = 4 * kMinHausdorffSamples) {
  return sample_curve<Scalar>(
      [&](Scalar th) {
        const Scalar r = Scalar(spec.radius(static_cast<double>(th)));
        return Vec2<Scalar>(r * std::cos(th), r * std::sin(th));
      },
      count);
}

/// Exact nearest-neighbour queries over a fixed point set (k-d tree).
template <typename Scalar>
class NearestPoint {
 public:
  explicit NearestPoint(const Samples<Scalar>& pts) : pts_(pts) {
    if (pts.cols() == 0) throw std::invalid_argument("NearestPoint: empty point set");
    order_.resize(static_cast<std::size_t>(pts.cols()));
    for (Eigen::Index i = 0; i < pts.cols(); ++i) order_[static_cast<std::size_t>(i)] = i;
    nodes_.reserve(static_cast<std::size_t>(2 * pts.cols() / kLeaf + 2));
    build(0, pts.cols());
  }

  /// Distance from q to the nearest stored point.
  template <typename Derived>
  Scalar distance(const Eigen::MatrixBase<Derived>& q) const {
    Scalar best2 = std::numeric_limits<Scalar>::infinity();
    search(0, q, best2);
    return std::sqrt(best2);
  }

 private:
  static constexpr Eigen::Index kLeaf = 8;

  struct Node {
    Eigen::Index begin, end;
    int axis = -1;  // -1 marks a leaf
    Scalar split = 0;
    int left = -1, right = -1;
  };

  int build(Eigen::Index begin, Eigen::Index end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    int axis = 0;
    Scalar widest = -1;
    for (int a = 0; a < pts_.rows(); ++a) {
      Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = -lo;
      for (Eigen::Index k = begin; k < end; ++k) {
        const Scalar v = pts_(a, order_[static_cast<std::size_t>(k)]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        axis = a;
      }
    }
    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Eigen::Index x, Eigen::Index y) { return pts_(axis, x) < pts_(axis, y); });
    const Scalar split = pts_(axis, order_[static_cast<std::size_t>(mid)]);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  template <typename Derived>
  void search(int id, const Eigen::MatrixBase<Derived>& q, Scalar& best2) const {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (node.axis < 0) {
      for (Eigen::Index k = node.begin; k < node.end; ++k) {
        best2 = std::min(best2, (pts_.col(order_[static_cast<std::size_t>(k)]) - q).squaredNorm());
      }
      return;
    }
    const Scalar diff = q[node.axis] - node.split;
    const int near = diff < 0 ? node.left : node.right;
    const int far = diff < 0 ? node.right : node.left;
    search(near, q, best2);
    if (diff * diff < best2) search(far, q, best2);
  }

  const Samples<Scalar>& pts_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
};

struct HausdorffResult {
  double distance = 0;
  double a_to_b = 0;
  double b_to_a = 0;
  Eigen::Index samples_a = 0;
  Eigen::Index samples_b = 0;
};

/// max over a of the distance to the nearest point of b.
template <typename Scalar>
Scalar directed_hausdorff(const Samples<Scalar>& a, const Samples<Scalar>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hausdorff: dimension mismatch");
  if (a.cols() == 0 || b.cols() == 0) throw std::invalid_argument("hausdorff: empty point set");
  const NearestPoint<Scalar> index(b);
  Scalar worst = 0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) worst = std::max(worst, index.distance(a.col(i)));
  return worst;
}

/// Symmetric Hausdorff distance between two sampled sets.
template <typename Scalar>
HausdorffResult hausdorff(const Samples<Scalar>& a, const Samples<Scalar>& b) {
  HausdorffResult r;
  r.a_to_b = static_cast<double>(directed_hausdorff(a, b));
  r.b_to_a = static_cast<double>(directed_hausdorff(b, a));
  r.distance = std::max(r.a_to_b, r.b_to_a);
  r.samples_a = a.cols();
  r.samples_b = b.cols();
  return r;
}

template <typename Scalar>
Samples<Scalar> samples_of(const Polyline2D<Scalar>& p) {
  return sample_polyline(p);
}
template <typename Scalar>
Samples<Scalar> samples_of(const TriMesh<Scalar>& m) {
  return sample_mesh(m);
}
template <typename Scalar>
Samples<Scalar> samples_of(const PointCloud<Scalar>& c) {
  return c.points();
}
template <typename Scalar>
Samples<Scalar> samples_of(const Samples<Scalar>& s) {
  return s;
}

/// Symmetric Hausdorff distance between any two of: polyline, mesh, point
/// cloud or pre-sampled reference.
template <typename Scalar, typename A, typename B>
HausdorffResult hausdorff_to_curve(const A& geometry, const B& reference) {
  return hausdorff<Scalar>(samples_of(geometry), samples_of(reference));
}

}  // namespace thresh
