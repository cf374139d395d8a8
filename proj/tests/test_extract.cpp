#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "thresh/extract.hpp"
#include "thresh/heat.hpp"
#include "thresh/marching_tables.hpp"

using namespace thresh;

namespace {

ScalarField<double> circle_sdf(int n, double r = 1.0, double cx = 0.0, double cy = 0.0) {
  return sample(make_grid(2, n), [=](const Point<double>& p) { return std::hypot(p[0] - cx, p[1] - cy) - r; });
}

// Raw disc indicator at iso 0.5: staircase geometry, first order in h.
double circle_hausdorff(int n) {
  const auto disc = sample(make_grid(2, n), [](const Point<double>& p) { return p.norm() <= 1.0 ? 1.0 : 0.0; });
  const auto poly = extract_iso_2d(disc, 0.5);
  const auto ref = sample_curve<double>([](double t) { return Vec2<double>(std::cos(t), std::sin(t)); });
  return hausdorff_to_curve<double>(poly, ref).distance;
}

bool segments_cross(const Vec2<double>& a, const Vec2<double>& b, const Vec2<double>& c, const Vec2<double>& d) {
  auto orient = [](const Vec2<double>& p, const Vec2<double>& q, const Vec2<double>& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

bool self_intersects(const Polyline2D<double>::Loop& l) {
  const std::size_t n = l.vertices.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(l.vertices[i], l.vertices[(i + 1) % n], l.vertices[j], l.vertices[(j + 1) % n])) return true;
    }
  return false;
}

}  // namespace

TEST_CASE("square table cases") {
  const auto& t = marching::square_table();
  CHECK(t[0].empty());
  CHECK(t[15].empty());
  for (unsigned m = 1; m < 15; ++m) {
    const std::size_t expected = (m == 6 || m == 9) ? 2 : 1;  // diagonals are separated
    CHECK(t[m].size() == expected);
  }
}

TEST_CASE("cube table is closed and consistently oriented") {
  const auto& t = marching::cube_table();
  CHECK(t[0].empty());
  CHECK(t[255].empty());
  for (unsigned m = 1; m < 255; ++m) {
    CHECK_FALSE(t[m].empty());
    // every directed edge pair inside a case shows up at most once and the
    // polygon boundaries lie on cube faces, so each crossed edge is used
    std::map<std::pair<int, int>, int> directed;
    for (const auto& tr : t[m])
      for (int k = 0; k < 3; ++k) ++directed[{tr[static_cast<std::size_t>(k)], tr[static_cast<std::size_t>((k + 1) % 3)]}];
    for (const auto& [e, count] : directed) CHECK(count == 1);
    for (int e = 0; e < 12; ++e) {
      const int c0 = marching::cube_edge_base(e);
      const int c1 = c0 | (1 << marching::cube_edge_axis(e));
      const bool crossed = ((m >> c0) & 1) != ((m >> c1) & 1);
      bool used = false;
      for (const auto& tr : t[m])
        for (auto x : tr) used = used || x == e;
      CHECK(used == crossed);
    }
  }
  // complementary cases are the same surface with opposite winding
  CHECK(t[1].size() == t[254].size());
  CHECK(marching::cube_table_hash() == marching::cube_table_hash());
}

TEST_CASE("circle SDF contour lies within h of the unit circle") {
  const auto f = circle_sdf(256);
  const double h = f.grid().spacing();
  const auto poly = extract_iso_2d(f, 0.0);
  REQUIRE(poly.loops.size() == 1);
  CHECK(poly.loops[0].closed);
  CHECK_FALSE(poly.crosses_seam);
  for (const auto& v : poly.loops[0].vertices) CHECK(std::abs(v.norm() - 1.0) <= h);
  CHECK(poly.length() == doctest::Approx(2 * std::numbers::pi).epsilon(1e-3));
  // above-iso region is outside the circle, so the loop winds clockwise
  CHECK(poly.signed_area() == doctest::Approx(-std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("contours are closed, simple and ccw around the high region") {
  const auto g = make_grid(2, 128);
  const auto flower = sample(g, [](const Point<double>& p) {
    const double th = std::atan2(p[1], p[0]);
    return 1 + 0.5 * std::cos(5 * (th - std::numbers::pi / 2)) - p.norm();
  });
  const auto two = sample(g, [](const Point<double>& p) {
    return std::max(0.6 - std::hypot(p[0] - 1, p[1]), 0.6 - std::hypot(p[0] + 1, p[1]));
  });
  for (const auto* f : {&flower, &two}) {
    const auto poly = extract_iso_2d(*f, 0.0);
    for (const auto& l : poly.loops) {
      CHECK(l.closed);
      CHECK(l.vertices.size() >= 3);
      for (std::size_t i = 0; i < l.vertices.size(); ++i)
        CHECK((l.vertices[i] - l.vertices[(i + 1) % l.vertices.size()]).norm() > 0);
      CHECK_FALSE(self_intersects(l));
    }
    CHECK(poly.signed_area() > 0);
  }
  CHECK(extract_iso_2d(two, 0.0).loops.size() == 2);
}

TEST_CASE("constant fields and iso outside the range are rejected") {
  const auto g2 = make_grid(2, 16);
  CHECK_THROWS_AS(extract_iso_2d(ScalarField<double>(g2, 1.0), 0.5), EmptyLevelSet);
  CHECK_THROWS_AS(extract_iso_2d(circle_sdf(16), 100.0), EmptyLevelSet);
  CHECK_THROWS_AS(extract_iso_3d(ScalarField<double>(make_grid(3, 8), 0.0), 0.0), EmptyLevelSet);
  CHECK_THROWS_AS(extract_iso_3d(circle_sdf(16), 0.0), std::invalid_argument);
}

TEST_CASE("sphere SDF mesh area and orientation") {
  const auto g = make_grid(3, 64);
  const double h = g.spacing();
  const auto f = sample(g, [](const Point<double>& p) { return 1.0 - p.norm(); });
  const auto mesh = extract_iso_3d(f, 0.0);
  CHECK_FALSE(mesh.crosses_seam);
  CHECK(std::abs(mesh.area() - 4 * std::numbers::pi) <= 0.05 * 4 * std::numbers::pi);
  CHECK(mesh.signed_volume() == doctest::Approx(4.0 / 3.0 * std::numbers::pi).epsilon(0.02));
  for (const auto& v : mesh.vertices) CHECK(std::abs(v.norm() - 1.0) <= h);
  for (const auto& tr : mesh.triangles)
    for (int x : tr) CHECK((x >= 0 && x < static_cast<int>(mesh.vertices.size())));

  // watertight: every undirected edge is shared by exactly two triangles
  std::map<std::pair<int, int>, int> edges;
  for (const auto& tr : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = tr[static_cast<std::size_t>(k)], b = tr[static_cast<std::size_t>((k + 1) % 3)];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& [e, c] : edges) CHECK(c == 2);
}

TEST_CASE("geometry across the periodic seam is flagged") {
  // periodic distance to a circle centred on the seam
  const auto f = sample(make_grid(2, 64), [](const Point<double>& p) {
    const double dx = std::numbers::pi - std::abs(p[0]);
    return std::hypot(dx, p[1]) - 0.5;
  });
  const auto poly = extract_iso_2d(f, 0.0);
  CHECK(poly.crosses_seam);
  CHECK(poly.loops.size() == 2);
  for (const auto& l : poly.loops) CHECK_FALSE(l.closed);
  for (const auto& l : poly.loops)
    for (const auto& v : l.vertices) CHECK(v[0] < std::numbers::pi + f.grid().spacing());
}

TEST_CASE("Hausdorff distance basics") {
  const auto unit = sample_curve<double>([](double t) { return Vec2<double>(std::cos(t), std::sin(t)); });
  const auto big = sample_curve<double>([](double t) { return Vec2<double>(1.1 * std::cos(t), 1.1 * std::sin(t)); });
  CHECK(hausdorff<double>(unit, unit).distance == 0.0);
  const auto r = hausdorff<double>(unit, big);
  CHECK(std::abs(r.distance - 0.1) <= 1e-3);
  CHECK(r.samples_a >= kMinHausdorffSamples);
  CHECK(r.samples_b >= kMinHausdorffSamples);

  const auto poly = extract_iso_2d(circle_sdf(128), 0.0);
  const auto ab = hausdorff_to_curve<double>(poly, big).distance;
  const auto ba = hausdorff_to_curve<double>(big, poly).distance;
  CHECK(std::abs(ab - ba) <= 1e-3);
  CHECK_THROWS_AS(hausdorff<double>(unit, Samples<double>(3, 5)), std::invalid_argument);
}

TEST_CASE("nearest-point index agrees with a linear scan") {
  Samples<double> pts(3, 500);
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    pts.col(i) << std::sin(1.3 * i), std::cos(0.7 * i) * 2, std::sin(0.11 * i * i);
  const NearestPoint<double> index(pts);
  for (int q = 0; q < 50; ++q) {
    const Eigen::Vector3d x(std::cos(q), 3 * std::sin(2.1 * q), 0.3 * q - 5);
    CHECK(index.distance(x) == doctest::Approx((pts.colwise() - x).colwise().norm().minCoeff()).epsilon(1e-14));
  }
}

TEST_CASE("staircase circle contour error is first order in h") {
  const double e64 = circle_hausdorff(64), e128 = circle_hausdorff(128), e256 = circle_hausdorff(256);
  MESSAGE("circle errors " << e64 << " " << e128 << " " << e256);
  CHECK(e128 / e64 >= 0.3);
  CHECK(e128 / e64 <= 0.7);
  CHECK(e256 / e128 >= 0.3);
  CHECK(e256 / e128 <= 0.7);
}

TEST_CASE("mollified indicator contour of a disc") {
  const auto g = make_grid(2, 128);
  const auto u = sample(g, [](const Point<double>& p) { return p.norm() <= 1.2 ? 1.0 : 0.0; });
  SpectralPlan<double> plan(g);
  const auto poly = extract_iso_2d(gauss_convolve(u, 0.0025, plan), 0.5);
  REQUIRE(poly.loops.size() == 1);
  CHECK(poly.signed_area() > 0);
  for (const auto& v : poly.loops[0].vertices) CHECK(std::abs(v.norm() - 1.2) <= 2 * g.spacing());
}
