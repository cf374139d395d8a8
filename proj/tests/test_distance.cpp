#include <cmath>

#include "doctest.h"
#include "thresh/cloud.hpp"
#include "thresh/distance.hpp"

using namespace thresh;

namespace {

PointCloud<double> cloud2(std::initializer_list<std::pair<double, double>> pts) {
  Eigen::MatrixXd m(2, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (auto [x, y] : pts) m.col(j++) << x, y;
  return PointCloud<double>(m);
}

// Independent scan: every node against every point, written without Eigen reductions.
double scan_distance(const PointCloud<double>& c, double x, double y) {
  double best = 1e300;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const double dx = x - c.points()(0, j), dy = y - c.points()(1, j);
    best = std::min(best, std::sqrt(dx * dx + dy * dy));
  }
  return best;
}

}  // namespace

TEST_CASE("distance_brute on tiny clouds") {
  const auto g = make_grid(2, 8, 4.0);  // h = 1, node (1, 0) has index (5, 4)
  const auto one = distance_brute(cloud2({{0, 0}}), g);
  CHECK(one.at({5, 4, 0}) == doctest::Approx(1.0));
  const auto two = distance_brute(cloud2({{0, 0}, {2, 0}}), g);
  CHECK(two.at({5, 4, 0}) == doctest::Approx(1.0));
  CHECK(two.at({6, 4, 0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(distance_brute(cloud2({{5, 0}}), g), std::invalid_argument);
}

TEST_CASE("distance_brute matches scan oracle and is 1-Lipschitz") {
  const auto g = make_grid(2, 128);
  const auto c = gen_polar_cloud(PolarCloudSpec::five_fold(200));
  const auto d = distance_brute(c, g);
  const double h = g.spacing();
  double minval = 1e300;
  for (Eigen::Index i = 0; i < g.size(); i += 37) {
    const auto x = g.node(i);
    CHECK(d[i] == doctest::Approx(scan_distance(c, x[0], x[1])).epsilon(1e-14));
  }
  for (Eigen::Index i = 0; i < g.size(); ++i) minval = std::min(minval, d[i]);
  CHECK(minval <= h * std::sqrt(2.0) / 2);
  for (int i = 0; i < 127; ++i)
    for (int j = 0; j < 127; ++j) {
      CHECK(std::abs(d.at({i + 1, j, 0}) - d.at({i, j, 0})) <= h * (1 + 1e-12));
      CHECK(std::abs(d.at({i, j + 1, 0}) - d.at({i, j, 0})) <= h * (1 + 1e-12));
    }
}

TEST_CASE("distance_sweep single point within 2h of brute force") {
  const auto g = make_grid(2, 64);
  const auto c = cloud2({{0.0, 0.0}});
  SweepStats st;
  const auto ds = distance_sweep(c, g, SweepConfig{}, &st);
  const auto db = distance_brute(c, g);
  CHECK(st.converged);
  CHECK((ds.values() >= 0).all());
  const double err = (ds.values() - db.values()).abs().maxCoeff();
  MESSAGE("single-point sweep error / h = " << err / g.spacing() << " after " << st.sweeps << " sweeps");
  CHECK(err <= 2 * g.spacing());
}

TEST_CASE("distance_sweep keeps frozen nodes exact") {
  const auto g = make_grid(2, 32);
  const auto c = gen_polar_cloud(PolarCloudSpec::three_fold(100));
  const auto ds = distance_sweep(c, g, SweepConfig{});
  const auto db = distance_brute(c, g);
  const auto mask = detail::source_mask(c, g, SweepConfig{}.freeze_radius);
  Eigen::Index frozen = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) {
      CHECK(ds[i] == db[i]);
      ++frozen;
    }
  }
  CHECK(frozen > 0);
}

TEST_CASE("distance_sweep equals brute force when every node is a source") {
  const auto g = make_grid(2, 8, 1.0);
  Eigen::MatrixXd pts(2, 64);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) pts.col(i * 8 + j) << g.coord(i) + 0.1, g.coord(j) + 0.1;
  const PointCloud<double> dense(pts);
  const auto ds = distance_sweep(dense, g, SweepConfig{});
  const auto db = distance_brute(dense, g);
  CHECK((ds.values() == db.values()).all());
}

TEST_CASE("distance_sweep in 3D against brute force") {
  const auto g = make_grid(3, 32);
  TorusCloudSpec spec;
  spec.n_points = 400;
  spec.seed = 2;
  const auto c = gen_torus_cloud(spec);
  const auto ds = distance_sweep(c, g, SweepConfig{});
  const auto db = distance_brute(c, g);
  const double err = (ds.values() - db.values()).abs().maxCoeff();
  MESSAGE("3D sweep error / h = " << err / g.spacing());
  CHECK(err <= 2 * g.spacing());
}

TEST_CASE("distance_sweep reports non-convergence") {
  const auto g = make_grid(2, 64);
  SweepConfig cfg;
  cfg.max_rounds = 1;
  try {
    distance_sweep(cloud2({{0, 0}}), g, cfg);
    FAIL("expected SweepDidNotConverge");
  } catch (const SweepDidNotConverge& e) {
    CHECK(e.residual() > 0);
  }
  cfg.max_rounds = 0;
  CHECK_THROWS_AS(distance_sweep(cloud2({{0, 0}}), g, cfg), std::invalid_argument);
}

TEST_CASE("weight_field powers") {
  const auto g = make_grid(2, 8);
  const ScalarField<double> ones(g, 1.0);
  for (double p : {1.0, 2.0, 3.5}) {
    CHECK((weight_field(ones, p, WeightMode::full).values() == 1.0).all());
    CHECK((weight_field(ones, p, WeightMode::half).values() == 1.0).all());
  }
  const ScalarField<double> four(g, 4.0);
  CHECK(weight_field(four, 2.0, WeightMode::half)[0] == 4.0);
  CHECK(weight_field(four, 2.0, WeightMode::full)[0] == 16.0);

  const auto d = distance_brute(gen_polar_cloud(PolarCloudSpec::five_fold(50)), make_grid(2, 32));
  for (double p : {1.0, 2.0, 3.0, 5.0}) {
    const auto half = weight_field(d, p, WeightMode::half);
    const auto full = weight_field(d, p, WeightMode::full);
    CHECK(((half.values().square() - full.values()).abs() <= 1e-14 * (1 + full.values())).all());
  }
  ScalarField<double> neg(g, 1.0);
  neg[3] = -0.1;
  CHECK_THROWS_AS(weight_field(neg, 2.0, WeightMode::full), std::invalid_argument);
  CHECK_THROWS_AS(weight_field(ones, 0.0, WeightMode::full), std::invalid_argument);
}
