#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "thresh/cloud.hpp"
#include "thresh/cloud_io.hpp"

using namespace thresh;

TEST_CASE("parse_cloud reads csv and whitespace rows") {
  std::istringstream a("0,1\n1,0\n");
  const auto c = parse_cloud(a);
  CHECK(c.dim() == 2);
  REQUIRE(c.size() == 2);
  CHECK(c.points()(0, 0) == 0.0);
  CHECK(c.points()(1, 0) == 1.0);
  CHECK(c.points()(0, 1) == 1.0);

  std::istringstream b("# header\n\n1 2 3\n4\t5 6\n");
  const auto c3 = parse_cloud(b);
  CHECK(c3.dim() == 3);
  CHECK(c3.size() == 2);
  CHECK(c3.points()(2, 1) == 6.0);
}

TEST_CASE("parse_cloud errors name the offending line") {
  std::istringstream bad("a,b\n");
  try {
    parse_cloud(bad, "f.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("f.csv:1") != std::string::npos);
  }
  std::istringstream ragged("0,1\n1,2,3\n");
  CHECK_THROWS_AS(parse_cloud(ragged), ParseError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(parse_cloud(empty), ParseError);
  std::istringstream wide("1,2,3,4\n");
  CHECK_THROWS_AS(parse_cloud(wide), ParseError);
}

TEST_CASE("write_cloud output parses back identically") {
  const auto c = gen_polar_cloud(PolarCloudSpec::five_fold(17));
  std::stringstream ss;
  write_cloud(ss, c, {"generator=five-fold", "seed=0"});
  CHECK(ss.str().rfind("# generator=five-fold\n", 0) == 0);
  CHECK(parse_cloud(ss) == c);
}

TEST_CASE("polar generators follow their radius laws") {
  const auto spec = PolarCloudSpec::five_fold(200);
  const auto c = gen_polar_cloud(spec);
  CHECK(c.size() == 200);
  // i = 50 is theta = pi/2
  CHECK(c.points()(0, 50) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c.points()(1, 50) == doctest::Approx(1.5).epsilon(1e-14));
  for (int i = 0; i < 200; ++i) {
    const double th = 2 * std::numbers::pi * i / 200;
    CHECK(c.point(i).norm() == doctest::Approx(spec.radius(th)).epsilon(1e-14));
  }
  CHECK(PolarCloudSpec::three_fold().radius(std::numbers::pi / 2) == doctest::Approx(1.5));
  const auto m3 = gen_polar_cloud(PolarCloudSpec::m_fold(3));
  CHECK(m3.points()(0, 0) == doctest::Approx(1.0));
  CHECK(m3.points()(1, 0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(gen_polar_cloud(PolarCloudSpec::five_fold(2)), std::invalid_argument);
}

TEST_CASE("torus generator lies on the torus and is deterministic") {
  TorusCloudSpec spec;
  spec.seed = 7;
  CHECK(torus_point(spec, 0.0, 0.0).isApprox(Eigen::Vector3d(1.5, 0, 0)));
  const auto p = torus_point(spec, std::numbers::pi / 2, 0.0);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[2] == doctest::Approx(0.5));

  const auto a = gen_torus_cloud(spec);
  const auto b = gen_torus_cloud(spec);
  CHECK(a == b);
  CHECK(a.size() == 2000);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const auto q = a.point(i);
    const double rho = std::hypot(q[0], q[1]);
    CHECK(std::abs((rho - 1) * (rho - 1) + q[2] * q[2] - 0.25) < 1e-14);
  }
  spec.seed = 8;
  CHECK_FALSE(gen_torus_cloud(spec) == a);
}

TEST_CASE("add_noise statistics and determinism") {
  const auto clean = gen_polar_cloud(PolarCloudSpec::five_fold(200));
  CHECK(add_noise(clean, 0.0, 1) == clean);
  const double mu = 0.04;
  const auto noisy = add_noise(clean, mu, 11);
  CHECK(add_noise(clean, mu, 11) == noisy);
  CHECK(noisy.size() == clean.size());
  const Eigen::ArrayXXd diff = (noisy.points() - clean.points()).array();
  for (int a = 0; a < 2; ++a) {
    const double mean = diff.row(a).mean();
    const double var = (diff.row(a) - mean).square().sum() / (diff.cols() - 1);
    CHECK(std::abs(var - mu * mu) < 0.3 * mu * mu);
  }
  CHECK_THROWS_AS(add_noise(clean, -1.0, 0), std::invalid_argument);
}

TEST_CASE("require_inside rejects points on or past the boundary") {
  const auto g = make_grid(2, 16);
  Eigen::MatrixXd pts(2, 1);
  pts << std::numbers::pi, 0.0;
  CHECK_THROWS_AS(require_inside(PointCloud<double>(pts), g), std::invalid_argument);
  pts << 3.0, 0.0;
  CHECK_NOTHROW(require_inside(PointCloud<double>(pts), g));
  CHECK_THROWS_AS(require_inside(PointCloud<double>(pts), make_grid(3, 16)), std::invalid_argument);
}
