#include <cmath>
#include <numbers>

#include "doctest.h"
#include "thresh/cloud.hpp"
#include "thresh/distance.hpp"
#include "thresh/random.hpp"
#include "thresh/solver.hpp"

using namespace thresh;

namespace {

IndicatorField<double> random_indicator(const Grid<double>& g, std::uint64_t seed) {
  Rng rng(seed);
  IndicatorField<double> u(g);
  for (Eigen::Index i = 0; i < g.size(); ++i) u.set(i, rng.uniform() < 0.5);
  return u;
}

ScalarField<double> random_weight(const Grid<double>& g, std::uint64_t seed) {
  Rng rng(seed);
  ScalarField<double> w(g);
  for (Eigen::Index i = 0; i < g.size(); ++i) w[i] = rng.uniform(0.0, 2.0);
  return w;
}

// Dense 2D convolution matrix K with (K f)_i = sum_j K_ij f_j, built from the
// per-axis quadrature operator (row-major layout, so K = A kron A).
Eigen::MatrixXd dense_kernel_2d(const Grid<double>& g, double tau) {
  const auto a = direct_axis_operator(g, tau, direct_refinement(g, tau));
  const int n = g.cells_per_axis();
  Eigen::MatrixXd k(n * n, n * n);
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int j0 = 0; j0 < n; ++j0)
        for (int j1 = 0; j1 < n; ++j1) k(i0 * n + i1, j0 * n + j1) = a(i0, j0) * a(i1, j1);
  return k;
}

}  // namespace

TEST_CASE("threshold keeps nonpositive values, ties go to 1") {
  const auto g = make_grid(2, 8);
  CHECK(threshold(ScalarField<double>(g, 2.0)).count() == 0);
  CHECK(threshold(ScalarField<double>(g, -2.0)).count() == g.size());
  CHECK(threshold(ScalarField<double>(g, 0.0)).count() == g.size());
  ScalarField<double> phi(g, 1.0);
  phi[5] = -1e-300;
  const auto u = threshold(phi);
  CHECK(u.count() == 1);
  CHECK(u[5] == 1);
}

TEST_CASE("phi on trivial indicators with unit weight") {
  const auto g = make_grid(2, 16);
  SpectralPlan<double> plan(g);
  const auto w = Weights<double>::constant(g);
  const IndicatorField<double> zero(g);
  IndicatorField<double> one(g);
  for (Eigen::Index i = 0; i < g.size(); ++i) one.set(i, true);
  CHECK((phi_alg1(zero, w.full, 0.1, plan).values() - 2.0).abs().maxCoeff() < 1e-13);
  CHECK((phi_alg1(one, w.full, 0.1, plan).values() + 2.0).abs().maxCoeff() < 1e-13);
  CHECK((phi_alg2(zero, w.half, 0.1, plan).values() - 1.0).abs().maxCoeff() < 1e-13);
  CHECK((phi_alg2(one, w.half, 0.1, plan).values() + 1.0).abs().maxCoeff() < 1e-13);
}

TEST_CASE("phi matches the direct quadrature oracle") {
  const auto g = make_grid(2, 16);
  SpectralPlan<double> plan(g);
  const auto u = random_indicator(g, 3);
  const auto w = random_weight(g, 4);
  for (double tau : {0.01, 0.1}) {
    const ScalarField<double> s(g, 1.0 - 2.0 * u.as_array());
    const ScalarField<double> ws(g, w.values() * s.values());
    const Eigen::ArrayXd ref1 = w.values() * gauss_convolve_direct(s, tau).values() + gauss_convolve_direct(ws, tau).values();
    CHECK((phi_alg1(u, w, tau, plan).values() - ref1).abs().maxCoeff() <= 1e-10);
    const Eigen::ArrayXd ref2 = gauss_convolve_direct(ws, tau).values();
    CHECK((phi_alg2(u, w, tau, plan).values() - ref2).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("energies match a dense double sum") {
  const auto g = make_grid(2, 8);
  SpectralPlan<double> plan(g);
  const double tau = 0.2;
  const auto k = dense_kernel_2d(g, tau);
  const double h2 = g.cell_volume();
  const double pref = std::sqrt(std::numbers::pi / tau);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto u = random_indicator(g, seed);
    const auto w = random_weight(g, seed + 10);
    double sym = 0, fac = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        sym += w[i] * u[i] * k(i, j) * (1 - u[j]) + w[i] * (1 - u[i]) * k(i, j) * u[j];
        fac += w[i] * u[i] * k(i, j) * w[j] * (1 - u[j]);
      }
    sym *= 0.5 * pref * h2;
    fac *= pref * h2;
    CHECK(energy_sym(u, w, tau, plan) == doctest::Approx(sym).epsilon(1e-10));
    CHECK(energy_fac(u, w, tau, plan) == doctest::Approx(fac).epsilon(1e-10));
  }
}

TEST_CASE("energy of a trivial indicator is zero") {
  const auto g = make_grid(2, 16);
  SpectralPlan<double> plan(g);
  const auto w = random_weight(g, 1);
  const IndicatorField<double> zero(g);
  CHECK(std::abs(energy_sym(zero, w, 0.05, plan)) < 1e-14);
  CHECK(std::abs(energy_fac(zero, w, 0.05, plan)) < 1e-14);
}

TEST_CASE("unit-weight energy approximates perimeter") {
  // For w = 1 both energies tend to the length of the boundary as tau -> 0.
  const auto g = make_grid(2, 256);
  SpectralPlan<double> plan(g);
  const auto w = Weights<double>::constant(g);
  const auto u = init_guess(InitSpec::ball(1.0), g);
  const double perim = 2 * std::numbers::pi;
  CHECK(energy_sym(u, w.full, 0.002, plan) == doctest::Approx(perim).epsilon(0.03));
  CHECK(energy_fac(u, w.half, 0.002, plan) == doctest::Approx(perim).epsilon(0.03));
}

TEST_CASE("init_guess shapes") {
  const auto g = make_grid(2, 128);
  const double h = g.spacing();
  const auto ball = init_guess(InitSpec::ball(2.0), g);
  const double expected = std::numbers::pi * 4 / (h * h);
  CHECK(std::abs(ball.count() - expected) <= 0.02 * expected);

  const auto box = init_guess(InitSpec::box({1.0, 0.5}), g);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const auto x = g.node(i);
    CHECK(box[i] == (std::abs(x[0]) < 1.0 && std::abs(x[1]) < 0.5));
  }

  const auto d = distance_brute(gen_polar_cloud(PolarCloudSpec::five_fold()), g);
  const auto ls = init_guess(InitSpec::level_set(4 * h), g, &d);
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(ls[i] == (d[i] <= 4 * h));

  CHECK_THROWS_AS(init_guess(InitSpec::ball(100.0), g), std::invalid_argument);
  auto tiny = InitSpec::ball(1e-3);
  tiny.center = {h / 2, h / 2};
  CHECK_THROWS_AS(init_guess(tiny, g), std::invalid_argument);
  CHECK_THROWS_AS(init_guess(InitSpec::level_set(0.1), g), std::invalid_argument);
}

TEST_CASE("degenerate inputs converge immediately when allowed") {
  const auto g = make_grid(2, 32);
  SpectralPlan<double> plan(g);
  const auto w = Weights<double>::constant(g);
  SolveConfig cfg;
  cfg.tau = 0.05;
  const IndicatorField<double> zero(g);
  CHECK_THROWS_AS(run_fixed_tau(cfg, zero, w, plan), std::invalid_argument);
  cfg.allow_degenerate_init = true;
  for (auto alg : {Algorithm::alg1, Algorithm::alg2}) {
    cfg.algorithm = alg;
    const auto r = run_fixed_tau(cfg, zero, w, plan);
    CHECK(r.converged);
    CHECK(r.iterations_per_stage.at(0) == 1);
    CHECK(r.u_final == zero);
  }
}

TEST_CASE("convolutions per iteration") {
  const auto g = make_grid(2, 64);
  SpectralPlan<double> plan(g);
  const auto d = distance_brute(gen_polar_cloud(PolarCloudSpec::five_fold()), g);
  const auto w = Weights<double>::from_distance(d, 2.0);
  const auto u0 = init_guess(InitSpec::ball(2.0), g);
  SolveConfig cfg;
  cfg.tau = 0.02;
  cfg.log_energy = false;
  cfg.max_iter_per_tau = 3;
  cfg.algorithm = Algorithm::alg2;
  plan.reset_convolution_count();
  auto r = run_fixed_tau(cfg, u0, w, plan);
  CHECK(plan.convolution_count() == r.iterations_per_stage[0]);
  cfg.algorithm = Algorithm::alg1;
  plan.reset_convolution_count();
  r = run_fixed_tau(cfg, u0, w, plan);
  CHECK(plan.convolution_count() == 2 * r.iterations_per_stage[0]);
}

TEST_CASE("alg2 energy never increases and runs are deterministic") {
  const auto g = make_grid(2, 128);
  SpectralPlan<double> plan(g);
  const auto cloud = gen_polar_cloud(PolarCloudSpec::five_fold());
  const auto d = distance_brute(cloud, g);
  for (double p : {1.0, 2.0, 4.0}) {
    const auto w = Weights<double>::from_distance(d, p);
    SolveConfig cfg;
    cfg.p = p;
    cfg.tau = 0.01;
    const auto u0 = init_guess(InitSpec::ball(2.0), g);
    const auto a = run_fixed_tau(cfg, u0, w, plan);
    const auto b = run_fixed_tau(cfg, u0, w, plan);
    CHECK(a.u_final == b.u_final);
    CHECK_FALSE(a.energy_violation);
    CHECK(a.converged);
    const double e0 = a.energy_trace.front().energy;
    for (std::size_t k = 1; k < a.energy_trace.size(); ++k)
      CHECK(a.energy_trace[k].energy <= a.energy_trace[k - 1].energy + 1e-10 * std::max(1.0, e0));
    // the converged state is a fixed point
    SolveConfig again = cfg;
    const auto c = run_fixed_tau(again, a.u_final, w, plan);
    CHECK(c.iterations_per_stage[0] == 1);
    CHECK(c.u_final == a.u_final);
  }
}

TEST_CASE("alg2 trace records stage, tau and flips") {
  const auto g = make_grid(2, 64);
  SpectralPlan<double> plan(g);
  const auto d = distance_brute(gen_polar_cloud(PolarCloudSpec::three_fold()), g);
  const auto w = Weights<double>::from_distance(d, 2.0);
  SolveConfig cfg;
  cfg.tau = 0.02;
  const auto u0 = init_guess(InitSpec::ball(2.0), g);
  const auto r = run_fixed_tau(cfg, u0, w, plan);
  REQUIRE(r.energy_trace.size() == static_cast<std::size_t>(r.iterations_per_stage[0] + 1));
  CHECK(r.energy_trace[0].iteration == 0);
  CHECK(r.energy_trace[0].nodes_flipped == 0);
  CHECK(r.energy_trace[1].nodes_flipped > 0);
  CHECK(r.energy_trace.back().nodes_flipped == 0);
  for (const auto& e : r.energy_trace) CHECK(e.tau == 0.02);
}

TEST_CASE("adaptive schedule") {
  const auto sched = SolveConfig::halving_schedule(0.04, 3);
  REQUIRE(sched.size() == 3);
  CHECK(sched[2] == 0.01);

  const auto g = make_grid(2, 64);
  SpectralPlan<double> plan(g);
  const auto d = distance_brute(gen_polar_cloud(PolarCloudSpec::five_fold()), g);
  const auto w = Weights<double>::from_distance(d, 2.0);
  const auto u0 = init_guess(InitSpec::ball(2.0), g);

  SolveConfig single;
  single.tau = 0.02;
  single.tau_schedule = {0.02};
  const auto fixed = run_fixed_tau(single, u0, w, plan);
  const auto adaptive = run_adaptive(single, u0, w, plan);
  CHECK(fixed.u_final == adaptive.u_final);
  CHECK(fixed.iterations_per_stage == adaptive.iterations_per_stage);

  SolveConfig multi;
  multi.tau_schedule = SolveConfig::halving_schedule(0.04, 6);
  const auto r = run_adaptive(multi, u0, w, plan);
  CHECK(r.stages.size() >= 1);
  CHECK(r.stages.size() <= 6);
  CHECK_FALSE(r.energy_violation);
  if (r.stopped_on_identical_stages) CHECK(r.stages.size() < 6);
  for (std::size_t s = 0; s < r.stages.size(); ++s) CHECK(r.stages[s].tau == multi.tau_schedule[s]);

  SolveConfig bad;
  bad.tau_schedule = {0.01, 0.02};
  CHECK_THROWS_AS(run_adaptive(bad, u0, w, plan), std::invalid_argument);
  bad.tau_schedule = {};
  CHECK_THROWS_AS(run_adaptive(bad, u0, w, plan), std::invalid_argument);
}

TEST_CASE("unit weight shrinks a disc") {
  // Plain curvature flow: a disc must lose area and never gain it.
  const auto g = make_grid(2, 128);
  SpectralPlan<double> plan(g);
  const auto w = Weights<double>::constant(g);
  auto u = init_guess(InitSpec::ball(1.5), g);
  SolveConfig cfg;
  cfg.tau = 0.01;
  cfg.max_iter_per_tau = 1;
  cfg.log_energy = false;
  Eigen::Index area = u.count();
  for (int k = 0; k < 5; ++k) {
    u = run_fixed_tau(cfg, u, w, plan).u_final;
    CHECK(u.count() <= area);
    area = u.count();
  }
  CHECK(area < init_guess(InitSpec::ball(1.5), g).count());
}
