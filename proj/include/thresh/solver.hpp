#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thresh/distance.hpp"
#include "thresh/grid.hpp"
#include "thresh/heat.hpp"

namespace thresh {

/// alg1 minimises the symmetric energy (two convolutions per iteration);
/// alg2 the factored one (one convolution, provably energy decreasing).
enum class Algorithm { alg1, alg2 };

inline const char* to_string(Algorithm a) { return a == Algorithm::alg1 ? "alg1" : "alg2"; }

struct SolveConfig {
  Algorithm algorithm = Algorithm::alg2;
  double p = 2.0;
  double tau = 0.01;
  /// Strictly decreasing; used by run_adaptive.
  std::vector<double> tau_schedule;
  int max_iter_per_tau = 500;
  /// Evaluate the energy after every iteration (one extra convolution).
  bool log_energy = true;
  /// Test hook: let run_fixed_tau start from an all-0 / all-1 indicator.
  bool allow_degenerate_init = false;

  void validate() const {
    if (!(p > 0)) throw std::invalid_argument("p must be positive");
    if (max_iter_per_tau < 1) throw std::invalid_argument("max_iter_per_tau must be >= 1");
    for (std::size_t i = 0; i < tau_schedule.size(); ++i) {
      if (!(tau_schedule[i] > 0)) throw std::invalid_argument("tau schedule entries must be positive");
      if (i > 0 && !(tau_schedule[i] < tau_schedule[i - 1])) {
        throw std::invalid_argument("tau schedule must be strictly decreasing");
      }
    }
  }

  /// tau1, tau1/2, ..., tau1/2^(count-1).
  static std::vector<double> halving_schedule(double tau1, int count) {
    if (!(tau1 > 0) || count < 1) throw std::invalid_argument("halving schedule needs tau1 > 0 and count >= 1");
    std::vector<double> s;
    for (int i = 0; i < count; ++i) s.push_back(tau1 / std::pow(2.0, i));
    return s;
  }
};

struct EnergyRecord {
  int stage = 0;
  double tau = 0;
  int iteration = 0;
  double energy = 0;
  Eigen::Index nodes_flipped = 0;
};

struct StageSummary {
  double tau = 0;
  int iterations = 0;
  bool converged = false;
  bool cycle = false;
};

template <typename Scalar>
struct SolveResult {
  IndicatorField<Scalar> u_final;
  std::vector<EnergyRecord> energy_trace;
  std::vector<int> iterations_per_stage;
  std::vector<StageSummary> stages;
  bool converged = false;
  bool cycle_detected = false;
  /// alg2 energy rose beyond tolerance: an internal-consistency failure.
  bool energy_violation = false;
  std::string violation_message;
  /// alg1 energy increases; expected to stay 0 but not guaranteed.
  int alg1_energy_increases = 0;
  bool stopped_on_identical_stages = false;
  double wall_time = 0;
};

/// d^p and d^(p/2), computed once per reconstruction.
template <typename Scalar>
struct Weights {
  ScalarField<Scalar> full;
  ScalarField<Scalar> half;

  static Weights from_distance(const ScalarField<Scalar>& d, Scalar p) {
    return {weight_field(d, p, WeightMode::full), weight_field(d, p, WeightMode::half)};
  }

  /// Uniform weight, which turns both schemes into plain MBO curvature flow.
  static Weights constant(const Grid<Scalar>& g, Scalar value = Scalar(1)) {
    return {ScalarField<Scalar>(g, value), ScalarField<Scalar>(g, value)};
  }
};

// ---------------------------------------------------------------------------
// Initial guesses

enum class InitKind { box, ball, level_set };

struct InitSpec {
  InitKind kind = InitKind::ball;
  std::vector<double> half_widths{1.6, 1.6, 0.6};  // box: |x_a| < w_a
  std::vector<double> center{0.0, 0.0, 0.0};       // ball
  double radius = 2.0;                             // ball: |x - c| <= r
  double sigma = 0.0;                              // level set: d <= sigma

  static InitSpec ball(double r) {
    InitSpec s;
    s.kind = InitKind::ball;
    s.radius = r;
    return s;
  }
  static InitSpec box(std::vector<double> w) {
    InitSpec s;
    s.kind = InitKind::box;
    s.half_widths = std::move(w);
    return s;
  }
  static InitSpec level_set(double sigma) {
    InitSpec s;
    s.kind = InitKind::level_set;
    s.sigma = sigma;
    return s;
  }
};

template <typename Scalar>
IndicatorField<Scalar> init_guess(const InitSpec& spec, const Grid<Scalar>& grid,
                                  const ScalarField<Scalar>* d = nullptr) {
  const int dim = grid.dim();
  IndicatorField<Scalar> u(grid);
  switch (spec.kind) {
    case InitKind::box: {
      if (static_cast<int>(spec.half_widths.size()) < dim) throw std::invalid_argument("box needs one half-width per axis");
      u = sample_indicator(grid, [&](const Point<Scalar>& x) {
        for (int a = 0; a < dim; ++a)
          if (!(std::abs(x[a]) < Scalar(spec.half_widths[a]))) return false;
        return true;
      });
      break;
    }
    case InitKind::ball: {
      if (static_cast<int>(spec.center.size()) < dim) throw std::invalid_argument("ball centre needs dim coordinates");
      if (!(spec.radius > 0)) throw std::invalid_argument("ball radius must be positive");
      Point<Scalar> c(dim);
      for (int a = 0; a < dim; ++a) c[a] = Scalar(spec.center[a]);
      u = sample_indicator(grid, [&](const Point<Scalar>& x) { return (x - c).norm() <= Scalar(spec.radius); });
      break;
    }
    case InitKind::level_set: {
      if (!d) throw std::invalid_argument("level-set initialisation needs the distance field");
      if (!(spec.sigma > 0)) throw std::invalid_argument("level-set sigma must be positive");
      require_same_grid(grid, d->grid(), "init_guess");
      for (Eigen::Index i = 0; i < grid.size(); ++i) u.set(i, (*d)[i] <= Scalar(spec.sigma));
      break;
    }
  }
  if (u.degenerate()) {
    throw std::invalid_argument(std::string("degenerate initial guess (all ") + (u.count() == 0 ? "0" : "1") + ")");
  }
  return u;
}

// ---------------------------------------------------------------------------
// One iteration

/// w G*(1-2u) + G*(w (1-2u)), with w = d^p.
template <typename Scalar>
ScalarField<Scalar> phi_alg1(const IndicatorField<Scalar>& u, const ScalarField<Scalar>& w_full, Scalar tau,
                             SpectralPlan<Scalar>& plan) {
  require_same_grid(u.grid(), w_full.grid(), "phi_alg1");
  require_same_grid(u.grid(), plan.grid(), "phi_alg1");
  const auto s = (Scalar(1) - Scalar(2) * u.as_array()).eval();
  const auto& w = w_full.values();
  return ScalarField<Scalar>(u.grid(), w * plan.convolve(s, tau) + plan.convolve(w * s, tau));
}

/// G*(psi (1-2u)), with psi = d^(p/2).
template <typename Scalar>
ScalarField<Scalar> phi_alg2(const IndicatorField<Scalar>& u, const ScalarField<Scalar>& w_half, Scalar tau,
                             SpectralPlan<Scalar>& plan) {
  require_same_grid(u.grid(), w_half.grid(), "phi_alg2");
  require_same_grid(u.grid(), plan.grid(), "phi_alg2");
  return ScalarField<Scalar>(u.grid(), plan.convolve(w_half.values() * (Scalar(1) - Scalar(2) * u.as_array()), tau));
}

/// u = 1 where phi <= 0 (ties go to 1), else 0.
template <typename Scalar>
IndicatorField<Scalar> threshold(const ScalarField<Scalar>& phi) {
  IndicatorField<Scalar> u(phi.grid());
  for (Eigen::Index i = 0; i < phi.values().size(); ++i) u.set(i, phi[i] <= Scalar(0));
  return u;
}

/// 1/2 sqrt(pi/tau) ( int w u G*(1-u) + int w (1-u) G*u ).
template <typename Scalar>
Scalar energy_sym(const IndicatorField<Scalar>& u, const ScalarField<Scalar>& w_full, Scalar tau,
                  SpectralPlan<Scalar>& plan) {
  require_same_grid(u.grid(), w_full.grid(), "energy_sym");
  const auto ua = u.as_array();
  const auto gu = plan.convolve(ua, tau);  // G*(1-u) = 1 - G*u
  const auto& w = w_full.values();
  const Scalar sum = (w * ua * (Scalar(1) - gu) + w * (Scalar(1) - ua) * gu).sum();
  return Scalar(0.5) * std::sqrt(Scalar(std::numbers::pi) / tau) * sum * u.grid().cell_volume();
}

/// sqrt(pi/tau) int psi u G*(psi (1-u)).
template <typename Scalar>
Scalar energy_fac(const IndicatorField<Scalar>& u, const ScalarField<Scalar>& w_half, Scalar tau,
                  SpectralPlan<Scalar>& plan) {
  require_same_grid(u.grid(), w_half.grid(), "energy_fac");
  const auto ua = u.as_array();
  const auto& psi = w_half.values();
  const auto conv = plan.convolve(psi * (Scalar(1) - ua), tau);
  return std::sqrt(Scalar(std::numbers::pi) / tau) * (psi * ua * conv).sum() * u.grid().cell_volume();
}

// ---------------------------------------------------------------------------
// Iteration drivers

namespace detail {

template <typename Scalar>
Scalar energy_for(Algorithm alg, const IndicatorField<Scalar>& u, const Weights<Scalar>& w, Scalar tau,
                  SpectralPlan<Scalar>& plan) {
  return alg == Algorithm::alg1 ? energy_sym(u, w.full, tau, plan) : energy_fac(u, w.half, tau, plan);
}

template <typename Scalar>
ScalarField<Scalar> phi_for(Algorithm alg, const IndicatorField<Scalar>& u, const Weights<Scalar>& w, Scalar tau,
                            SpectralPlan<Scalar>& plan) {
  return alg == Algorithm::alg1 ? phi_alg1(u, w.full, tau, plan) : phi_alg2(u, w.half, tau, plan);
}

template <typename Scalar>
void run_stage(const SolveConfig& cfg, Scalar tau, int stage, IndicatorField<Scalar>& u, const Weights<Scalar>& w,
               SpectralPlan<Scalar>& plan, SolveResult<Scalar>& res) {
  StageSummary summary;
  summary.tau = static_cast<double>(tau);
  std::optional<IndicatorField<Scalar>> previous;
  Scalar e0 = 0;
  Scalar e_prev = 0;
  if (cfg.log_energy) {
    e0 = e_prev = energy_for(cfg.algorithm, u, w, tau, plan);
    res.energy_trace.push_back({stage, static_cast<double>(tau), 0, static_cast<double>(e0), 0});
  }
  for (int k = 1; k <= cfg.max_iter_per_tau; ++k) {
    auto next = threshold(phi_for(cfg.algorithm, u, w, tau, plan));
    const Eigen::Index flipped = hamming(next, u);
    summary.iterations = k;
    if (cfg.log_energy) {
      const Scalar e = energy_for(cfg.algorithm, next, w, tau, plan);
      res.energy_trace.push_back({stage, static_cast<double>(tau), k, static_cast<double>(e), flipped});
      const Scalar slack = Scalar(1e-10) * std::max(Scalar(1), e0);
      if (e > e_prev + slack) {
        if (cfg.algorithm == Algorithm::alg2) {
          if (!res.energy_violation) {
            res.violation_message = "alg2 energy increased at stage " + std::to_string(stage) + " iteration " +
                                    std::to_string(k) + ": " + std::to_string(e_prev) + " -> " + std::to_string(e);
          }
          res.energy_violation = true;
        } else {
          ++res.alg1_energy_increases;
        }
      }
      e_prev = e;
    }
    if (flipped == 0) {
      summary.converged = true;
      break;
    }
    if (previous && next == *previous) {
      summary.cycle = true;
      u = std::move(next);
      break;
    }
    previous = std::move(u);
    u = std::move(next);
  }
  res.stages.push_back(summary);
  res.iterations_per_stage.push_back(summary.iterations);
  res.converged = summary.converged;
  res.cycle_detected = res.cycle_detected || summary.cycle;
}

}  // namespace detail

/// Threshold iteration at fixed cfg.tau until no node changes, a 2-cycle
/// appears, or max_iter_per_tau is reached.
template <typename Scalar>
SolveResult<Scalar> run_fixed_tau(const SolveConfig& cfg, const IndicatorField<Scalar>& u0, const Weights<Scalar>& w,
                                  SpectralPlan<Scalar>& plan) {
  cfg.validate();
  if (!(cfg.tau > 0)) throw std::invalid_argument("tau must be positive");
  if (!cfg.allow_degenerate_init && u0.degenerate()) throw std::invalid_argument("degenerate initial indicator");
  require_same_grid(u0.grid(), plan.grid(), "run_fixed_tau");
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult<Scalar> res;
  IndicatorField<Scalar> u = u0;
  detail::run_stage(cfg, Scalar(cfg.tau), 0, u, w, plan, res);
  res.u_final = std::move(u);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

/// Decreasing-tau continuation: each stage restarts from the previous stage's
/// output; stops early once two consecutive stages agree exactly.
template <typename Scalar>
SolveResult<Scalar> run_adaptive(const SolveConfig& cfg, const IndicatorField<Scalar>& u0, const Weights<Scalar>& w,
                                 SpectralPlan<Scalar>& plan) {
  cfg.validate();
  if (cfg.tau_schedule.empty()) throw std::invalid_argument("adaptive run needs a tau schedule");
  if (!cfg.allow_degenerate_init && u0.degenerate()) throw std::invalid_argument("degenerate initial indicator");
  require_same_grid(u0.grid(), plan.grid(), "run_adaptive");
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult<Scalar> res;
  IndicatorField<Scalar> u = u0;
  for (std::size_t s = 0; s < cfg.tau_schedule.size(); ++s) {
    const IndicatorField<Scalar> before = u;
    detail::run_stage(cfg, Scalar(cfg.tau_schedule[s]), static_cast<int>(s), u, w, plan, res);
    if (s > 0 && u == before) {
      res.stopped_on_identical_stages = true;
      break;
    }
  }
  res.u_final = std::move(u);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

/// G_tau * u, whose 0.5 level set is a smooth stand-in for the jump set of u.
template <typename Scalar>
ScalarField<Scalar> mollify(const IndicatorField<Scalar>& u, Scalar tau, SpectralPlan<Scalar>& plan) {
  return ScalarField<Scalar>(u.grid(), plan.convolve(u.as_array(), tau));
}

}  // namespace thresh
