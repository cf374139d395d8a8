#include "thresh/pipeline.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace thresh {

namespace {

double parse_double(const std::string& s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const double t1 = parse_double(trim(text.substr(0, colon)));
    const std::string count = trim(text.substr(colon + 1));
    int k = 0;
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), k);
    if (ec != std::errc() || ptr != count.data() + count.size()) {
      throw std::invalid_argument("schedule count is not an integer: '" + count + "'");
    }
    out = SolveConfig::halving_schedule(t1, k);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto item = trim(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (item.empty()) throw std::invalid_argument("empty entry in tau schedule '" + text + "'");
      out.push_back(parse_double(item));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  SolveConfig check;
  check.tau_schedule = out;
  check.validate();
  return out;
}

void ReconstructConfig::validate() const {
  if (grid < 8) throw std::invalid_argument("grid must be >= 8");
  if (!(extent > 0)) throw std::invalid_argument("extent must be positive");
  if (!(p > 0)) throw std::invalid_argument("p must be positive");
  if (max_iter_per_tau < 1) throw std::invalid_argument("max_iter_per_tau must be >= 1");
  if (adaptive) {
    if (schedule.empty()) throw std::invalid_argument("adaptive run needs a tau schedule");
    SolveConfig c;
    c.tau_schedule = schedule;
    c.validate();
  } else if (!(tau > 0)) {
    throw std::invalid_argument("tau must be positive");
  }
  if (!(sigma_cells > 0)) throw std::invalid_argument("sigma must be positive");
  sweep.validate();
}

InitSpec default_init(int dim, double h, double sigma_cells) {
  if (dim == 2) return InitSpec::ball(2.0);
  return InitSpec::level_set(sigma_cells * h);
}

ScalarField<double> extraction_field(const IndicatorField<double>& u, IsoSource source, double tau_last,
                                     SpectralPlan<double>& plan) {
  if (source == IsoSource::raw) return ScalarField<double>(u.grid(), u.as_array());
  return mollify(u, tau_last, plan);
}

Geometry extract_geometry(const ScalarField<double>& field, double iso) {
  if (field.grid().dim() == 2) return extract_iso_2d(field, iso);
  return extract_iso_3d(field, iso);
}

ReconstructResult reconstruct(const PointCloud<double>& cloud, const ReconstructConfig& cfg) {
  cfg.validate();
  ReconstructResult res;
  res.grid = make_grid(cloud.dim(), cfg.grid, cfg.extent);
  const auto& g = res.grid;
  require_inside(cloud, g);

  auto t0 = std::chrono::steady_clock::now();
  res.backend = cfg.backend.value_or(default_backend(cloud, g));
  if (res.backend == DistanceBackend::brute) {
    res.distance = distance_brute(cloud, g);
  } else {
    SweepStats st;
    res.distance = distance_sweep(cloud, g, cfg.sweep, &st);
    res.sweep_stats = st;
  }
  res.times.distance = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto weights = cfg.unit_weight ? Weights<double>::constant(g)
                                       : Weights<double>::from_distance(res.distance, cfg.p);
  res.times.weights = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  res.init = cfg.init.value_or(default_init(g.dim(), g.spacing(), cfg.sigma_cells));
  if (res.init.kind == InitKind::level_set && !(res.init.sigma > 0)) res.init.sigma = cfg.sigma_cells * g.spacing();
  res.u0 = init_guess(res.init, g, &res.distance);
  res.times.init = seconds_since(t0);

  SpectralPlan<double> plan(g);
  SolveConfig sc;
  sc.algorithm = cfg.algorithm;
  sc.p = cfg.p;
  sc.tau = cfg.tau;
  sc.tau_schedule = cfg.schedule;
  sc.max_iter_per_tau = cfg.max_iter_per_tau;
  sc.log_energy = cfg.log_energy;
  t0 = std::chrono::steady_clock::now();
  if (cfg.adaptive) {
    res.solve = run_adaptive(sc, res.u0, weights, plan);
    res.tau_last = cfg.schedule[res.solve.stages.size() - 1];
  } else {
    res.solve = run_fixed_tau(sc, res.u0, weights, plan);
    res.tau_last = cfg.tau;
  }
  res.times.solve = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  if (res.solve.u_final.degenerate()) {
    res.geometry_error = "final indicator is all " + std::string(res.solve.u_final.count() == 0 ? "0" : "1");
  } else {
    try {
      res.geometry = extract_geometry(extraction_field(res.solve.u_final, cfg.iso_source, res.tau_last, plan));
    } catch (const EmptyLevelSet& e) {
      res.geometry_error = e.what();
    }
  }
  res.times.extract = seconds_since(t0);
  return res;
}

namespace {

Samples<double> geometry_samples(const Geometry& g) {
  return std::visit([](const auto& x) { return samples_of(x); }, g);
}

}  // namespace

HausdorffResult geometry_hausdorff(const Geometry& a, const Samples<double>& reference) {
  return hausdorff<double>(geometry_samples(a), reference);
}

HausdorffResult geometry_hausdorff(const Geometry& a, const Geometry& b) {
  return hausdorff<double>(geometry_samples(a), geometry_samples(b));
}

double torus_residual_rms(const TriMesh<double>& mesh, double big, double small) {
  if (mesh.vertices.empty()) throw std::invalid_argument("torus residual of an empty mesh");
  double s = 0;
  for (const auto& v : mesh.vertices) {
    const double r = std::sqrt(std::pow(std::hypot(v[0], v[1]) - big, 2) + v[2] * v[2]) - small;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(mesh.vertices.size()));
}

const char* to_string(DistanceBackend b) { return b == DistanceBackend::brute ? "brute" : "sweep"; }
const char* to_string(IsoSource s) { return s == IsoSource::raw ? "raw" : "mollified"; }
const char* to_string(InitKind k) {
  switch (k) {
    case InitKind::box:
      return "box";
    case InitKind::ball:
      return "ball";
    case InitKind::level_set:
      return "levelset";
  }
  return "?";
}

}  // namespace thresh
