#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "thresh/cloud.hpp"
#include "thresh/cloud_io.hpp"
#include "thresh/distance.hpp"
#include "thresh/field_io.hpp"
#include "thresh/geometry_io.hpp"
#include "thresh/manifest.hpp"
#include "thresh/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace thresh;

namespace {

enum Exit { kOk = 0, kBadInput = 1, kInternal = 2, kNotConverged = 3 };

/// Bad user input (exit 1), as opposed to internal consistency failures.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
}

template <typename Fn>
void write_text(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

PolarCloudSpec polar_spec(const std::string& shape, int n, int m) {
  PolarCloudSpec s;
  if (shape == "five-fold") {
    s = PolarCloudSpec::five_fold(n);
  } else if (shape == "three-fold") {
    s = PolarCloudSpec::three_fold(n);
  } else if (shape == "m-fold") {
    s = PolarCloudSpec::m_fold(m, n);
  } else {
    throw InputError("unknown polar shape '" + shape + "'");
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return s;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string shape;
  int n = -1;
  int m = 5;
  std::uint64_t seed = 1;
  double mu = 0.0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  PointCloud<double> cloud;
  RunManifest man;
  man.command = "generate";
  bool random = a.mu > 0;
  if (a.shape == "torus") {
    TorusCloudSpec spec;
    spec.n_points = a.n < 0 ? 2000 : a.n;
    spec.seed = a.seed;
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    cloud = gen_torus_cloud(spec);
    random = true;
    man.config["major_radius"] = spec.major_radius;
    man.config["minor_radius"] = spec.minor_radius;
  } else {
    const int n = a.n < 0 ? (a.shape == "three-fold" ? 100 : 200) : a.n;
    const auto spec = polar_spec(a.shape, n, a.m);
    cloud = gen_polar_cloud(spec);
    man.config["amplitude"] = spec.amplitude;
    man.config["phase"] = spec.phase;
    if (spec.shape == PolarShape::m_fold) man.config["m"] = spec.m;
  }
  if (a.mu < 0) throw InputError("--mu must be non-negative");
  if (a.mu > 0) cloud = add_noise(cloud, a.mu, a.seed);

  const std::string out = a.out.empty() ? a.shape + ".csv" : a.out;
  if (fs::path(out).has_parent_path()) ensure_dir(fs::path(out).parent_path());
  const auto t0 = std::chrono::steady_clock::now();
  save_cloud(out, cloud, {"generator " + a.shape, "points " + std::to_string(cloud.size())});

  man.config["generator"] = a.shape;
  man.config["n"] = cloud.size();
  man.config["mu"] = a.mu;
  man.config["out"] = out;
  if (random) man.seed = a.seed;
  man.timings["write"] = seconds_since(t0);
  man.results["points"] = cloud.size();
  man.results["dim"] = cloud.dim();
  man.add_output(out);
  man.write(fs::path(out).replace_extension(".manifest.json").string());
  std::cout << "wrote " << cloud.size() << " points to " << out << '\n';
  return kOk;
}

// ---------------------------------------------------------------- distance

struct DistanceArgs {
  std::string cloud;
  int grid = 128;
  double extent = std::numbers::pi;
  std::string dist;
  SweepConfig sweep;
  std::string out = "distance_out";
};

PointCloud<double> load_input_cloud(const std::string& path) {
  if (path.empty()) throw InputError("--cloud is required");
  try {
    return load_cloud(path, cloud_format_from_path(path));
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

std::optional<DistanceBackend> parse_backend(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s == "brute" ? DistanceBackend::brute : DistanceBackend::sweep;
}

int cmd_distance(const DistanceArgs& a) {
  const auto cloud = load_input_cloud(a.cloud);
  Grid<double> g;
  try {
    g = make_grid(cloud.dim(), a.grid, a.extent);
    require_inside(cloud, g);
    a.sweep.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const fs::path dir(a.out);
  ensure_dir(dir);
  RunManifest man;
  man.command = "distance";
  man.add_input(a.cloud);

  const auto backend = parse_backend(a.dist).value_or(default_backend(cloud, g));
  const auto t0 = std::chrono::steady_clock::now();
  ScalarField<double> d;
  if (backend == DistanceBackend::brute) {
    d = distance_brute(cloud, g);
  } else {
    SweepStats st;
    d = distance_sweep(cloud, g, a.sweep, &st);
    man.results["sweep_rounds"] = st.rounds;
    man.results["sweep_residual"] = st.residual;
  }
  man.timings["distance"] = seconds_since(t0);
  const auto path = (dir / "distance.trf").string();
  write_field(path, d);
  man.config = {{"cloud", a.cloud}, {"grid", a.grid}, {"extent", a.extent}, {"dist", to_string(backend)},
                {"sweep_tolerance", a.sweep.tolerance}, {"sweep_max_rounds", a.sweep.max_rounds},
                {"sweep_freeze_radius", a.sweep.freeze_radius}};
  man.results["max"] = d.values().maxCoeff();
  man.results["min"] = d.values().minCoeff();
  man.add_output(path);
  man.write((dir / "manifest.json").string());
  return kOk;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string cloud;
  int grid = 128;
  double extent = std::numbers::pi;
  int alg = 2;
  double p = 2.0;
  std::optional<double> tau;
  std::string schedule;
  bool no_adaptive = false;
  std::string dist;
  SweepConfig sweep;
  std::string init;
  double radius = 2.0;
  std::vector<double> box;
  std::optional<double> sigma;
  std::uint64_t seed = 1;
  std::string out = "recon_out";
  bool no_energy_log = false;
  std::string iso_source = "mollified";
  int max_iter = 500;
  std::string reference;
  int m = 5;
};

ReconstructConfig build_config(const ReconstructArgs& a, int dim) {
  ReconstructConfig cfg;
  cfg.grid = a.grid;
  cfg.extent = a.extent;
  cfg.algorithm = a.alg == 1 ? Algorithm::alg1 : Algorithm::alg2;
  cfg.p = a.p;
  cfg.adaptive = !a.no_adaptive;
  if (a.tau) cfg.tau = *a.tau;
  if (!a.schedule.empty()) {
    if (a.no_adaptive) throw InputError("--schedule conflicts with --no-adaptive");
    cfg.schedule = parse_schedule(a.schedule);
  } else if (a.tau && !a.no_adaptive) {
    throw InputError("--tau sets a fixed step; combine it with --no-adaptive or use --schedule");
  }
  cfg.backend = parse_backend(a.dist);
  cfg.sweep = a.sweep;
  cfg.log_energy = !a.no_energy_log;
  cfg.iso_source = a.iso_source == "raw" ? IsoSource::raw : IsoSource::mollified;
  cfg.max_iter_per_tau = a.max_iter;

  const double h = 2 * a.extent / a.grid;
  if (a.init == "ball") {
    cfg.init = InitSpec::ball(a.radius);
  } else if (a.init == "box") {
    InitSpec s = InitSpec::box({1.6, 1.6, 0.6});
    if (!a.box.empty()) {
      if (static_cast<int>(a.box.size()) != dim) throw InputError("--box needs one half width per dimension");
      s.half_widths = a.box;
    }
    cfg.init = s;
  } else if (a.init == "levelset") {
    cfg.init = InitSpec::level_set(a.sigma.value_or(cfg.sigma_cells * h));
  } else if (a.sigma) {
    throw InputError("--sigma only applies to --init levelset");
  }
  if (a.sigma && !(*a.sigma > 0)) throw InputError("--sigma must be positive");
  cfg.validate();
  return cfg;
}

json config_json(const ReconstructConfig& cfg, const ReconstructResult& r) {
  json c;
  c["grid"] = cfg.grid;
  c["extent"] = cfg.extent;
  c["alg"] = cfg.algorithm == Algorithm::alg1 ? 1 : 2;
  c["p"] = cfg.p;
  c["adaptive"] = cfg.adaptive;
  if (cfg.adaptive) {
    c["schedule"] = cfg.schedule;
  } else {
    c["tau"] = cfg.tau;
  }
  c["dist"] = to_string(r.backend);
  c["sweep_tolerance"] = cfg.sweep.tolerance;
  c["sweep_max_rounds"] = cfg.sweep.max_rounds;
  c["sweep_freeze_radius"] = cfg.sweep.freeze_radius;
  c["init"] = to_string(r.init.kind);
  switch (r.init.kind) {
    case InitKind::ball:
      c["radius"] = r.init.radius;
      break;
    case InitKind::box:
      c["box"] = std::vector<double>(r.init.half_widths.begin(), r.init.half_widths.begin() + r.grid.dim());
      break;
    case InitKind::level_set:
      c["sigma"] = r.init.sigma;
      break;
  }
  c["energy_log"] = cfg.log_energy;
  c["iso_source"] = to_string(cfg.iso_source);
  c["max_iter"] = cfg.max_iter_per_tau;
  return c;
}

int exit_code_of(const SolveResult<double>& s) {
  if (s.energy_violation) return kInternal;
  if (!s.converged) return kNotConverged;
  return kOk;
}

/// Metrics shared by reconstruct and the bench runs.
json metrics_of(const PointCloud<double>& cloud, const ReconstructConfig& cfg, const ReconstructResult& r) {
  json m;
  const auto& s = r.solve;
  int iters = 0;
  for (int k : s.iterations_per_stage) iters += k;
  m["dim"] = r.grid.dim();
  m["points"] = cloud.size();
  m["grid"] = cfg.grid;
  m["h"] = r.grid.spacing();
  m["alg"] = cfg.algorithm == Algorithm::alg1 ? 1 : 2;
  m["p"] = cfg.p;
  m["stages"] = s.stages.size();
  m["iterations"] = iters;
  m["tau_last"] = r.tau_last;
  m["converged"] = s.converged;
  m["cycle_detected"] = s.cycle_detected;
  m["energy_violation"] = s.energy_violation;
  m["alg1_energy_increases"] = s.alg1_energy_increases;
  if (!s.energy_trace.empty()) m["energy_final"] = s.energy_trace.back().energy;
  m["inside_nodes"] = s.u_final.count();
  if (r.geometry) {
    if (const auto* poly = std::get_if<Polyline2D<double>>(&*r.geometry)) {
      m["loops"] = poly->loops.size();
      m["vertices"] = poly->vertex_count();
      m["length"] = poly->length();
      m["signed_area"] = poly->signed_area();
      m["crosses_seam"] = poly->crosses_seam;
    } else {
      const auto& mesh = std::get<TriMesh<double>>(*r.geometry);
      m["vertices"] = mesh.vertices.size();
      m["triangles"] = mesh.triangles.size();
      m["area"] = mesh.area();
      m["signed_volume"] = mesh.signed_volume();
      m["crosses_seam"] = mesh.crosses_seam;
    }
  } else {
    m["geometry_error"] = r.geometry_error;
  }
  return m;
}

/// Adds error against a named reference shape to the metrics.
void add_reference_metrics(json& m, const ReconstructResult& r, const std::string& reference, int mfold) {
  if (reference.empty() || !r.geometry) return;
  const double h = r.grid.spacing();
  if (reference == "torus") {
    const auto* mesh = std::get_if<TriMesh<double>>(&*r.geometry);
    if (!mesh) throw InputError("--reference torus needs a 3D cloud");
    const TorusCloudSpec t;
    const double rms = torus_residual_rms(*mesh, t.major_radius, t.minor_radius);
    m["torus_rms"] = rms;
    m["torus_rms_h"] = rms / h;
    return;
  }
  if (r.grid.dim() != 2) throw InputError("--reference " + reference + " needs a 2D cloud");
  const auto spec = polar_spec(reference, 200, mfold);
  const auto hd = geometry_hausdorff(*r.geometry, sample_polar_curve<double>(spec));
  m["reference"] = spec.name();
  m["hausdorff"] = hd.distance;
  m["hausdorff_h"] = hd.distance / h;
}

/// Writes every artifact of a reconstruction into dir; returns the manifest
/// so the caller can add to it before writing.
RunManifest write_run(const fs::path& dir, const std::string& command, const std::string& cloud_path,
                      const PointCloud<double>& cloud, const ReconstructConfig& cfg, const ReconstructResult& r,
                      const json& metrics, bool write_field_dump = true) {
  ensure_dir(dir);
  RunManifest man;
  man.command = command;
  man.config = config_json(cfg, r);
  if (!cloud_path.empty()) {
    man.config["cloud"] = cloud_path;
    man.add_input(cloud_path);
  }
  man.timings = {{"distance", r.times.distance}, {"weights", r.times.weights}, {"init", r.times.init},
                 {"solve", r.times.solve}, {"extract", r.times.extract}};
  if (cfg.p_outside_recommended()) man.flags["p_outside_recommended_range"] = true;
  man.flags["converged"] = r.solve.converged;
  man.flags["energy_violation"] = r.solve.energy_violation;
  if (r.solve.energy_violation) man.flags["violation_message"] = r.solve.violation_message;
  man.flags["crosses_seam"] = metrics.value("crosses_seam", false);
  man.results = metrics;
  man.exit_code = exit_code_of(r.solve);

  if (write_field_dump) {
    const auto path = (dir / "u_final.trf").string();
    write_field(path, r.solve.u_final);
    man.add_output(path);
  }
  const auto trace = (dir / "energy_trace.csv").string();
  write_text(trace, [&](std::ostream& os) { write_energy_trace_csv(os, r.solve.energy_trace); });
  man.add_output(trace);
  if (r.geometry) {
    if (const auto* poly = std::get_if<Polyline2D<double>>(&*r.geometry)) {
      const auto csv = (dir / "curve.csv").string();
      const auto svg = (dir / "curve.svg").string();
      write_text(csv, [&](std::ostream& os) { write_polyline_csv(os, *poly); });
      write_text(svg, [&](std::ostream& os) { write_polyline_svg(os, *poly, cfg.extent, &cloud); });
      man.add_output(csv);
      man.add_output(svg);
    } else {
      const auto obj = (dir / "surface.obj").string();
      write_text(obj, [&](std::ostream& os) { write_obj(os, std::get<TriMesh<double>>(*r.geometry)); });
      man.add_output(obj);
    }
  }
  const auto kv = (dir / "metrics.txt").string();
  const auto jl = (dir / "metrics.jsonl").string();
  write_text(kv, [&](std::ostream& os) { write_metrics_kv(os, metrics); });
  write_text(jl, [&](std::ostream& os) { write_metrics_jsonl(os, metrics); });
  man.add_output(kv);
  man.add_output(jl);
  return man;
}

int cmd_reconstruct(const ReconstructArgs& a) {
  const auto cloud = load_input_cloud(a.cloud);
  ReconstructConfig cfg;
  try {
    cfg = build_config(a, cloud.dim());
    require_inside(cloud, make_grid(cloud.dim(), cfg.grid, cfg.extent));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (cfg.p_outside_recommended()) {
    std::cerr << "warning: p = " << cfg.p << " is outside the recommended range p >= 2\n";
  }
  ReconstructResult r;
  try {
    r = reconstruct(cloud, cfg);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  auto metrics = metrics_of(cloud, cfg, r);
  add_reference_metrics(metrics, r, a.reference, a.m);
  const fs::path dir(a.out);
  auto man = write_run(dir, "reconstruct", a.cloud, cloud, cfg, r, metrics);
  man.seed = a.seed;
  man.write((dir / "manifest.json").string());
  write_metrics_kv(std::cout, metrics);
  if (r.solve.energy_violation) std::cerr << "error: " << r.solve.violation_message << '\n';
  if (!r.solve.converged) std::cerr << "warning: iteration did not converge\n";
  return man.exit_code;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string suite;
  std::string out = "bench_out";
  std::uint64_t seed = 1;
};

/// One row of a suite's results table.
struct BenchRow {
  std::string run;
  std::string param;
  json metrics;
  PhaseTimes times;
  double wall = 0;
  int exit_code = 0;
};

class Bench {
 public:
  Bench(std::string suite, fs::path dir, std::uint64_t seed) : suite_(std::move(suite)), dir_(std::move(dir)), seed_(seed) {
    ensure_dir(dir_);
  }

  /// Runs one case, writes its directory and manifest, and records a row.
  const ReconstructResult& run(const std::string& id, const std::string& param, const PointCloud<double>& cloud,
                               const ReconstructConfig& cfg, const std::optional<PolarCloudSpec>& reference,
                               bool torus_reference = false, std::optional<std::uint64_t> seed = std::nullopt) {
    const fs::path run_dir = dir_ / id;
    ensure_dir(run_dir);
    const auto cloud_path = (run_dir / "cloud.csv").string();
    save_cloud(cloud_path, cloud);
    const auto t0 = std::chrono::steady_clock::now();
    last_ = reconstruct(cloud, cfg);
    const double wall = seconds_since(t0);
    auto m = metrics_of(cloud, cfg, last_);
    if (reference && last_.geometry) {
      const auto hd = geometry_hausdorff(*last_.geometry, sample_polar_curve<double>(*reference));
      m["hausdorff"] = hd.distance;
      m["hausdorff_h"] = hd.distance / last_.grid.spacing();
    }
    if (torus_reference) add_reference_metrics(m, last_, "torus", 0);
    m["wall_s"] = wall;
    auto man = write_run(run_dir, "bench " + suite_ + " " + id, cloud_path, cloud, cfg, last_, m);
    man.seed = seed;
    man.timings["wall"] = wall;
    man.write((run_dir / "manifest.json").string());
    rows_.push_back({id, param, m, last_.times, wall, man.exit_code});
    std::cout << suite_ << ' ' << id << ": wall " << wall << " s";
    if (m.contains("hausdorff_h")) std::cout << ", hausdorff " << m["hausdorff_h"].get<double>() << " h";
    if (m.contains("torus_rms_h")) std::cout << ", torus rms " << m["torus_rms_h"].get<double>() << " h";
    std::cout << '\n';
    return last_;
  }

  void add_output(const std::string& path) { extra_outputs_.push_back(path); }

  /// Writes results.csv and the suite manifest. Returns the worst exit code.
  int finish(const json& config) {
    const auto path = (dir_ / "results.csv").string();
    write_text(path, [&](std::ostream& os) {
      os.precision(10);
      os << "suite,run,param,grid,alg,p,stages,iterations,converged,energy_final,hausdorff,hausdorff_h,torus_rms_h,"
            "t_distance,t_solve,t_extract,wall_s,exit_code\n";
      for (const auto& r : rows_) {
        const auto num = [&](const char* k) { return r.metrics.contains(k) ? r.metrics[k].dump() : std::string(); };
        os << suite_ << ',' << r.run << ',' << r.param << ',' << num("grid") << ',' << num("alg") << ',' << num("p")
           << ',' << num("stages") << ',' << num("iterations") << ',' << num("converged") << ','
           << num("energy_final") << ',' << num("hausdorff") << ',' << num("hausdorff_h") << ','
           << num("torus_rms_h") << ',' << r.times.distance << ',' << r.times.solve << ',' << r.times.extract << ','
           << r.wall << ',' << r.exit_code << '\n';
      }
    });
    RunManifest man;
    man.command = "bench " + suite_;
    man.config = config;
    man.seed = seed_;
    int code = kOk;
    for (const auto& r : rows_) {
      man.add_output((dir_ / r.run / "manifest.json").string());
      man.timings[r.run] = r.wall;
      if (r.exit_code == kInternal || (r.exit_code == kNotConverged && code == kOk)) code = r.exit_code;
    }
    man.add_output(path);
    for (const auto& o : extra_outputs_) man.add_output(o);
    man.exit_code = code;
    man.write((dir_ / "manifest.json").string());
    return code;
  }

  const fs::path& dir() const { return dir_; }

 private:
  std::string suite_;
  fs::path dir_;
  std::uint64_t seed_;
  ReconstructResult last_;
  std::vector<BenchRow> rows_;
  std::vector<std::string> extra_outputs_;
};

std::string param(const char* name, double v) {
  std::ostringstream os;
  os << name << '=' << v;
  return os.str();
}

/// Schedule used by the 2D accuracy suites: 0.01 halved five times.
ReconstructConfig suite_config(int grid = 128) {
  ReconstructConfig cfg;
  cfg.grid = grid;
  cfg.schedule = SolveConfig::halving_schedule(0.01, 6);
  cfg.log_energy = false;
  return cfg;
}

int bench_mfold_runtime(Bench& b) {
  for (int m = 3; m <= 8; ++m) {
    const auto spec = PolarCloudSpec::m_fold(m, 200);
    b.run("m" + std::to_string(m), param("m", m), gen_polar_cloud(spec), suite_config(), spec);
  }
  return b.finish({{"suite", "mfold-runtime"}, {"n", 200}, {"grid", 128}, {"schedule", "0.01:6"}});
}

int bench_energy_decay(Bench& b) {
  const auto spec = PolarCloudSpec::three_fold(100);
  const auto cloud = gen_polar_cloud(spec);
  for (int alg : {1, 2}) {
    for (double tau : {0.02, 0.01, 0.005}) {
      auto cfg = suite_config();
      cfg.algorithm = alg == 1 ? Algorithm::alg1 : Algorithm::alg2;
      cfg.adaptive = false;
      cfg.tau = tau;
      cfg.log_energy = true;
      std::ostringstream id;
      id << "alg" << alg << "_tau" << tau;
      b.run(id.str(), param("tau", tau), cloud, cfg, spec);
    }
  }
  return b.finish({{"suite", "energy-decay"}, {"n", 100}, {"grid", 128}, {"taus", {0.02, 0.01, 0.005}}});
}

int bench_p_sweep(Bench& b) {
  const auto spec = PolarCloudSpec::five_fold(200);
  const auto cloud = gen_polar_cloud(spec);
  std::vector<std::pair<int, Geometry>> geoms;
  double h = 0;
  for (int p = 1; p <= 5; ++p) {
    auto cfg = suite_config();
    cfg.p = p;
    const auto& r = b.run("p" + std::to_string(p), param("p", p), cloud, cfg, spec);
    h = r.grid.spacing();
    if (r.geometry) geoms.emplace_back(p, *r.geometry);
  }
  const auto path = (b.dir() / "pairwise_hausdorff.csv").string();
  write_text(path, [&](std::ostream& os) {
    os.precision(10);
    os << "p_a,p_b,hausdorff,hausdorff_h\n";
    for (std::size_t i = 0; i < geoms.size(); ++i) {
      for (std::size_t j = i + 1; j < geoms.size(); ++j) {
        const double d = geometry_hausdorff(geoms[i].second, geoms[j].second).distance;
        os << geoms[i].first << ',' << geoms[j].first << ',' << d << ',' << d / h << '\n';
      }
    }
  });
  b.add_output(path);
  return b.finish({{"suite", "p-sweep"}, {"n", 200}, {"grid", 128}, {"p", {1, 2, 3, 4, 5}}, {"schedule", "0.01:6"}});
}

int bench_noise_sweep(Bench& b, std::uint64_t seed) {
  const auto spec = PolarCloudSpec::five_fold(200);
  const auto clean = gen_polar_cloud(spec);
  for (double mu : {0.0, 0.01, 0.02, 0.04, 0.08}) {
    std::ostringstream id;
    id << "mu" << mu;
    b.run(id.str(), param("mu", mu), add_noise(clean, mu, seed), suite_config(), spec, false, seed);
  }
  return b.finish({{"suite", "noise-sweep"}, {"n", 200}, {"grid", 128}, {"mu", {0.0, 0.01, 0.02, 0.04, 0.08}},
                   {"schedule", "0.01:6"}});
}

int bench_resolution_sweep(Bench& b) {
  const auto spec = PolarCloudSpec::five_fold(200);
  const auto cloud = gen_polar_cloud(spec);
  for (int n : {64, 128, 256}) b.run("n" + std::to_string(n), param("grid", n), cloud, suite_config(n), spec);
  return b.finish({{"suite", "resolution-sweep"}, {"n", 200}, {"grids", {64, 128, 256}}, {"schedule", "0.01:6"}});
}

int bench_torus(Bench& b, std::uint64_t seed) {
  TorusCloudSpec t;
  t.seed = seed;
  ReconstructConfig cfg;
  cfg.grid = 64;
  cfg.init = InitSpec::box({1.6, 1.6, 0.6});
  cfg.schedule = SolveConfig::halving_schedule(0.02, 4);
  cfg.log_energy = false;
  b.run("torus64", "grid=64", gen_torus_cloud(t), cfg, std::nullopt, true, seed);
  return b.finish({{"suite", "torus-3d"}, {"n", t.n_points}, {"grid", 64}, {"init", "box"}, {"schedule", "0.02:4"}});
}

int cmd_bench(const BenchArgs& a) {
  Bench b(a.suite, fs::path(a.out) / a.suite, a.seed);
  if (a.suite == "mfold-runtime") return bench_mfold_runtime(b);
  if (a.suite == "energy-decay") return bench_energy_decay(b);
  if (a.suite == "p-sweep") return bench_p_sweep(b);
  if (a.suite == "noise-sweep") return bench_noise_sweep(b, a.seed);
  if (a.suite == "resolution-sweep") return bench_resolution_sweep(b);
  if (a.suite == "torus-3d") return bench_torus(b, a.seed);
  throw InputError("unknown suite '" + a.suite + "'");
}

void add_sweep_flags(CLI::App* cmd, SweepConfig& s) {
  cmd->add_option("--sweep-tol", s.tolerance, "Fast sweeping stop tolerance (<= 0: 1e-6 h)");
  cmd->add_option("--sweep-rounds", s.max_rounds, "Fast sweeping round limit");
  cmd->add_option("--freeze-radius", s.freeze_radius, "Cells around each point initialised exactly");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point cloud surface reconstruction by threshold dynamics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a synthetic point cloud");
  gen->add_option("shape", ga.shape, "five-fold, three-fold, m-fold or torus")
      ->required()
      ->check(CLI::IsMember({"five-fold", "three-fold", "m-fold", "torus"}));
  gen->add_option("--n", ga.n, "Number of points (default 200, three-fold 100, torus 2000)");
  gen->add_option("--m", ga.m, "Lobe count for m-fold");
  gen->add_option("--seed", ga.seed, "Seed for torus sampling and noise");
  gen->add_option("--mu", ga.mu, "Noise intensity");
  gen->add_option("--out", ga.out, "Output CSV (default <shape>.csv)");

  DistanceArgs da;
  auto* dist = app.add_subcommand("distance", "Compute the distance field of a cloud");
  dist->add_option("--cloud", da.cloud, "Cloud file (.csv or .xyz)")->required();
  dist->add_option("--grid", da.grid, "Nodes per axis");
  dist->add_option("--extent", da.extent, "Domain half width");
  dist->add_option("--dist", da.dist, "Backend")->check(CLI::IsMember({"brute", "sweep"}));
  add_sweep_flags(dist, da.sweep);
  dist->add_option("--out", da.out, "Output directory");

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a curve or surface from a cloud");
  rec->add_option("--cloud", ra.cloud, "Cloud file (.csv or .xyz)")->required();
  rec->add_option("--grid", ra.grid, "Nodes per axis");
  rec->add_option("--extent", ra.extent, "Domain half width");
  rec->add_option("--alg", ra.alg, "1: symmetric energy, 2: factored energy")->check(CLI::IsMember({1, 2}));
  rec->add_option("--p", ra.p, "Distance exponent");
  rec->add_option("--tau", ra.tau, "Fixed step (with --no-adaptive)");
  rec->add_option("--schedule", ra.schedule, "t1:k (t1 halved k-1 times) or a comma list; default 0.01:6");
  rec->add_flag("--no-adaptive", ra.no_adaptive, "Single fixed tau");
  rec->add_option("--dist", ra.dist, "Distance backend")->check(CLI::IsMember({"brute", "sweep"}));
  add_sweep_flags(rec, ra.sweep);
  rec->add_option("--init", ra.init, "Initial guess")->check(CLI::IsMember({"ball", "box", "levelset"}));
  rec->add_option("--radius", ra.radius, "Ball radius for --init ball");
  rec->add_option("--box", ra.box, "Box half widths for --init box")->expected(2, 3);
  rec->add_option("--sigma", ra.sigma, "Level-set sigma for --init levelset (default 4h)");
  rec->add_option("--seed", ra.seed, "Echoed into the manifest");
  rec->add_option("--out", ra.out, "Output directory");
  rec->add_flag("--no-energy-log", ra.no_energy_log, "Skip per-iteration energy evaluation");
  rec->add_option("--iso-source", ra.iso_source, "Field for extraction")->check(CLI::IsMember({"raw", "mollified"}));
  rec->add_option("--max-iter", ra.max_iter, "Iteration limit per tau");
  rec->add_option("--reference", ra.reference, "Analytic shape for error metrics")
      ->check(CLI::IsMember({"five-fold", "three-fold", "m-fold", "torus"}));
  rec->add_option("--m", ra.m, "Lobe count for --reference m-fold");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run an experiment suite");
  bench->add_option("suite", ba.suite, "mfold-runtime, energy-decay, p-sweep, noise-sweep, resolution-sweep, torus-3d")
      ->required();
  bench->add_option("--out", ba.out, "Output directory (a subdirectory per suite)");
  bench->add_option("--seed", ba.seed, "Seed for noise and torus sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*gen) return cmd_generate(ga);
    if (*dist) return cmd_distance(da);
    if (*rec) return cmd_reconstruct(ra);
    if (*bench) return cmd_bench(ba);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}
