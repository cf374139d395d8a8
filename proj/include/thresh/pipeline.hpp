#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "thresh/cloud.hpp"
#include "thresh/distance.hpp"
#include "thresh/extract.hpp"
#include "thresh/solver.hpp"

namespace thresh {

enum class IsoSource { raw, mollified };

/// Parses "t1:k" (t1 halved k - 1 times) or a comma list "0.02,0.01,...".
std::vector<double> parse_schedule(const std::string& text);

struct ReconstructConfig {
  int grid = 128;
  double extent = std::numbers::pi;
  Algorithm algorithm = Algorithm::alg2;
  double p = 2.0;
  /// Used when adaptive is false.
  double tau = 0.0025;
  /// 0.01 halved five times.
  std::vector<double> schedule{0.01, 0.005, 0.0025, 0.00125, 0.000625, 0.0003125};
  bool adaptive = true;
  /// Unset: brute force or sweeping by problem size.
  std::optional<DistanceBackend> backend;
  SweepConfig sweep;
  /// Unset: ball of radius 2 in 2D, sigma level set in 3D.
  std::optional<InitSpec> init;
  /// Level-set sigma in units of h when the init is a level set without sigma.
  double sigma_cells = 4.0;
  bool log_energy = true;
  IsoSource iso_source = IsoSource::mollified;
  int max_iter_per_tau = 500;
  /// Test hook: replace the distance weights by 1 (plain curvature flow).
  bool unit_weight = false;

  void validate() const;
  /// p < 2 is accepted but outside the recommended range.
  bool p_outside_recommended() const { return p < 2.0; }
};

struct PhaseTimes {
  double distance = 0;
  double weights = 0;
  double init = 0;
  double solve = 0;
  double extract = 0;
};

using Geometry = std::variant<Polyline2D<double>, TriMesh<double>>;

struct ReconstructResult {
  Grid<double> grid;
  ScalarField<double> distance;
  DistanceBackend backend = DistanceBackend::brute;
  std::optional<SweepStats> sweep_stats;
  InitSpec init;
  IndicatorField<double> u0;
  SolveResult<double> solve;
  /// Last tau actually run; used for the mollified extraction.
  double tau_last = 0;
  /// Empty when the final indicator is all 0 or all 1.
  std::optional<Geometry> geometry;
  std::string geometry_error;
  PhaseTimes times;
};

/// Default initial guess for a grid of the given dimension.
InitSpec default_init(int dim, double h, double sigma_cells);

/// The field whose 0.5 level set is extracted.
ScalarField<double> extraction_field(const IndicatorField<double>& u, IsoSource source, double tau_last,
                                     SpectralPlan<double>& plan);

Geometry extract_geometry(const ScalarField<double>& field, double iso = 0.5);

/// d once, weights, init, threshold iterations, extraction.
ReconstructResult reconstruct(const PointCloud<double>& cloud, const ReconstructConfig& cfg);

/// Symmetric Hausdorff distance from extracted geometry to sampled reference points.
HausdorffResult geometry_hausdorff(const Geometry& a, const Samples<double>& reference);
HausdorffResult geometry_hausdorff(const Geometry& a, const Geometry& b);

/// RMS over mesh vertices of the distance to the torus with radii (big, small)
/// around the z axis: | sqrt((rho - big)^2 + z^2) - small |.
double torus_residual_rms(const TriMesh<double>& mesh, double big, double small);

const char* to_string(DistanceBackend b);
const char* to_string(IsoSource s);
const char* to_string(InitKind k);

}  // namespace thresh
