#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "thresh/cloud.hpp"
#include "thresh/extract.hpp"
#include "thresh/solver.hpp"

namespace thresh {

/// Header "loop,x,y", one row per vertex; loops are implicitly closed unless
/// listed in a trailing "# open loops:" comment.
void write_polyline_csv(std::ostream& os, const Polyline2D<double>& poly);
Polyline2D<double> read_polyline_csv(std::istream& in);

/// Loops as SVG paths over [-extent, extent]^2 (y up), optional cloud as dots.
void write_polyline_svg(std::ostream& os, const Polyline2D<double>& poly, double extent,
                        const PointCloud<double>* cloud = nullptr);

/// ASCII OBJ with "v" and 1-based "f" records.
void write_obj(std::ostream& os, const TriMesh<double>& mesh);

/// Header "stage,tau,iteration,energy,nodes_flipped".
void write_energy_trace_csv(std::ostream& os, const std::vector<EnergyRecord>& trace);

/// One "key=value" line per member of a flat JSON object.
void write_metrics_kv(std::ostream& os, const nlohmann::ordered_json& metrics);
/// The object as a single JSON line.
void write_metrics_jsonl(std::ostream& os, const nlohmann::ordered_json& metrics);

}  // namespace thresh
