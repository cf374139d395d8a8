#include "thresh/geometry_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace thresh {

void write_polyline_csv(std::ostream& os, const Polyline2D<double>& poly) {
  os << "loop,x,y\n" << std::setprecision(17);
  std::vector<std::size_t> open;
  for (std::size_t l = 0; l < poly.loops.size(); ++l) {
    for (const auto& v : poly.loops[l].vertices) os << l << ',' << v[0] << ',' << v[1] << '\n';
    if (!poly.loops[l].closed) open.push_back(l);
  }
  if (!open.empty()) {
    os << "# open loops:";
    for (auto l : open) os << ' ' << l;
    os << '\n';
  }
}

Polyline2D<double> read_polyline_csv(std::istream& in) {
  Polyline2D<double> poly;
  std::string line;
  if (!std::getline(in, line) || line != "loop,x,y") throw std::runtime_error("polyline csv: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# open loops:", 0) == 0) {
      std::istringstream ss(line.substr(13));
      std::size_t l;
      while (ss >> l) {
        if (l >= poly.loops.size()) throw std::runtime_error("polyline csv: bad open loop id");
        poly.loops[l].closed = false;
      }
      continue;
    }
    std::istringstream ss(line);
    std::size_t l;
    double x, y;
    char c1, c2;
    if (!(ss >> l >> c1 >> x >> c2 >> y) || c1 != ',' || c2 != ',') {
      throw std::runtime_error("polyline csv: bad row '" + line + "'");
    }
    if (l != poly.loops.size() && l + 1 != poly.loops.size()) throw std::runtime_error("polyline csv: loops out of order");
    if (l == poly.loops.size()) poly.loops.emplace_back();
    poly.loops[l].vertices.emplace_back(x, y);
  }
  return poly;
}

void write_polyline_svg(std::ostream& os, const Polyline2D<double>& poly, double extent,
                        const PointCloud<double>* cloud) {
  const double size = 2 * extent;
  os << std::setprecision(8);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"" << -extent << ' '
     << -extent << ' ' << size << ' ' << size << "\">\n";
  os << "<rect x=\"" << -extent << "\" y=\"" << -extent << "\" width=\"" << size << "\" height=\"" << size
     << "\" fill=\"white\"/>\n";
  os << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke=\"black\" stroke-width=\"" << size / 400 << "\">\n";
  for (const auto& l : poly.loops) {
    os << "<path d=\"";
    for (std::size_t i = 0; i < l.vertices.size(); ++i) {
      os << (i == 0 ? 'M' : 'L') << l.vertices[i][0] << ',' << l.vertices[i][1] << ' ';
    }
    if (l.closed) os << 'Z';
    os << "\"/>\n";
  }
  if (cloud) {
    os << "<g fill=\"red\" stroke=\"none\">\n";
    for (Eigen::Index i = 0; i < cloud->size(); ++i) {
      os << "<circle cx=\"" << cloud->points()(0, i) << "\" cy=\"" << cloud->points()(1, i) << "\" r=\""
         << size / 300 << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</g>\n</svg>\n";
}

void write_obj(std::ostream& os, const TriMesh<double>& mesh) {
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_energy_trace_csv(std::ostream& os, const std::vector<EnergyRecord>& trace) {
  os << "stage,tau,iteration,energy,nodes_flipped\n" << std::setprecision(17);
  for (const auto& r : trace) {
    os << r.stage << ',' << r.tau << ',' << r.iteration << ',' << r.energy << ',' << r.nodes_flipped << '\n';
  }
}

void write_metrics_kv(std::ostream& os, const nlohmann::ordered_json& metrics) {
  for (const auto& [key, value] : metrics.items()) {
    os << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

void write_metrics_jsonl(std::ostream& os, const nlohmann::ordered_json& metrics) { os << metrics.dump() << '\n'; }

}  // namespace thresh
