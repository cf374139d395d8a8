#include "thresh/cloud_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace thresh {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

bool parse_number(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

PointCloud<double> parse_cloud(std::istream& in, const std::string& source) {
  std::vector<double> coords;
  int dim = 0;
  int lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tokens = split_row(line);
    if (dim == 0) {
      dim = static_cast<int>(tokens.size());
      if (dim != 2 && dim != 3) {
        throw ParseError(source, lineno, "expected 2 or 3 columns, found " + std::to_string(dim));
      }
    } else if (static_cast<int>(tokens.size()) != dim) {
      throw ParseError(source, lineno,
                       "ragged row: expected " + std::to_string(dim) + " columns, found " +
                           std::to_string(tokens.size()));
    }
    for (const auto& tok : tokens) {
      double v = 0.0;
      if (!parse_number(tok, v)) throw ParseError(source, lineno, "non-numeric token '" + tok + "'");
      coords.push_back(v);
    }
  }
  if (coords.empty()) throw ParseError(source, lineno, "no points");
  const auto n = static_cast<Eigen::Index>(coords.size()) / dim;
  PointCloud<double>::Matrix pts = Eigen::Map<const PointCloud<double>::Matrix>(coords.data(), dim, n);
  return PointCloud<double>(std::move(pts));
}

PointCloud<double> load_cloud(const std::string& path, CloudFormat) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point cloud " + path);
  return parse_cloud(in, path);
}

void write_cloud(std::ostream& os, const PointCloud<double>& cloud,
                 const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << std::setprecision(17);
  for (Eigen::Index j = 0; j < cloud.size(); ++j) {
    for (int a = 0; a < cloud.dim(); ++a) os << (a ? "," : "") << cloud.points()(a, j);
    os << '\n';
  }
}

void save_cloud(const std::string& path, const PointCloud<double>& cloud,
                const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_cloud(out, cloud, comments);
}

CloudFormat cloud_format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".xyz") return CloudFormat::xyz;
  return CloudFormat::csv;
}

}  // namespace thresh
