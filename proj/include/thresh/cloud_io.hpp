#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "thresh/cloud.hpp"

namespace thresh {

enum class CloudFormat { csv, xyz };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Rows of 2 or 3 numbers separated by commas and/or whitespace. Blank lines
/// and lines starting with '#' are skipped. Both formats share this grammar.
PointCloud<double> parse_cloud(std::istream& in, const std::string& source = "<stream>");
PointCloud<double> load_cloud(const std::string& path, CloudFormat format = CloudFormat::csv);

/// CSV with optional '#' comment lines (e.g. generator spec and seed) first.
void write_cloud(std::ostream& os, const PointCloud<double>& cloud,
                 const std::vector<std::string>& comments = {});
void save_cloud(const std::string& path, const PointCloud<double>& cloud,
                const std::vector<std::string>& comments = {});

CloudFormat cloud_format_from_path(const std::string& path);

}  // namespace thresh
