#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace thresh {

inline constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(std::string_view bytes);
/// FNV-1a of a file's bytes as 16 hex digits.
std::string fnv1a_file_hex(const std::string& path);
std::string hex64(std::uint64_t v);

/// Program, compiler, Eigen, RNG and marching-table identifiers.
nlohmann::ordered_json version_info();

/// What a command did: config echo, input hashes, seed, versions, phase
/// timings and every file it wrote. Written last.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();  // path -> hash
  std::optional<std::uint64_t> seed;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  nlohmann::ordered_json flags = nlohmann::ordered_json::object();
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<std::string> outputs;
  int exit_code = 0;

  void add_input(const std::string& path);
  void add_output(const std::string& path) { outputs.push_back(path); }
  nlohmann::ordered_json to_json() const;
  /// Checks every listed output exists, then writes the manifest itself.
  void write(const std::string& path) const;
};

}  // namespace thresh
