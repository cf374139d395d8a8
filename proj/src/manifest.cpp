#include "thresh/manifest.hpp"

#include <Eigen/Core>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "thresh/marching_tables.hpp"
#include "thresh/random.hpp"

namespace thresh {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fnv1a_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex64(fnv1a(bytes));
}

nlohmann::ordered_json version_info() {
  nlohmann::ordered_json v;
  v["program"] = std::string("thresh_recon ") + kVersion;
  v["compiler"] = __VERSION__;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["fft"] = "Eigen::FFT (kissfft)";
  v["rng"] = Rng::kAlgorithm;
  v["marching_cubes_table"] = hex64(marching::cube_table_hash());
  return v;
}

void RunManifest::add_input(const std::string& path) { inputs[path] = fnv1a_file_hex(path); }

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["exit_code"] = exit_code;
  j["config"] = config;
  j["inputs"] = inputs;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["versions"] = version_info();
  j["timings_s"] = timings;
  j["flags"] = flags;
  j["results"] = results;
  j["outputs"] = outputs;
  return j;
}

void RunManifest::write(const std::string& path) const {
  for (const auto& o : outputs) {
    if (!std::filesystem::exists(o)) throw std::logic_error("manifest lists missing output " + o);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace thresh
