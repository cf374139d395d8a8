#pragma once

// Binary field container ("TRF1"):
//   bytes 0..3   magic "TRF1"
//   int64 LE     dim
//   int64 LE     cells per axis
//   float64 LE   extent
//   payload      float64 LE per node (scalar fields) or one byte 0/1 per node
//                (indicator fields), row-major with the last axis fastest.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "thresh/grid.hpp"

namespace thresh {

namespace detail {

inline void put_u64_le(std::vector<char>& buf, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline std::uint64_t get_u64_le(const char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(p[b]);
  return v;
}

inline void put_f64_le(std::vector<char>& buf, double v) { put_u64_le(buf, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64_le(const char* p) { return std::bit_cast<double>(get_u64_le(p)); }

template <typename Scalar>
std::vector<char> trf_header(const Grid<Scalar>& g) {
  std::vector<char> buf{'T', 'R', 'F', '1'};
  put_u64_le(buf, static_cast<std::uint64_t>(g.dim()));
  put_u64_le(buf, static_cast<std::uint64_t>(g.cells_per_axis()));
  put_f64_le(buf, static_cast<double>(g.extent()));
  return buf;
}

inline constexpr std::size_t kTrfHeaderBytes = 4 + 8 + 8 + 8;

inline std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void spit(const std::string& path, const std::vector<char>& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

template <typename Scalar>
Grid<Scalar> parse_trf_header(const std::vector<char>& buf, const std::string& path) {
  if (buf.size() < kTrfHeaderBytes || std::memcmp(buf.data(), "TRF1", 4) != 0) {
    throw std::runtime_error(path + ": not a TRF1 field dump");
  }
  const auto dim = static_cast<int>(get_u64_le(buf.data() + 4));
  const auto n = static_cast<int>(get_u64_le(buf.data() + 12));
  const double extent = get_f64_le(buf.data() + 20);
  return Grid<Scalar>(dim, n, static_cast<Scalar>(extent));
}

}  // namespace detail

template <typename Scalar>
std::vector<char> encode_field(const ScalarField<Scalar>& f) {
  auto buf = detail::trf_header(f.grid());
  buf.reserve(buf.size() + static_cast<std::size_t>(f.values().size()) * 8);
  for (Eigen::Index i = 0; i < f.values().size(); ++i) detail::put_f64_le(buf, static_cast<double>(f[i]));
  return buf;
}

template <typename Scalar>
std::vector<char> encode_field(const IndicatorField<Scalar>& u) {
  auto buf = detail::trf_header(u.grid());
  for (auto b : u.bytes()) buf.push_back(static_cast<char>(b));
  return buf;
}

template <typename Field>
void write_field(const std::string& path, const Field& f) {
  detail::spit(path, encode_field(f));
}

template <typename Scalar = double>
ScalarField<Scalar> read_scalar_field(const std::string& path) {
  const auto buf = detail::slurp(path);
  const auto grid = detail::parse_trf_header<Scalar>(buf, path);
  const auto m = static_cast<std::size_t>(grid.size());
  if (buf.size() != detail::kTrfHeaderBytes + 8 * m) {
    throw std::runtime_error(path + ": payload size does not match a scalar field");
  }
  ScalarField<Scalar> f(grid);
  for (std::size_t i = 0; i < m; ++i) {
    f[static_cast<Eigen::Index>(i)] =
        static_cast<Scalar>(detail::get_f64_le(buf.data() + detail::kTrfHeaderBytes + 8 * i));
  }
  return f;
}

template <typename Scalar = double>
IndicatorField<Scalar> read_indicator_field(const std::string& path) {
  const auto buf = detail::slurp(path);
  const auto grid = detail::parse_trf_header<Scalar>(buf, path);
  const auto m = static_cast<std::size_t>(grid.size());
  if (buf.size() != detail::kTrfHeaderBytes + m) {
    throw std::runtime_error(path + ": payload size does not match an indicator field");
  }
  IndicatorField<Scalar> u(grid);
  for (std::size_t i = 0; i < m; ++i) {
    const auto b = static_cast<unsigned char>(buf[detail::kTrfHeaderBytes + i]);
    if (b > 1) throw std::runtime_error(path + ": indicator byte is not 0/1");
    u.set(static_cast<Eigen::Index>(i), b == 1);
  }
  return u;
}

/// Debug export: one line per node, index tuple followed by the value.
template <typename Scalar>
void write_field_csv(std::ostream& os, const ScalarField<Scalar>& f) {
  const auto& g = f.grid();
  os << (g.dim() == 2 ? "i,j,value\n" : "i,j,k,value\n") << std::setprecision(17);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const auto idx = g.unflat(i);
    for (int a = 0; a < g.dim(); ++a) os << idx[a] << ',';
    os << f[i] << '\n';
  }
}

template <typename Scalar>
void write_field_csv(std::ostream& os, const IndicatorField<Scalar>& u) {
  const auto& g = u.grid();
  os << (g.dim() == 2 ? "i,j,value\n" : "i,j,k,value\n");
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const auto idx = g.unflat(i);
    for (int a = 0; a < g.dim(); ++a) os << idx[a] << ',';
    os << (u[i] ? 1 : 0) << '\n';
  }
}

}  // namespace thresh
