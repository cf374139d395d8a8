#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace thresh::marching {

// Corner c of a cell has offset bit a = (c >> a) & 1 along axis a.
//
// Square edges: e = 2 * a + b, where a is the edge axis and b the offset of
// the other axis. Cube edges: e = 4 * a + b1 + 2 * b2, where b1 and b2 are
// the offsets along axes (a + 1) % 3 and (a + 2) % 3.
//
// A corner is "inside" when its value is above the iso level. On every face,
// each maximal run of inside corners is cut off on its own, so diagonal inside
// corners are separated; the choice is face-local and therefore consistent
// between neighbouring cells.

using Segment = std::array<std::uint8_t, 2>;   // from edge, to edge
using Triangle = std::array<std::uint8_t, 3>;  // edges

/// Segments per square case, oriented so the inside is on the left.
const std::array<std::vector<Segment>, 16>& square_table();

/// Triangles per cube case, wound so the normal points from inside to outside.
const std::array<std::vector<Triangle>, 256>& cube_table();

/// FNV-1a over the cube table, identifying the case resolution in use.
std::uint64_t cube_table_hash();

inline constexpr int square_edge_axis(int e) { return e / 2; }
/// Corner at the low end of a square edge.
inline constexpr int square_edge_base(int e) {
  const int a = e / 2;
  const int b = e % 2;
  return a == 0 ? (b << 1) : b;
}

inline constexpr int cube_edge_axis(int e) { return e / 4; }
/// Corner at the low end of a cube edge.
inline constexpr int cube_edge_base(int e) {
  const int a = e / 4;
  const int b1 = e & 1;
  const int b2 = (e >> 1) & 1;
  return (b1 << ((a + 1) % 3)) | (b2 << ((a + 2) % 3));
}

}  // namespace thresh::marching
