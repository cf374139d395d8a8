#include "thresh/marching_tables.hpp"

#include <stdexcept>

namespace thresh::marching {

namespace {

int cube_edge_between(int c0, int c1) {
  const int diff = c0 ^ c1;
  const int a = diff == 1 ? 0 : diff == 2 ? 1 : 2;
  const int base = c0 & ~diff;
  const int b1 = (base >> ((a + 1) % 3)) & 1;
  const int b2 = (base >> ((a + 2) % 3)) & 1;
  return 4 * a + b1 + 2 * b2;
}

int square_edge_between(int c0, int c1) {
  const int diff = c0 ^ c1;
  const int a = diff == 1 ? 0 : 1;
  const int base = c0 & ~diff;
  return 2 * a + ((base >> (1 - a)) & 1);
}

// Walk one face counterclockwise (seen from outside); every run of inside
// corners yields a segment from the edge where the walk leaves the run to the
// edge where it entered.
template <typename EdgeOf>
void face_segments(const std::array<int, 4>& cycle, unsigned mask, EdgeOf edge_of, std::vector<Segment>& out) {
  auto inside = [&](int k) { return (mask >> cycle[static_cast<std::size_t>((k + 4) % 4)]) & 1u; };
  for (int k = 0; k < 4; ++k) {
    if (!inside(k) || inside(k - 1)) continue;
    const int enter = edge_of(cycle[static_cast<std::size_t>((k + 3) % 4)], cycle[static_cast<std::size_t>(k)]);
    int m = k;
    while (inside(m + 1)) ++m;
    const int leave = edge_of(cycle[static_cast<std::size_t>(m % 4)], cycle[static_cast<std::size_t>((m + 1) % 4)]);
    out.push_back({static_cast<std::uint8_t>(leave), static_cast<std::uint8_t>(enter)});
  }
}

std::array<std::vector<Segment>, 16> build_square() {
  std::array<std::vector<Segment>, 16> t;
  for (unsigned mask = 0; mask < 16; ++mask) {
    face_segments({0, 1, 3, 2}, mask, square_edge_between, t[mask]);
  }
  return t;
}

std::vector<Triangle> cube_case(unsigned mask) {
  std::vector<Segment> segs;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    for (int s = 0; s < 2; ++s) {
      std::array<int, 4> cycle{};
      const int uv[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      for (int k = 0; k < 4; ++k) cycle[static_cast<std::size_t>(k)] = (s << a) | (uv[k][0] << b) | (uv[k][1] << c);
      if (s == 0) std::swap(cycle[1], cycle[3]);
      face_segments(cycle, mask, cube_edge_between, segs);
    }
  }
  std::array<int, 12> next;
  next.fill(-1);
  for (const auto& sg : segs) {
    if (next[sg[0]] != -1) throw std::logic_error("marching cubes: edge leaves twice");
    next[sg[0]] = sg[1];
  }
  std::array<bool, 12> used{};
  std::vector<Triangle> tris;
  for (int start = 0; start < 12; ++start) {
    if (next[static_cast<std::size_t>(start)] == -1 || used[static_cast<std::size_t>(start)]) continue;
    std::vector<int> loop;
    for (int e = start; !used[static_cast<std::size_t>(e)]; e = next[static_cast<std::size_t>(e)]) {
      used[static_cast<std::size_t>(e)] = true;
      loop.push_back(e);
      if (next[static_cast<std::size_t>(e)] == -1) throw std::logic_error("marching cubes: open loop");
    }
    for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
      tris.push_back({static_cast<std::uint8_t>(loop[0]), static_cast<std::uint8_t>(loop[i]),
                      static_cast<std::uint8_t>(loop[i + 1])});
    }
  }
  return tris;
}

std::array<double, 3> edge_midpoint(int e) {
  std::array<double, 3> p{};
  const int base = cube_edge_base(e);
  for (int a = 0; a < 3; ++a) p[static_cast<std::size_t>(a)] = (base >> a) & 1;
  p[static_cast<std::size_t>(cube_edge_axis(e))] += 0.5;
  return p;
}

std::array<std::vector<Triangle>, 256> build_cube() {
  std::array<std::vector<Triangle>, 256> t;
  for (unsigned mask = 0; mask < 256; ++mask) t[mask] = cube_case(mask);

  // With only corner 0 inside the normal must point toward (1, 1, 1).
  const auto& tri = t[1].at(0);
  const auto p0 = edge_midpoint(tri[0]), p1 = edge_midpoint(tri[1]), p2 = edge_midpoint(tri[2]);
  const double ux = p1[0] - p0[0], uy = p1[1] - p0[1], uz = p1[2] - p0[2];
  const double vx = p2[0] - p0[0], vy = p2[1] - p0[1], vz = p2[2] - p0[2];
  const double dot = (uy * vz - uz * vy) + (uz * vx - ux * vz) + (ux * vy - uy * vx);
  if (dot < 0) {
    for (auto& cs : t)
      for (auto& tr : cs) std::swap(tr[1], tr[2]);
  }
  return t;
}

}  // namespace

const std::array<std::vector<Segment>, 16>& square_table() {
  static const auto table = build_square();
  return table;
}

const std::array<std::vector<Triangle>, 256>& cube_table() {
  static const auto table = build_cube();
  return table;
}

std::uint64_t cube_table_hash() {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::uint8_t b) {
    h ^= b;
    h *= 1099511628211ull;
  };
  for (const auto& cs : cube_table()) {
    mix(static_cast<std::uint8_t>(cs.size()));
    for (const auto& tr : cs)
      for (auto e : tr) mix(e);
  }
  return h;
}

}  // namespace thresh::marching
