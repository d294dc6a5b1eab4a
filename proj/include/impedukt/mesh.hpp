#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "impedukt/errors.hpp"

namespace impedukt {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

enum class Region : std::uint8_t { Interior, Pml };

/// Boundary tags. WallW and WallZ are both lossy walls (vocal-tract wall vs
/// impedance-duct wall); they differ only in which default admittance applies.
enum class FacetTag : std::uint8_t { Source, WallW, WallZ, Rigid, Outer };

inline bool is_lossy_wall(FacetTag t) { return t == FacetTag::WallW || t == FacetTag::WallZ; }

struct Tet {
  std::array<int, 4> n{};
  Region region = Region::Interior;
};

struct Facet {
  std::array<int, 3> n{};
  FacetTag tag = FacetTag::Rigid;
  double mu = -1.0;  // explicit admittance, < 0 means "use the per-tag default"
};

struct Mesh {
  std::vector<Vec3> nodes;
  std::vector<Tet> tets;
  std::vector<Facet> facets;

  double tet_volume(std::size_t i) const {
    const auto& t = tets[i].n;
    const Vec3 a = nodes[t[1]] - nodes[t[0]];
    const Vec3 b = nodes[t[2]] - nodes[t[0]];
    const Vec3 c = nodes[t[3]] - nodes[t[0]];
    return a.cross(b).dot(c) / 6.0;
  }

  double facet_area(std::size_t i) const {
    const auto& f = facets[i].n;
    const Vec3 a = nodes[f[1]] - nodes[f[0]];
    const Vec3 b = nodes[f[2]] - nodes[f[0]];
    return 0.5 * a.cross(b).norm();
  }

  double total_volume() const {
    double v = 0.0;
    for (std::size_t i = 0; i < tets.size(); ++i) v += tet_volume(i);
    return v;
  }

  double region_volume(Region r) const {
    double v = 0.0;
    for (std::size_t i = 0; i < tets.size(); ++i)
      if (tets[i].region == r) v += tet_volume(i);
    return v;
  }

  /// Diameter of the inscribed sphere of tet i: 6V / (sum of face areas).
  double tet_inscribed_diameter(std::size_t i) const {
    const auto& t = tets[i].n;
    auto face_area = [&](int a, int b, int c) {
      return 0.5 * (nodes[b] - nodes[a]).cross(nodes[c] - nodes[a]).norm();
    };
    const double s = face_area(t[0], t[1], t[2]) + face_area(t[0], t[1], t[3]) +
                     face_area(t[0], t[2], t[3]) + face_area(t[1], t[2], t[3]);
    return 6.0 * tet_volume(i) / s;
  }

  double min_inscribed_diameter() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tets.size(); ++i)
      m = std::min(m, tet_inscribed_diameter(i));
    return m;
  }

  Vec3 tet_centroid(std::size_t i) const {
    const auto& t = tets[i].n;
    return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]] + nodes[t[3]]) * 0.25;
  }

  int nearest_node(const Vec3& p) const {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = (nodes[i] - p).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  /// Node index at position p within tolerance, or -1.
  int node_at(const Vec3& p, double tol) const {
    const int i = nearest_node(p);
    if (i >= 0 && (nodes[i] - p).norm() <= tol) return i;
    return -1;
  }

  /// Checks the structural invariants: indices in range, strictly positive
  /// tet volumes, and every listed facet matching exactly one tet face.
  void validate() const {
    const int nn = static_cast<int>(nodes.size());
    for (const Tet& t : tets)
      for (int k : t.n)
        if (k < 0 || k >= nn) throw MeshError("tet references a missing node");
    for (const Facet& f : facets)
      for (int k : f.n)
        if (k < 0 || k >= nn) throw MeshError("facet references a missing node");

    for (std::size_t i = 0; i < tets.size(); ++i)
      if (!(tet_volume(i) > 0.0)) throw MeshError("non-positive tet volume");

    // Count how many tets own each face.
    auto key = [](int a, int b, int c) {
      std::array<int, 3> s{a, b, c};
      if (s[0] > s[1]) std::swap(s[0], s[1]);
      if (s[1] > s[2]) std::swap(s[1], s[2]);
      if (s[0] > s[1]) std::swap(s[0], s[1]);
      return (static_cast<std::uint64_t>(s[0]) << 42) ^ (static_cast<std::uint64_t>(s[1]) << 21) ^
             static_cast<std::uint64_t>(s[2]);
    };
    std::unordered_map<std::uint64_t, int> face_count;
    face_count.reserve(tets.size() * 4);
    for (const Tet& t : tets) {
      face_count[key(t.n[0], t.n[1], t.n[2])]++;
      face_count[key(t.n[0], t.n[1], t.n[3])]++;
      face_count[key(t.n[0], t.n[2], t.n[3])]++;
      face_count[key(t.n[1], t.n[2], t.n[3])]++;
    }
    std::unordered_map<std::uint64_t, int> facet_seen;
    facet_seen.reserve(facets.size());
    for (const Facet& f : facets) {
      const auto k = key(f.n[0], f.n[1], f.n[2]);
      const auto it = face_count.find(k);
      if (it == face_count.end()) throw MeshError("boundary facet is not a tet face");
      if (it->second != 1) throw MeshError("boundary facet shared by more than one tet");
      if (++facet_seen[k] > 1) throw MeshError("boundary facet tagged more than once");
    }
  }
};

}  // namespace impedukt
