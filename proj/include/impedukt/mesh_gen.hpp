#pragma once

// Structured tetrahedral mesh generation for impedance ducts, flanged
// radiation boxes with a PML shell, and lofted vocal-tract-like ducts.
//
// All meshes share one construction: a quad grid over the cross-section
// (a square grid mapped onto the ellipse, optionally surrounded by rings
// that blend the ellipse boundary into the outer box square), split into
// triangles by the lowest-index diagonal rule, extruded layer by layer
// into prisms, and each prism cut into three tets. The diagonal rules are
// index-based, so connectivity is deterministic and conforming, and the
// grid center guarantees exact centerline nodes on every layer.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "impedukt/errors.hpp"
#include "impedukt/geometry.hpp"
#include "impedukt/mesh.hpp"

namespace impedukt {

namespace meshgen {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// Cross-section grid in reference (unit-ellipse) coordinates. Core points
/// carry the square-to-disk parametrization and get scaled per layer; ring
/// points are stored as absolute positions (they do not scale with z).
struct CrossSection {
  int nu = 0, nv = 0;                      // core cells along u and v (even)
  std::vector<Vec2> core_unit;             // unit-disk positions of core points
  std::vector<Vec2> core_param;            // (u,v) square parameters per core point
  std::vector<Vec2> ring_abs;              // absolute positions of ring points
  std::vector<std::array<int, 4>> quads;   // all cells, core first, CCW
  std::size_t n_core_quads = 0;
  std::vector<int> ring_of_quad;           // ring layer (1-based) per ring quad
  std::vector<std::array<int, 2>> core_boundary_edges;   // CCW around ellipse
  std::vector<std::array<int, 2>> outer_boundary_edges;  // CCW around outer square
  int center = -1;                         // point index at (0,0)

  std::size_t core_count() const { return core_unit.size(); }
  std::size_t point_count() const { return core_unit.size() + ring_abs.size(); }
};

// Square-to-disk map: boundary of [-1,1]^2 lands exactly on the unit circle.
inline Vec2 square_to_disk(double u, double v) {
  return {u * std::sqrt(1.0 - 0.5 * v * v), v * std::sqrt(1.0 - 0.5 * u * u)};
}

inline int even_up(int n) { return n % 2 == 0 ? n : n + 1; }

/// Core grid resolution for a section at mesh size h. The minor axis must
/// span at least four cells.
inline std::pair<int, int> core_resolution(const EllipseSection& s, double h) {
  if (!(h > 0.0)) throw DomainError("mesh size must be positive");
  const int raw_v = static_cast<int>(std::ceil(2.0 * s.b_minor / h - 1e-9));
  if (raw_v < 4)
    throw MeshError("mesh size " + std::to_string(h) + " too coarse for minor axis " +
                    std::to_string(s.b_minor) + ": need at least 4 cells across, got " +
                    std::to_string(raw_v));
  const int nu = even_up(static_cast<int>(std::ceil(2.0 * s.a_major / h - 1e-9)));
  const int nv = even_up(raw_v);
  return {nu, nv};
}

inline CrossSection build_core_grid(int nu, int nv) {
  CrossSection cs;
  cs.nu = nu;
  cs.nv = nv;
  cs.core_unit.resize(static_cast<std::size_t>(nu + 1) * (nv + 1));
  cs.core_param.resize(cs.core_unit.size());
  auto id = [nu](int i, int j) { return j * (nu + 1) + i; };
  for (int j = 0; j <= nv; ++j) {
    for (int i = 0; i <= nu; ++i) {
      const double u = 2.0 * i / nu - 1.0;
      const double v = 2.0 * j / nv - 1.0;
      cs.core_param[id(i, j)] = {u, v};
      cs.core_unit[id(i, j)] = square_to_disk(u, v);
    }
  }
  cs.center = id(nu / 2, nv / 2);
  cs.core_unit[cs.center] = {0.0, 0.0};

  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i)
      cs.quads.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  cs.n_core_quads = cs.quads.size();

  // CCW perimeter: bottom, right, top, left.
  std::vector<int> per;
  for (int i = 0; i < nu; ++i) per.push_back(id(i, 0));
  for (int j = 0; j < nv; ++j) per.push_back(id(nu, j));
  for (int i = nu; i > 0; --i) per.push_back(id(i, nv));
  for (int j = nv; j > 0; --j) per.push_back(id(0, j));
  for (std::size_t p = 0; p < per.size(); ++p)
    cs.core_boundary_edges.push_back({per[p], per[(p + 1) % per.size()]});
  return cs;
}

/// Cell sizes from roughly h0 at the start growing geometrically to at most
/// h1, rescaled so they sum to total exactly.
inline std::vector<double> graded_sizes(double total, double h0, double h1, double ratio = 1.35) {
  std::vector<double> sizes;
  double g = std::min(h0, h1);
  double acc = 0.0;
  while (acc + 0.5 * g < total) {
    sizes.push_back(g);
    acc += g;
    g = std::min(g * ratio, std::max(h0, h1));
  }
  if (sizes.empty()) sizes.push_back(total);
  const double scale = total / acc;
  for (double& s : sizes) s *= scale;
  return sizes;
}

/// Adds ring layers blending the (scaled) ellipse boundary into an inner box
/// square of half-widths (wx, wy), then into the outer square grown by
/// pml_width. Ring points are absolute coordinates; inner-ring spacing is
/// graded from the duct cell size up to the box cell size, since the
/// aperture near field needs the fine resolution.
inline void add_rings(CrossSection& cs, const EllipseSection& sec, double wx, double wy,
                      double pml_width, const std::vector<double>& inner_t, int n_outer) {
  const std::size_t nper = cs.core_boundary_edges.size();
  std::vector<int> prev(nper);
  std::vector<Vec2> start(nper), inner_sq(nper), outer_sq(nper);
  for (std::size_t p = 0; p < nper; ++p) {
    const int c = cs.core_boundary_edges[p][0];
    prev[p] = c;
    const Vec2 unit = cs.core_unit[c];
    start[p] = {sec.a_major * unit.x, sec.b_minor * unit.y};
    // Square-perimeter parameter of this boundary point (max(|u|,|v|) = 1).
    const Vec2 par = cs.core_param[c];
    inner_sq[p] = {wx * par.x, wy * par.y};
    outer_sq[p] = {(wx + pml_width) * par.x, (wy + pml_width) * par.y};
  }

  const int n_inner = static_cast<int>(inner_t.size());
  const int total = n_inner + n_outer;
  for (int r = 1; r <= total; ++r) {
    std::vector<int> cur(nper);
    for (std::size_t p = 0; p < nper; ++p) {
      Vec2 pos;
      if (r <= n_inner) {
        const double t = inner_t[r - 1];
        pos = {start[p].x + t * (inner_sq[p].x - start[p].x),
               start[p].y + t * (inner_sq[p].y - start[p].y)};
      } else {
        const double t = static_cast<double>(r - n_inner) / n_outer;
        pos = {inner_sq[p].x + t * (outer_sq[p].x - inner_sq[p].x),
               inner_sq[p].y + t * (outer_sq[p].y - inner_sq[p].y)};
      }
      cur[p] = static_cast<int>(cs.point_count());
      cs.ring_abs.push_back(pos);
    }
    for (std::size_t p = 0; p < nper; ++p) {
      const std::size_t pn = (p + 1) % nper;
      cs.quads.push_back({prev[p], prev[pn], cur[pn], cur[p]});
      cs.ring_of_quad.push_back(r);
    }
    prev = cur;
    if (r == total)
      for (std::size_t p = 0; p < nper; ++p)
        cs.outer_boundary_edges.push_back({cur[p], cur[(p + 1) % nper]});
  }
}

/// Splits every quad by the lowest-local-index diagonal. Triangle order is
/// deterministic; orientation follows the CCW quads.
inline std::vector<std::array<int, 3>> triangulate(const CrossSection& cs) {
  std::vector<std::array<int, 3>> tris;
  tris.reserve(cs.quads.size() * 2);
  for (const auto& q : cs.quads) {
    const int m = std::min({q[0], q[1], q[2], q[3]});
    if (m == q[0] || m == q[2]) {
      tris.push_back({q[0], q[1], q[2]});
      tris.push_back({q[0], q[2], q[3]});
    } else {
      tris.push_back({q[1], q[2], q[3]});
      tris.push_back({q[1], q[3], q[0]});
    }
  }
  return tris;
}

/// Cuts the prism between triangle (a,b,c) in two consecutive layers into
/// three tets, lateral diagonals following the lowest-bottom-index rule so
/// neighbouring prisms and boundary quads agree. Volumes are oriented
/// positive afterwards.
inline void emit_prism_tets(std::vector<Tet>& out, const std::array<int, 3>& tri, int base_lo,
                            int base_hi, Region region) {
  std::array<int, 3> s = tri;
  std::sort(s.begin(), s.end());
  const int a = base_lo + s[0], b = base_lo + s[1], c = base_lo + s[2];
  const int a1 = base_hi + s[0], b1 = base_hi + s[1], c1 = base_hi + s[2];
  out.push_back({{a, b, c, c1}, region});
  out.push_back({{a, b, c1, b1}, region});
  out.push_back({{a, b1, c1, a1}, region});
}

/// Two boundary triangles of the lateral quad over edge (n1, n2) between two
/// layers, split consistently with emit_prism_tets.
inline void emit_wall_facets(std::vector<Facet>& out, int n1, int n2, int base_lo, int base_hi,
                             FacetTag tag) {
  const int x = std::min(n1, n2), y = std::max(n1, n2);
  out.push_back({{base_lo + x, base_lo + y, base_hi + y}, tag, -1.0});
  out.push_back({{base_lo + x, base_hi + y, base_hi + x}, tag, -1.0});
}

inline void orient_positive(Mesh& m) {
  for (std::size_t i = 0; i < m.tets.size(); ++i) {
    if (m.tet_volume(i) < 0.0) std::swap(m.tets[i].n[2], m.tets[i].n[3]);
    if (!(m.tet_volume(i) > 0.0))
      throw MeshError("degenerate tet produced at index " + std::to_string(i));
  }
}

}  // namespace meshgen

/// Extruded uniform duct. The axis is z, entrance (SOURCE) at z = 0, far end
/// at z = length. Lateral walls are tagged WallZ; the far end is RIGID for
/// ClosedRigid and left untagged (natural rigid) otherwise.
inline Mesh generate_duct_mesh(const DuctSpec& spec, std::vector<std::string>* warnings = nullptr) {
  if (!(spec.length > 0.0)) throw DomainError("duct length must be positive");
  if (!(spec.section.a_major >= spec.section.b_minor && spec.section.b_minor > 0.0))
    throw DomainError("invalid duct section");
  if (warnings && spec.shorter_than_recommended())
    warnings->push_back("duct length " + std::to_string(spec.length) +
                        " is below 3x the major semi-axis; reflection standard not met");

  const auto [nu, nv] = meshgen::core_resolution(spec.section, spec.mesh_size);
  meshgen::CrossSection cs = meshgen::build_core_grid(nu, nv);
  const auto tris = meshgen::triangulate(cs);

  const int nz = std::max(1, static_cast<int>(std::llround(spec.length / spec.mesh_size)));
  const double dz = spec.length / nz;
  const int npts = static_cast<int>(cs.core_count());

  Mesh m;
  m.nodes.reserve(static_cast<std::size_t>(npts) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (const auto& p : cs.core_unit)
      m.nodes.push_back({spec.section.a_major * p.x, spec.section.b_minor * p.y, k * dz});

  for (int k = 0; k < nz; ++k)
    for (const auto& t : tris)
      meshgen::emit_prism_tets(m.tets, t, k * npts, (k + 1) * npts, Region::Interior);

  for (const auto& t : tris) m.facets.push_back({{t[0], t[1], t[2]}, FacetTag::Source, -1.0});
  if (spec.termination == Termination::ClosedRigid) {
    const int top = nz * npts;
    for (const auto& t : tris)
      m.facets.push_back({{top + t[0], top + t[1], top + t[2]}, FacetTag::Rigid, -1.0});
  }
  for (int k = 0; k < nz; ++k)
    for (const auto& e : cs.core_boundary_edges)
      meshgen::emit_wall_facets(m.facets, e[0], e[1], k * npts, (k + 1) * npts, FacetTag::WallZ);

  meshgen::orient_positive(m);
  return m;
}

/// Open-flanged duct fused flush into one face of a rigid-flange box that is
/// wrapped in a PML shell on its five far sides. The duct occupies
/// z in [-length, 0]; the box interior spans z in [0, box_dims.z] with
/// cross-section box_dims.x by box_dims.y, and the shell adds pml_width
/// beyond the five non-flange faces. The flange plane z = 0 is RIGID, the
/// truncated outer boundary is OUTER (homogeneous Neumann).
inline Mesh generate_radiation_domain(const DuctSpec& spec, const std::array<double, 3>& box_dims,
                                      double pml_width, double h_box, double h_pml,
                                      std::vector<std::string>* warnings = nullptr) {
  if (spec.termination != Termination::OpenFlanged)
    throw DomainError("radiation domain requires an open-flanged duct");
  if (!(pml_width > 0.0)) throw DomainError("pml width must be positive");
  if (!(h_box > 0.0 && h_pml > 0.0)) throw DomainError("mesh sizes must be positive");
  if (!(spec.length > 0.0)) throw DomainError("duct length must be positive");
  const double wx = 0.5 * box_dims[0], wy = 0.5 * box_dims[1];
  if (!(spec.section.a_major < 0.45 * box_dims[0] && spec.section.b_minor < 0.45 * box_dims[1]))
    throw MeshError("duct cross-section does not fit in the box face");
  if (warnings && spec.shorter_than_recommended())
    warnings->push_back("duct length below 3x the major semi-axis");

  const auto [nu, nv] = meshgen::core_resolution(spec.section, spec.mesh_size);
  meshgen::CrossSection cs = meshgen::build_core_grid(nu, nv);

  // Ring spacing graded from the duct cell size out to h_box over the mean
  // gap between the ellipse and the inner square.
  const double mean_gap = 0.5 * ((wx - spec.section.a_major) + (wy - spec.section.b_minor));
  const auto ring_sizes = meshgen::graded_sizes(mean_gap, spec.mesh_size, h_box);
  std::vector<double> inner_t(ring_sizes.size());
  double ring_acc = 0.0;
  for (std::size_t i = 0; i < ring_sizes.size(); ++i) {
    ring_acc += ring_sizes[i];
    inner_t[i] = ring_acc / mean_gap;
  }
  const int n_inner = static_cast<int>(inner_t.size());
  const int n_outer = std::max(2, static_cast<int>(std::llround(pml_width / h_pml)));
  meshgen::add_rings(cs, spec.section, wx, wy, pml_width, inner_t, n_outer);
  const auto tris = meshgen::triangulate(cs);

  const int nz_duct = std::max(1, static_cast<int>(std::llround(spec.length / spec.mesh_size)));
  const double dz_duct = spec.length / nz_duct;
  const int nz_pml = std::max(2, static_cast<int>(std::llround(pml_width / h_pml)));
  const double dz_pml = pml_width / nz_pml;

  const int npc = static_cast<int>(cs.core_count());
  const int npf = static_cast<int>(cs.point_count());

  Mesh m;
  // Duct layers (core points only), z = -length .. -dz.
  for (int k = 0; k < nz_duct; ++k) {
    const double z = -spec.length + k * dz_duct;
    for (const auto& p : cs.core_unit)
      m.nodes.push_back({spec.section.a_major * p.x, spec.section.b_minor * p.y, z});
  }
  // Full layers from the flange plane up through the PML lid; box spacing is
  // graded from the duct cell size so the aperture near field is resolved.
  const int full_base = nz_duct * npc;
  std::vector<double> full_z{0.0};
  for (double dz : meshgen::graded_sizes(box_dims[2], spec.mesh_size, h_box))
    full_z.push_back(full_z.back() + dz);
  full_z.back() = box_dims[2];  // guard cumulative roundoff
  const int nz_box = static_cast<int>(full_z.size()) - 1;
  for (int k = 1; k <= nz_pml; ++k) full_z.push_back(box_dims[2] + k * dz_pml);
  for (const double z : full_z) {
    for (const auto& p : cs.core_unit)
      m.nodes.push_back({spec.section.a_major * p.x, spec.section.b_minor * p.y, z});
    for (const auto& p : cs.ring_abs) m.nodes.push_back({p.x, p.y, z});
  }

  const auto core_tris = std::vector<std::array<int, 3>>(tris.begin(), tris.begin() + 2 * cs.n_core_quads);

  // Duct slabs (including the transition slab that tops out at the z=0 layer).
  for (int k = 0; k < nz_duct; ++k) {
    const int lo = k * npc;
    const int hi = k + 1 < nz_duct ? (k + 1) * npc : full_base;
    for (const auto& t : core_tris) meshgen::emit_prism_tets(m.tets, t, lo, hi, Region::Interior);
  }
  // Box and PML slabs.
  for (std::size_t k = 0; k + 1 < full_z.size(); ++k) {
    const int lo = full_base + static_cast<int>(k) * npf;
    const int hi = lo + npf;
    const bool z_pml = static_cast<int>(k) >= nz_box;
    for (std::size_t q = 0; q < cs.quads.size(); ++q) {
      const bool lateral_pml = q >= cs.n_core_quads && cs.ring_of_quad[q - cs.n_core_quads] > n_inner;
      const Region reg = (z_pml || lateral_pml) ? Region::Pml : Region::Interior;
      meshgen::emit_prism_tets(m.tets, tris[2 * q], lo, hi, reg);
      meshgen::emit_prism_tets(m.tets, tris[2 * q + 1], lo, hi, reg);
    }
  }

  // Facets: duct entrance.
  for (const auto& t : core_tris) m.facets.push_back({{t[0], t[1], t[2]}, FacetTag::Source, -1.0});
  // Duct lateral wall.
  for (int k = 0; k < nz_duct; ++k) {
    const int lo = k * npc;
    const int hi = k + 1 < nz_duct ? (k + 1) * npc : full_base;
    for (const auto& e : cs.core_boundary_edges)
      meshgen::emit_wall_facets(m.facets, e[0], e[1], lo, hi, FacetTag::WallZ);
  }
  // Flange plane: ring-region bottoms at z = 0.
  for (std::size_t q = cs.n_core_quads; q < cs.quads.size(); ++q) {
    const auto& t0 = tris[2 * q];
    const auto& t1 = tris[2 * q + 1];
    m.facets.push_back({{full_base + t0[0], full_base + t0[1], full_base + t0[2]}, FacetTag::Rigid, -1.0});
    m.facets.push_back({{full_base + t1[0], full_base + t1[1], full_base + t1[2]}, FacetTag::Rigid, -1.0});
  }
  // Outer lateral truncation.
  for (std::size_t k = 0; k + 1 < full_z.size(); ++k) {
    const int lo = full_base + static_cast<int>(k) * npf;
    for (const auto& e : cs.outer_boundary_edges)
      meshgen::emit_wall_facets(m.facets, e[0], e[1], lo, lo + npf, FacetTag::Outer);
  }
  // Lid.
  const int top = full_base + static_cast<int>(full_z.size() - 1) * npf;
  for (const auto& t : tris)
    m.facets.push_back({{top + t[0], top + t[1], top + t[2]}, FacetTag::Outer, -1.0});

  meshgen::orient_positive(m);
  return m;
}

/// Lofted duct from an area function: cross-sections follow
/// make_elliptical_section(area(z), ecc(z)) with area and eccentricity
/// interpolated linearly between stations. Entrance is SOURCE, walls WallW,
/// far end RIGID.
inline Mesh generate_tract_mesh(const AreaFunction& af, double h,
                                std::vector<std::string>* warnings = nullptr) {
  af.validate();
  if (!(h > 0.0)) throw DomainError("mesh size must be positive");
  (void)warnings;

  // Resolution from the widest section, coarseness check from the narrowest.
  int nu = 4, nv = 0;
  double min_b = std::numeric_limits<double>::infinity();
  for (const auto& st : af.stations) {
    const EllipseSection s = make_elliptical_section(st.area, st.ecc);
    nu = std::max(nu, static_cast<int>(std::ceil(2.0 * s.a_major / h - 1e-9)));
    nv = std::max(nv, static_cast<int>(std::ceil(2.0 * s.b_minor / h - 1e-9)));
    min_b = std::min(min_b, s.b_minor);
  }
  if (std::ceil(2.0 * min_b / h - 1e-9) < 4.0)
    throw MeshError("mesh size too coarse for the narrowest station (need 4 cells across)");
  nu = meshgen::even_up(nu);
  nv = meshgen::even_up(nv);

  meshgen::CrossSection cs = meshgen::build_core_grid(nu, nv);
  const auto tris = meshgen::triangulate(cs);
  const int npts = static_cast<int>(cs.core_count());

  // Layer positions: subdivide every station-to-station segment by ~h.
  std::vector<double> zs{af.stations.front().z};
  for (std::size_t i = 1; i < af.stations.size(); ++i) {
    const double z0 = af.stations[i - 1].z, z1 = af.stations[i].z;
    const int n = std::max(1, static_cast<int>(std::llround((z1 - z0) / h)));
    for (int k = 1; k <= n; ++k) zs.push_back(z0 + (z1 - z0) * k / n);
  }

  Mesh m;
  for (const double z : zs) {
    const auto st = af.at(z);
    const EllipseSection s = make_elliptical_section(st.area, st.ecc);
    for (const auto& p : cs.core_unit) m.nodes.push_back({s.a_major * p.x, s.b_minor * p.y, z});
  }

  const int nz = static_cast<int>(zs.size()) - 1;
  for (int k = 0; k < nz; ++k)
    for (const auto& t : tris)
      meshgen::emit_prism_tets(m.tets, t, k * npts, (k + 1) * npts, Region::Interior);

  for (const auto& t : tris) m.facets.push_back({{t[0], t[1], t[2]}, FacetTag::Source, -1.0});
  const int top = nz * npts;
  for (const auto& t : tris)
    m.facets.push_back({{top + t[0], top + t[1], top + t[2]}, FacetTag::Rigid, -1.0});
  for (int k = 0; k < nz; ++k)
    for (const auto& e : cs.core_boundary_edges)
      meshgen::emit_wall_facets(m.facets, e[0], e[1], k * npts, (k + 1) * npts, FacetTag::WallW);

  meshgen::orient_positive(m);
  return m;
}

}  // namespace impedukt
