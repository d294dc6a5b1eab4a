#pragma once

// Global matrices of the semi-discrete PML wave equation on linear tets.
// Every mass-like matrix (M, B, M_alpha, M_beta, M_gamma, M_xi_i) is lumped
// by row sum and stored as a diagonal; the first-derivative couplings
// (B_i, B_{i,a_i}, B_{i,b_i}) stay sparse. PML coefficient fields are
// sampled at nodes and integrated with one-point (centroid) quadrature,
// which for linear elements is the nodal mean per element.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <vector>

#include "impedukt/errors.hpp"
#include "impedukt/mesh.hpp"
#include "impedukt/pml.hpp"

namespace impedukt {

/// Compressed-row sparse matrix with deterministic column ordering.
struct SparseMatrix {
  int rows = 0, cols = 0;
  std::vector<std::size_t> row_ptr;  // size rows+1
  std::vector<int> col;
  std::vector<double> val;

  bool empty() const { return val.empty(); }

  /// y = A x
  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
      y[r] = acc;
    }
  }

  /// y += A x
  void multiply_add(const std::vector<double>& x, std::vector<double>& y) const {
    for (int r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
      y[r] += acc;
    }
  }

  /// y -= A^T x, deterministic scatter in row order.
  void multiply_transpose_sub(const std::vector<double>& x, std::vector<double>& y) const {
    for (int r = 0; r < rows; ++r) {
      const double xr = x[r];
      if (xr == 0.0) continue;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) y[col[k]] -= val[k] * xr;
    }
  }

  /// -A^T as a new matrix (gather-friendly form of the transposed action).
  SparseMatrix negated_transpose() const {
    std::vector<Triplet> ts;
    ts.reserve(val.size());
    for (int r = 0; r < rows; ++r)
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        ts.push_back({col[k], r, -val[k]});
    return from_triplets(cols, rows, std::move(ts));
  }

  double at(int r, int c) const {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      if (col[k] == c) return val[k];
    return 0.0;
  }

  struct Triplet {
    int r, c;
    double v;
  };

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet>&& ts) {
    std::stable_sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
      return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (std::size_t i = 0; i < ts.size();) {
      std::size_t j = i;
      double acc = 0.0;
      while (j < ts.size() && ts[j].r == ts[i].r && ts[j].c == ts[i].c) acc += ts[j++].v;
      m.col.push_back(ts[i].c);
      m.val.push_back(acc);
      m.row_ptr[ts[i].r + 1]++;
      i = j;
    }
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
  }
};

namespace detail {

struct TetGeometry {
  double volume = 0.0;
  std::array<Vec3, 4> grad{};  // constant shape-function gradients
};

inline TetGeometry tet_geometry(const Mesh& mesh, const Tet& t) {
  const Vec3 e1 = mesh.nodes[t.n[1]] - mesh.nodes[t.n[0]];
  const Vec3 e2 = mesh.nodes[t.n[2]] - mesh.nodes[t.n[0]];
  const Vec3 e3 = mesh.nodes[t.n[3]] - mesh.nodes[t.n[0]];
  const double six_v = e1.cross(e2).dot(e3);
  if (!(six_v > 0.0)) throw AssemblyError("degenerate tet (non-positive volume)");
  TetGeometry g;
  g.volume = six_v / 6.0;
  g.grad[1] = e2.cross(e3) * (1.0 / six_v);
  g.grad[2] = e3.cross(e1) * (1.0 / six_v);
  g.grad[3] = e1.cross(e2) * (1.0 / six_v);
  g.grad[0] = (g.grad[1] + g.grad[2] + g.grad[3]) * -1.0;
  return g;
}

}  // namespace detail

/// Stiffness K^{ab} = (grad N^a, grad N^b), exact for linear tets.
inline SparseMatrix assemble_stiffness(const Mesh& mesh) {
  std::vector<SparseMatrix::Triplet> ts;
  ts.reserve(mesh.tets.size() * 16);
  for (const Tet& t : mesh.tets) {
    const auto g = detail::tet_geometry(mesh, t);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        ts.push_back({t.n[a], t.n[b], g.volume * g.grad[a].dot(g.grad[b])});
  }
  const int n = static_cast<int>(mesh.nodes.size());
  return SparseMatrix::from_triplets(n, n, std::move(ts));
}

/// Lumped mass: V/4 per tet node; diagonal stored as a vector.
inline std::vector<double> assemble_lumped_mass(const Mesh& mesh) {
  std::vector<double> m(mesh.nodes.size(), 0.0);
  for (const Tet& t : mesh.tets) {
    const auto g = detail::tet_geometry(mesh, t);
    for (int a = 0; a < 4; ++a) m[t.n[a]] += 0.25 * g.volume;
  }
  return m;
}

/// Consistent mass M^{ab} = (N^a, N^b): V/20 off-diagonal, V/10 diagonal.
inline SparseMatrix assemble_consistent_mass(const Mesh& mesh) {
  std::vector<SparseMatrix::Triplet> ts;
  ts.reserve(mesh.tets.size() * 16);
  for (const Tet& t : mesh.tets) {
    const auto g = detail::tet_geometry(mesh, t);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        ts.push_back({t.n[a], t.n[b], g.volume / 20.0 * (a == b ? 2.0 : 1.0)});
  }
  const int n = static_cast<int>(mesh.nodes.size());
  return SparseMatrix::from_triplets(n, n, std::move(ts));
}

/// Per-tag default admittances; explicit per-facet values take precedence.
struct BoundaryAdmittances {
  double mu_w = 0.0;  // vocal-tract walls
  double mu_z = 0.0;  // impedance-duct walls

  double for_facet(const Facet& f) const {
    if (!is_lossy_wall(f.tag)) return 0.0;
    if (f.mu >= 0.0) return f.mu;
    return f.tag == FacetTag::WallW ? mu_w : mu_z;
  }
};

/// Boundary damping B^{ab} = (N^a, mu N^b) over lossy walls, lumped: each
/// facet node receives mu * A_f / 3.
inline std::vector<double> assemble_boundary_damping(const Mesh& mesh,
                                                     const BoundaryAdmittances& mu) {
  if (mu.mu_w < 0.0 || mu.mu_z < 0.0) throw DomainError("admittances must be non-negative");
  std::vector<double> b(mesh.nodes.size(), 0.0);
  for (std::size_t i = 0; i < mesh.facets.size(); ++i) {
    const Facet& f = mesh.facets[i];
    const double m = mu.for_facet(f);
    if (m == 0.0) continue;
    const double w = m * mesh.facet_area(i) / 3.0;
    for (int k : f.n) b[k] += w;
  }
  return b;
}

/// Load pattern L^a over the SOURCE facets (lumped surface measure) and the
/// total source area S. The runtime load is pattern * g(t).
struct SourcePattern {
  std::vector<double> pattern;
  double area = 0.0;
};

inline SourcePattern assemble_source_pattern(const Mesh& mesh) {
  SourcePattern sp;
  sp.pattern.assign(mesh.nodes.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < mesh.facets.size(); ++i) {
    const Facet& f = mesh.facets[i];
    if (f.tag != FacetTag::Source) continue;
    any = true;
    const double area = mesh.facet_area(i);
    sp.area += area;
    for (int k : f.n) sp.pattern[k] += area / 3.0;
  }
  if (!any) throw ConfigError("mesh has no SOURCE facets");
  return sp;
}

/// The PML matrix families. Mass-likes are diagonal vectors; derivative
/// couplings are sparse. The coefficient-free B_i only ever multiplies the
/// auxiliary flux Phi_i, whose support is the nodes of damped elements, so
/// it is assembled over the elements touching that support; the dropped
/// entries would multiply exact zeros.
struct PmlMatrices {
  std::vector<double> m_alpha, m_beta, m_gamma;
  std::array<std::vector<double>, 3> m_xi;
  std::array<SparseMatrix, 3> b_plain;  // B_i^{ab}       = (N^a, d_i N^b)
  std::array<SparseMatrix, 3> b_a;      // B_{i,a_i}^{ab} = (N^a, a_i d_i N^b)
  std::array<SparseMatrix, 3> b_b;      // B_{i,b_i}^{ab} = (N^a, b_i d_i N^b)
};

inline PmlMatrices assemble_pml_matrices(const Mesh& mesh, const PmlSpec& pml, double c0) {
  const std::size_t n = mesh.nodes.size();
  PmlMatrices out;
  out.m_alpha.assign(n, 0.0);
  out.m_beta.assign(n, 0.0);
  out.m_gamma.assign(n, 0.0);
  for (auto& v : out.m_xi) v.assign(n, 0.0);

  // Nodal samples of all coefficient fields.
  std::vector<PmlCoefficients> coef(n);
  std::vector<std::array<double, 3>> xi(n);
  std::vector<char> damped(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    xi[i] = pml.xi_at(c0, {mesh.nodes[i].x, mesh.nodes[i].y, mesh.nodes[i].z});
    coef[i] = pml_coefficients(xi[i][0], xi[i][1], xi[i][2]);
    damped[i] = xi[i][0] != 0.0 || xi[i][1] != 0.0 || xi[i][2] != 0.0;
  }
  // Phi support: every node of an element with a damped node.
  std::vector<char> support(n, 0);
  for (const Tet& t : mesh.tets)
    if (damped[t.n[0]] || damped[t.n[1]] || damped[t.n[2]] || damped[t.n[3]])
      for (int k : t.n) support[k] = 1;

  std::array<std::vector<SparseMatrix::Triplet>, 3> ts_plain, ts_a, ts_b;

  for (const Tet& t : mesh.tets) {
    const auto g = detail::tet_geometry(mesh, t);
    const double v4 = 0.25 * g.volume;
    const bool near_support =
        support[t.n[0]] || support[t.n[1]] || support[t.n[2]] || support[t.n[3]];

    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    std::array<double, 3> am{0.0, 0.0, 0.0}, bm{0.0, 0.0, 0.0}, xm{0.0, 0.0, 0.0};
    for (int a = 0; a < 4; ++a) {
      const auto& c = coef[t.n[a]];
      alpha += c.alpha;
      beta += c.beta;
      gamma += c.gamma;
      for (int i = 0; i < 3; ++i) {
        am[i] += c.a[i];
        bm[i] += c.b[i];
        xm[i] += xi[t.n[a]][i];
      }
    }
    alpha *= 0.25;
    beta *= 0.25;
    gamma *= 0.25;
    for (int i = 0; i < 3; ++i) {
      am[i] *= 0.25;
      bm[i] *= 0.25;
      xm[i] *= 0.25;
    }

    for (int a = 0; a < 4; ++a) {
      out.m_alpha[t.n[a]] += alpha * v4;
      out.m_beta[t.n[a]] += beta * v4;
      out.m_gamma[t.n[a]] += gamma * v4;
      for (int i = 0; i < 3; ++i) out.m_xi[i][t.n[a]] += xm[i] * v4;
    }

    const std::array<std::array<double, 3>, 4> d = {{
        {g.grad[0].x, g.grad[0].y, g.grad[0].z},
        {g.grad[1].x, g.grad[1].y, g.grad[1].z},
        {g.grad[2].x, g.grad[2].y, g.grad[2].z},
        {g.grad[3].x, g.grad[3].y, g.grad[3].z},
    }};
    for (int i = 0; i < 3; ++i) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          const double base = v4 * d[b][i];
          if (near_support) ts_plain[i].push_back({t.n[a], t.n[b], base});
          if (am[i] != 0.0) ts_a[i].push_back({t.n[a], t.n[b], am[i] * base});
          if (bm[i] != 0.0) ts_b[i].push_back({t.n[a], t.n[b], bm[i] * base});
        }
      }
    }
  }

  const int nn = static_cast<int>(n);
  for (int i = 0; i < 3; ++i) {
    out.b_plain[i] = SparseMatrix::from_triplets(nn, nn, std::move(ts_plain[i]));
    out.b_a[i] = SparseMatrix::from_triplets(nn, nn, std::move(ts_a[i]));
    out.b_b[i] = SparseMatrix::from_triplets(nn, nn, std::move(ts_b[i]));
  }
  return out;
}

/// Everything the time stepper needs, assembled once.
struct AssembledSystem {
  std::size_t n = 0;
  std::vector<double> mass;      // lumped M
  SparseMatrix stiffness;        // K
  std::vector<double> damping;   // lumped B
  SourcePattern source;
  PmlMatrices pml;
  bool has_pml = false;
};

/// Debug dump in coordinate-list form, one `i j value` line per entry.
inline void write_coordinate_list(const SparseMatrix& m, std::ostream& os) {
  char buf[64];
  for (int r = 0; r < m.rows; ++r)
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, m.col[k], m.val[k]);
      os << buf;
    }
}

inline void write_coordinate_list(const std::vector<double>& diag, std::ostream& os) {
  char buf[64];
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag[i] == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i, i, diag[i]);
    os << buf;
  }
}

inline AssembledSystem assemble_system(const Mesh& mesh, const BoundaryAdmittances& mu,
                                       const PmlSpec& pml, double c0) {
  AssembledSystem sys;
  sys.n = mesh.nodes.size();
  sys.mass = assemble_lumped_mass(mesh);
  sys.stiffness = assemble_stiffness(mesh);
  sys.damping = assemble_boundary_damping(mesh, mu);
  sys.source = assemble_source_pattern(mesh);
  sys.has_pml = pml.active();
  if (sys.has_pml) sys.pml = assemble_pml_matrices(mesh, pml, c0);
  return sys;
}

}  // namespace impedukt
