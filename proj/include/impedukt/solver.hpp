#pragma once

// Explicit time integration of the PML-modified wave equation.
//
// One step from n to n+1:
//   1. Psi^{n+1/2} = Psi^{n-1/2} + dt * P^n
//   2. [M/dt^2 + (c0 B + Ma)/(2dt)] P^{n+1} =
//        c0^2 L^n - sum_i B_i^T Phi_i^n - Mb P^n - Mg (Psi^{n+1/2}+Psi^{n-1/2})/2
//        - c0^2 K P^n + M (2P^n - P^{n-1})/dt^2 + (c0 B + Ma) P^{n-1}/(2dt)
//   3. [M/dt + Mxi_i/2] Phi_i^{n+1} =
//        [M/dt - Mxi_i/2] Phi_i^n + c0^2 B_{i,a_i} (P^{n+1}+P^n)/2
//        + c0^2 B_{i,b_i} Psi^{n+1/2}
// All bracketed systems are diagonal, so the scheme is purely explicit.
// P^0 = P^1 = 0, Phi = Psi = 0 at the start.
//
// The auxiliary-flux divergence enters in integrated-by-parts form
// (q, div phi) = -(grad q, phi), i.e. -B_i^T Phi_i with the natural
// phi.n = 0 boundary. The direct (q, d_i phi_i) pairing leaves the
// transverse sliding modes of a face PML (which no face PML absorbs)
// marginally unstable under lumped-mass leapfrog; the transposed pairing
// keeps them bounded and slowly decaying.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "impedukt/assembly.hpp"
#include "impedukt/errors.hpp"
#include "impedukt/fft.hpp"
#include "impedukt/mesh.hpp"
#include "impedukt/mesh_io.hpp"
#include "impedukt/pml.hpp"
#include "impedukt/version.hpp"

namespace impedukt {

/// Gaussian volume-velocity pulse, peak 1 at t = T_gp, e^-1 at +-0.29 T_gp:
/// gp(n) = exp(-[(dt n - T_gp)/(0.29 T_gp)]^2)   [m^3/s]
inline double gaussian_pulse(long n, double dt, double t_gp) {
  if (!(t_gp > 0.0)) throw DomainError("pulse width T_gp must be positive");
  const double u = (dt * static_cast<double>(n) - t_gp) / (0.29 * t_gp);
  return std::exp(-u * u);
}

/// CFL-style time step dt = factor * h_min / c0 with h_min the smallest
/// inscribed-sphere diameter over the tets.
inline double cfl_timestep(const Mesh& mesh, double c0, double factor = 0.2) {
  if (!(factor > 0.0 && factor <= 1.0)) throw DomainError("CFL factor must lie in (0, 1]");
  if (mesh.tets.empty()) throw MeshError("empty mesh");
  const double h = mesh.min_inscribed_diameter();
  if (!(h > 0.0)) throw MeshError("degenerate element while computing the CFL step");
  return factor * h / c0;
}

/// Zero-phase spectral low-pass with an eighth-order Butterworth-style
/// rolloff, |H(f)| = 1 / (1 + (f/fc)^8). No phase shift, so the pulse peak
/// stays at T_gp.
inline std::vector<double> lowpass_zero_phase(const std::vector<double>& x, double dt,
                                              double cutoff_hz) {
  if (x.size() < 2 || !(cutoff_hz > 0.0)) return x;
  const std::size_t n = x.size();
  auto spec = dft_real(x);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kk = std::min(k, n - k);
    const double f = static_cast<double>(kk) / (dt * static_cast<double>(n));
    const double r = std::pow(f / cutoff_hz, 8.0);
    spec[k] *= 1.0 / (1.0 + r);
  }
  auto back = idft(std::move(spec));
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = back[k].real();
  return y;
}

struct SourceSpec {
  double f0 = 10000.0;             // pulse design frequency [Hz]
  double t_gp = 0.646 / 10000.0;   // pulse center/width parameter [s]
  double lowpass_hz = 10000.0;     // zero-phase low-pass cutoff, <= 0 disables
  double amplitude = 1.0;          // peak volume velocity [m^3/s]
};

struct SimulationConfig {
  double c0 = 345.0;      // speed of sound [m/s]
  double rho0 = 1.1933;   // air density [kg/m^3]
  double dt = 0.0;        // time step [s]; 0 derives it from the CFL rule
  double cfl_factor = 0.2;
  double t_total = 0.03;  // simulated interval [s]
  SourceSpec source;
  BoundaryAdmittances admittances{0.005, 0.01};
  double r_inf = 1e-4;    // PML design reflection
  std::vector<Vec3> probes;
  double probe_snap_tol = 1e-9;  // probes must land on mesh nodes within this
};

/// Nodal state around the current center step n: P^{n-1}, P^n, P^{n+1},
/// the PML auxiliary Phi_i^n and Psi at the two half steps.
struct FieldState {
  std::vector<double> p_prev, p_cur, p_next;
  std::array<std::vector<double>, 3> phi;
  std::vector<double> psi_lo, psi_hi;  // Psi^{n-1/2}, Psi^{n+1/2}
};

struct ProbeRecord {
  Vec3 position;
  double dt = 0.0;
  std::vector<double> pressure;  // samples at t = k dt, k = 0..steps
};

struct RunManifest {
  std::string version = kVersion;
  double c0 = 0.0, rho0 = 0.0, dt = 0.0;
  long steps = 0;
  double mu_w = 0.0, mu_z = 0.0, r_inf = 0.0;
  double source_area = 0.0;
  std::string mesh_digest;
  std::vector<Vec3> probe_positions;
  std::vector<std::string> warnings;
};

struct RunResult {
  std::vector<ProbeRecord> records;
  RunManifest manifest;
};

/// Derives the PML slab geometry from the mesh regions: a slab exists on a
/// side when the PML tets extend beyond the interior tets along that axis.
inline PmlSpec derive_pml_slabs(const Mesh& mesh, double r_inf) {
  PmlSpec spec;
  spec.r_inf = r_inf;
  std::array<double, 3> i_min, i_max, p_min, p_max;
  i_min.fill(1e300); p_min.fill(1e300);
  i_max.fill(-1e300); p_max.fill(-1e300);
  bool any_interior = false, any_pml = false;
  for (const Tet& t : mesh.tets) {
    const bool pml = t.region == Region::Pml;
    (pml ? any_pml : any_interior) = true;
    for (int k : t.n) {
      const std::array<double, 3> c{mesh.nodes[k].x, mesh.nodes[k].y, mesh.nodes[k].z};
      for (int a = 0; a < 3; ++a) {
        if (pml) {
          p_min[a] = std::min(p_min[a], c[a]);
          p_max[a] = std::max(p_max[a], c[a]);
        } else {
          i_min[a] = std::min(i_min[a], c[a]);
          i_max[a] = std::max(i_max[a], c[a]);
        }
      }
    }
  }
  if (!any_interior) throw ConfigError("mesh has no interior region");
  if (!any_pml) return spec;
  double scale = 0.0;
  for (int a = 0; a < 3; ++a) scale = std::max(scale, std::max(i_max[a], p_max[a]) - std::min(i_min[a], p_min[a]));
  const double tol = 1e-9 * (scale + 1.0);
  for (int a = 0; a < 3; ++a) {
    if (p_max[a] > i_max[a] + tol) spec.slabs.push_back({a, +1, i_max[a], p_max[a] - i_max[a]});
    if (p_min[a] < i_min[a] - tol) spec.slabs.push_back({a, -1, i_min[a], i_min[a] - p_min[a]});
  }
  return spec;
}

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Owns the assembled system and the time loop for one mesh + config pair.
class Simulation {
 public:
  Simulation(const Mesh& mesh, const SimulationConfig& cfg) : mesh_(mesh), cfg_(cfg) {
    dt_ = cfg.dt > 0.0 ? cfg.dt : cfl_timestep(mesh, cfg.c0, cfg.cfl_factor);
    if (!(dt_ > 0.0)) throw ConfigError("time step must be positive");
    if (cfg.t_total < 0.0) throw ConfigError("t_total must be non-negative");
    pml_ = derive_pml_slabs(mesh, cfg.r_inf);
    sys_ = assemble_system(mesh, cfg.admittances, pml_, cfg.c0);
  }

  double dt() const { return dt_; }
  const AssembledSystem& system() const { return sys_; }
  const PmlSpec& pml() const { return pml_; }

  /// Observer is called once per advance with the center step index n
  /// (P^{n-1}, P^n, P^{n+1} all populated).
  using Observer = std::function<void(long, const FieldState&)>;

  RunResult run(const Observer& observer = nullptr) {
    const long steps = static_cast<long>(std::floor(cfg_.t_total / dt_ + 1e-9));
    const std::size_t n = sys_.n;

    // Resolve probes onto mesh nodes, exactly.
    std::vector<int> probe_nodes;
    RunResult out;
    for (const Vec3& p : cfg_.probes) {
      const int idx = mesh_.node_at(p, cfg_.probe_snap_tol);
      if (idx < 0)
        throw ConfigError("probe position does not coincide with a mesh node");
      probe_nodes.push_back(idx);
      ProbeRecord rec;
      rec.position = mesh_.nodes[idx];
      rec.dt = dt_;
      rec.pressure.reserve(static_cast<std::size_t>(steps) + 1);
      out.records.push_back(std::move(rec));
    }

    // Filtered source samples and their time derivative. The zero-phase
    // low-pass has a symmetric precursor; the drive is delayed by a few
    // filter time constants so that precursor is fully inside t > 0 and the
    // run starts from a genuinely quiet state. H12 does not see the delay.
    std::vector<double> g(static_cast<std::size_t>(steps) + 1, 0.0);
    if (steps > 0) {
      long delay = 0;
      if (cfg_.source.lowpass_hz > 0.0)
        delay = static_cast<long>(std::ceil(5.0 / (cfg_.source.lowpass_hz * dt_)));
      std::vector<double> q(static_cast<std::size_t>(steps) + 1);
      for (long k = 0; k <= steps; ++k)
        q[k] = cfg_.source.amplitude * gaussian_pulse(k - delay, dt_, cfg_.source.t_gp);
      q = lowpass_zero_phase(q, dt_, cfg_.source.lowpass_hz);
      const double scale = -cfg_.rho0 / sys_.source.area;
      for (long k = 0; k <= steps; ++k) {
        double dq;
        if (k == 0) dq = (q[1] - q[0]) / dt_;
        else if (k == steps) dq = (q[k] - q[k - 1]) / dt_;
        else dq = (q[k + 1] - q[k - 1]) / (2.0 * dt_);
        g[k] = scale * dq;
      }
    }

    FieldState st;
    st.p_prev.assign(n, 0.0);
    st.p_cur.assign(n, 0.0);
    st.p_next.assign(n, 0.0);
    if (sys_.has_pml) {
      for (auto& v : st.phi) v.assign(n, 0.0);
      st.psi_lo.assign(n, 0.0);
      st.psi_hi.assign(n, 0.0);
    }

    const double c0 = cfg_.c0;
    const double c0sq = c0 * c0;
    const double inv_dt2 = 1.0 / (dt_ * dt_);
    std::vector<double> lhs_inv(n), damp_half(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ma = sys_.has_pml ? sys_.pml.m_alpha[i] : 0.0;
      damp_half[i] = (c0 * sys_.damping[i] + ma) / (2.0 * dt_);
      const double lhs = sys_.mass[i] * inv_dt2 + damp_half[i];
      if (!(lhs > 0.0)) throw ConfigError("node with zero lumped mass (unused node in mesh?)");
      lhs_inv[i] = 1.0 / lhs;
    }

    std::array<std::vector<double>, 3> phi_keep, phi_inv;
    std::array<SparseMatrix, 3> divergence;  // -B_i^T, the integrated-by-parts pairing
    if (sys_.has_pml) {
      for (int d = 0; d < 3; ++d) {
        divergence[d] = sys_.pml.b_plain[d].negated_transpose();
        phi_keep[d].resize(n);
        phi_inv[d].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double m_dt = sys_.mass[i] / dt_;
          const double h = 0.5 * sys_.pml.m_xi[d][i];
          phi_keep[d][i] = m_dt - h;
          phi_inv[d][i] = 1.0 / (m_dt + h);
        }
      }
    }

    std::vector<double> rhs(n), kp(n), pavg(n), scratch(n);

    // Record P^0; P^1 = 0 as well when the run is long enough to hold it.
    auto record = [&](const std::vector<double>& p) {
      for (std::size_t j = 0; j < probe_nodes.size(); ++j)
        out.records[j].pressure.push_back(p[probe_nodes[j]]);
    };
    record(st.p_cur);
    if (steps >= 1) record(st.p_cur);

    for (long ncen = 1; ncen + 1 <= steps; ++ncen) {
      // (1) advance Psi to n+1/2: after the swap psi_lo holds Psi^{n-1/2}
      // and psi_hi is the stale buffer to overwrite.
      if (sys_.has_pml) {
        std::swap(st.psi_lo, st.psi_hi);
        for (std::size_t i = 0; i < n; ++i)
          st.psi_hi[i] = st.psi_lo[i] + dt_ * st.p_cur[i];
      }

      // (2) pressure update
      sys_.stiffness.multiply(st.p_cur, kp);
      const double gn = g[ncen];
      for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = c0sq * (sys_.source.pattern[i] * gn - kp[i]) +
                 sys_.mass[i] * inv_dt2 * (2.0 * st.p_cur[i] - st.p_prev[i]) +
                 damp_half[i] * st.p_prev[i];
      }
      if (sys_.has_pml) {
        for (int d = 0; d < 3; ++d) divergence[d].multiply_add(st.phi[d], rhs);
        for (std::size_t i = 0; i < n; ++i)
          rhs[i] -= sys_.pml.m_beta[i] * st.p_cur[i] +
                    sys_.pml.m_gamma[i] * 0.5 * (st.psi_hi[i] + st.psi_lo[i]);
      }
      for (std::size_t i = 0; i < n; ++i) st.p_next[i] = rhs[i] * lhs_inv[i];

      // (3) auxiliary flux update with the trapezoidal pressure average
      if (sys_.has_pml) {
        for (std::size_t i = 0; i < n; ++i) pavg[i] = 0.5 * (st.p_next[i] + st.p_cur[i]);
        for (int d = 0; d < 3; ++d) {
          sys_.pml.b_a[d].multiply(pavg, scratch);
          sys_.pml.b_b[d].multiply_add(st.psi_hi, scratch);
          auto& phi = st.phi[d];
          for (std::size_t i = 0; i < n; ++i)
            phi[i] = (phi_keep[d][i] * phi[i] + c0sq * scratch[i]) * phi_inv[d][i];
        }
      }

      if (observer) observer(ncen, st);

      if (ncen % 100 == 0) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += st.p_next[i];
        if (!std::isfinite(s))
          throw InstabilityError("non-finite pressure (unstable time step?)", ncen + 1);
      }

      record(st.p_next);
      std::swap(st.p_prev, st.p_cur);
      std::swap(st.p_cur, st.p_next);
    }

    out.manifest.c0 = cfg_.c0;
    out.manifest.rho0 = cfg_.rho0;
    out.manifest.dt = dt_;
    out.manifest.steps = steps;
    out.manifest.mu_w = cfg_.admittances.mu_w;
    out.manifest.mu_z = cfg_.admittances.mu_z;
    out.manifest.r_inf = cfg_.r_inf;
    out.manifest.source_area = sys_.source.area;
    out.manifest.mesh_digest = fnv1a_hex(serialize_mesh(mesh_));
    for (int idx : probe_nodes) out.manifest.probe_positions.push_back(mesh_.nodes[idx]);
    return out;
  }

 private:
  const Mesh& mesh_;
  SimulationConfig cfg_;
  double dt_ = 0.0;
  PmlSpec pml_;
  AssembledSystem sys_;
};

/// One-call convenience wrapper.
inline RunResult run_simulation(const Mesh& mesh, const SimulationConfig& cfg,
                                const Simulation::Observer& observer = nullptr) {
  Simulation sim(mesh, cfg);
  return sim.run(observer);
}

/// Discrete lossless energy (1/2) Pdot' M Pdot + (1/2) c0^2 P' K P with the
/// centered velocity (P^{n+1} - P^{n-1}) / (2 dt). Constant (to O(dt^2)
/// oscillation) when damping and PML are absent and the source is off.
inline double lossless_energy(const FieldState& st, const AssembledSystem& sys, double c0,
                              double dt) {
  const std::size_t n = sys.n;
  double kinetic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (st.p_next[i] - st.p_prev[i]) / (2.0 * dt);
    kinetic += v * sys.mass[i] * v;
  }
  std::vector<double> kp(n);
  sys.stiffness.multiply(st.p_cur, kp);
  double potential = 0.0;
  for (std::size_t i = 0; i < n; ++i) potential += st.p_cur[i] * kp[i];
  return 0.5 * kinetic + 0.5 * c0 * c0 * potential;
}

}  // namespace impedukt
