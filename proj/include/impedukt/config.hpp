#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "impedukt/errors.hpp"
#include "impedukt/solver.hpp"

namespace impedukt {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// key=value run configuration. Recognized keys mirror SimulationConfig:
///   c0, rho0, dt, cfl_factor, t_total, f0, tgp, lowpass_hz, amplitude,
///   mu_w, mu_z, r_inf, probe (repeatable, "x y z")
/// '#' starts a comment.
inline SimulationConfig parse_config(std::istream& in) {
  SimulationConfig cfg;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", lineno);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    std::istringstream vs(value);
    auto num = [&](double& dst) {
      if (!(vs >> dst)) throw ParseError("bad numeric value for '" + key + "'", lineno);
    };
    if (key == "c0") num(cfg.c0);
    else if (key == "rho0") num(cfg.rho0);
    else if (key == "dt") num(cfg.dt);
    else if (key == "cfl_factor") num(cfg.cfl_factor);
    else if (key == "t_total") num(cfg.t_total);
    else if (key == "f0") { num(cfg.source.f0); cfg.source.t_gp = 0.646 / cfg.source.f0; }
    else if (key == "tgp") num(cfg.source.t_gp);
    else if (key == "lowpass_hz") num(cfg.source.lowpass_hz);
    else if (key == "amplitude") num(cfg.source.amplitude);
    else if (key == "mu_w") num(cfg.admittances.mu_w);
    else if (key == "mu_z") num(cfg.admittances.mu_z);
    else if (key == "r_inf") num(cfg.r_inf);
    else if (key == "probe") {
      Vec3 p;
      if (!(vs >> p.x >> p.y >> p.z)) throw ParseError("probe needs three coordinates", lineno);
      cfg.probes.push_back(p);
    } else {
      throw ParseError("unknown config key '" + key + "'", lineno);
    }
  }
  return cfg;
}

inline SimulationConfig read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(f);
}

inline void write_manifest(const RunManifest& m, std::ostream& os) {
  char buf[96];
  os << "version=" << m.version << "\n";
  auto kv = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.17g\n", k, v);
    os << buf;
  };
  kv("c0", m.c0);
  kv("rho0", m.rho0);
  kv("dt", m.dt);
  os << "steps=" << m.steps << "\n";
  kv("mu_w", m.mu_w);
  kv("mu_z", m.mu_z);
  kv("r_inf", m.r_inf);
  kv("source_area", m.source_area);
  os << "mesh_digest=" << m.mesh_digest << "\n";
  for (const Vec3& p : m.probe_positions) {
    std::snprintf(buf, sizeof buf, "probe=%.17g %.17g %.17g\n", p.x, p.y, p.z);
    os << buf;
  }
  for (const std::string& w : m.warnings) os << "warning=" << w << "\n";
}

/// Probe CSV: t_s,p_pa
inline void write_probe_csv(const ProbeRecord& rec, std::ostream& os) {
  os << "t_s,p_pa\n";
  char buf[80];
  for (std::size_t k = 0; k < rec.pressure.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rec.dt * static_cast<double>(k),
                  rec.pressure[k]);
    os << buf;
  }
}

inline ProbeRecord parse_probe_csv(std::istream& in) {
  ProbeRecord rec;
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty probe file", 1);
  ++lineno;
  if (detail::trim(line) != "t_s,p_pa") throw ParseError("expected header 't_s,p_pa'", lineno);
  double t_prev = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::istringstream ls(line);
    double t, p;
    char comma;
    if (!(ls >> t >> comma >> p) || comma != ',') throw ParseError("malformed probe row", lineno);
    if (rec.pressure.size() == 1) rec.dt = t - t_prev;
    rec.pressure.push_back(p);
    t_prev = t;
  }
  if (rec.pressure.size() < 2) throw ParseError("probe record needs at least 2 samples");
  return rec;
}

inline ProbeRecord read_probe_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open probe file '" + path + "'");
  return parse_probe_csv(f);
}

}  // namespace impedukt
