// impedukt: duct-acoustics impedance toolbox.
//
// Pipeline: `mesh` builds a tagged tetrahedral mesh, `simulate` runs the
// explicit time-domain solve and records virtual microphones, `impedance`
// applies the two-microphone transfer-function method to the records.
// `advise`, `modes` and `oracle` are stand-alone helpers.

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "impedukt/config.hpp"
#include "impedukt/geometry.hpp"
#include "impedukt/mesh_gen.hpp"
#include "impedukt/mesh_io.hpp"
#include "impedukt/oracles.hpp"
#include "impedukt/solver.hpp"
#include "impedukt/tmtf.hpp"
#include "impedukt/version.hpp"
#include "impedukt/wavenumbers.hpp"

namespace fs = std::filesystem;
using namespace impedukt;

namespace {

CLI::App* sub(CLI::App* parent, const std::string& name, const std::string& desc) {
  CLI::App* s = parent->add_subcommand(name, desc);
  s->set_help_flag("--help", "print help");
  return s;
}

struct SectionFlags {
  double radius = 0.0;
  double a_major = 0.0;
  double b_minor = 0.0;
  double area = 0.0;
  double ecc = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--radius", radius, "circular section radius [m]");
    cmd->add_option("--a-major", a_major, "major semi-axis [m]");
    cmd->add_option("--b-minor", b_minor, "minor semi-axis [m]");
    cmd->add_option("--area", area, "section area [m^2] (with --ecc)");
    cmd->add_option("--ecc", ecc, "eccentricity in [0,1)");
  }

  EllipseSection resolve() const {
    if (radius > 0.0) return circular_section(radius);
    if (a_major > 0.0 && b_minor > 0.0) {
      if (b_minor > a_major) throw DomainError("--b-minor must not exceed --a-major");
      return EllipseSection{a_major, b_minor};
    }
    if (area > 0.0) return make_elliptical_section(area, ecc);
    throw DomainError("give --radius, or --a-major with --b-minor, or --area with --ecc");
  }
};

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << contents;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  return f;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"impedukt: time-domain duct impedance toolbox"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  // ---- mesh ----------------------------------------------------------
  auto* mesh_cmd = sub(&app, "mesh", "generate tagged tetrahedral meshes");
  mesh_cmd->require_subcommand(1);

  SectionFlags duct_sec;
  double duct_length = 0.1, duct_h = 0.0025;
  std::string duct_out = "duct.mesh", duct_term = "closed";
  auto* duct_cmd = sub(mesh_cmd, "duct", "uniform impedance duct");
  duct_sec.attach(duct_cmd);
  duct_cmd->add_option("--length", duct_length, "duct length [m]");
  duct_cmd->add_option("--h", duct_h, "target element size [m]");
  duct_cmd->add_option("--termination", duct_term, "closed|flanged|coupled");
  duct_cmd->add_option("--out", duct_out, "output mesh path");

  SectionFlags rad_sec;
  double rad_length = 0.1, rad_h = 0.0025, rad_pml = 0.04, rad_hbox = 0.008, rad_hpml = 0.012;
  std::vector<double> rad_box{0.1, 0.1, 0.08};
  std::string rad_out = "radiation.mesh";
  auto* rad_cmd = sub(mesh_cmd, "radiation-domain", "open-flanged duct in a PML-wrapped box");
  rad_sec.attach(rad_cmd);
  rad_cmd->add_option("--length", rad_length, "duct length [m]");
  rad_cmd->add_option("--h", rad_h, "duct element size [m]");
  rad_cmd->add_option("--box", rad_box, "interior box dims x y z [m]")->expected(3);
  rad_cmd->add_option("--pml-width", rad_pml, "PML shell thickness [m]");
  rad_cmd->add_option("--h-box", rad_hbox, "box element size [m]");
  rad_cmd->add_option("--h-pml", rad_hpml, "PML element size [m]");
  rad_cmd->add_option("--out", rad_out, "output mesh path");

  std::string tract_af, tract_out = "tract.mesh";
  double tract_h = 0.002;
  auto* tract_cmd = sub(mesh_cmd, "tract", "lofted duct from an area function");
  tract_cmd->add_option("--area-function", tract_af, "CSV z_m,area_m2,eccentricity")->required();
  tract_cmd->add_option("--h", tract_h, "target element size [m]");
  tract_cmd->add_option("--out", tract_out, "output mesh path");

  // ---- simulate ------------------------------------------------------
  std::string sim_mesh, sim_config, sim_out = ".";
  double sim_mu_w = -1.0, sim_mu_z = -1.0, sim_rinf = -1.0, sim_ttotal = -1.0, sim_dt = -1.0;
  auto* sim_cmd = sub(&app, "simulate", "run the time-domain solve, record probes");
  sim_cmd->add_option("--mesh", sim_mesh, "mesh file")->required();
  sim_cmd->add_option("--config", sim_config, "key=value run configuration")->required();
  sim_cmd->add_option("--out", sim_out, "output directory");
  sim_cmd->add_option("--mu-w", sim_mu_w, "override mu_w");
  sim_cmd->add_option("--mu-z", sim_mu_z, "override mu_z");
  sim_cmd->add_option("--rinf", sim_rinf, "override PML design reflection");
  sim_cmd->add_option("--t-total", sim_ttotal, "override simulated time [s]");
  sim_cmd->add_option("--dt", sim_dt, "override time step [s]");

  // ---- impedance -----------------------------------------------------
  SectionFlags imp_sec;
  std::string imp_p1, imp_p2, imp_out = "impedance.csv";
  double imp_x1 = 0.0, imp_x2 = 0.0, imp_mu_z = 0.01, imp_c0 = 345.0, imp_fmax = 10000.0;
  auto* imp_cmd = sub(&app, "impedance", "TMTF processing of two probe records");
  imp_cmd->add_option("--probe1", imp_p1, "CSV of the probe farther from the reference surface")
      ->required();
  imp_cmd->add_option("--probe2", imp_p2, "CSV of the probe nearer the reference surface")
      ->required();
  imp_cmd->add_option("--x1", imp_x1, "probe 1 distance from the reference surface [m]")
      ->required();
  imp_cmd->add_option("--x2", imp_x2, "probe 2 distance [m]")->required();
  imp_sec.attach(imp_cmd);
  imp_cmd->add_option("--mu-z", imp_mu_z, "duct wall admittance");
  imp_cmd->add_option("--c0", imp_c0, "speed of sound [m/s]");
  imp_cmd->add_option("--fmax", imp_fmax, "highest frequency to report [Hz]");
  imp_cmd->add_option("--out", imp_out, "output CSV");

  // ---- advise --------------------------------------------------------
  double adv_fmax = 10000.0, adv_h = 0.001, adv_c0 = 345.0, adv_a = 0.0;
  auto* adv_cmd = sub(&app, "advise", "microphone spacing and placement advice");
  adv_cmd->add_option("--fmax", adv_fmax, "maximum analysis frequency [Hz]")->required();
  adv_cmd->add_option("--h", adv_h, "mesh size inside the duct [m]")->required();
  adv_cmd->add_option("--c0", adv_c0, "speed of sound [m/s]");
  adv_cmd->add_option("--radius", adv_a, "duct radius / major semi-axis [m]");

  // ---- modes ---------------------------------------------------------
  double modes_a = 0.0, modes_c0 = 345.0;
  std::string modes_out;
  auto* modes_cmd = sub(&app, "modes", "circular-duct cutoff frequencies");
  modes_cmd->add_option("--radius", modes_a, "duct radius [m]")->required();
  modes_cmd->add_option("--c0", modes_c0, "speed of sound [m/s]");
  modes_cmd->add_option("--out", modes_out, "output CSV (default: stdout)");

  // ---- oracle --------------------------------------------------------
  auto* oracle_cmd = sub(&app, "oracle", "analytic reference curves");
  oracle_cmd->require_subcommand(1);

  double pis_min = 0.05, pis_max = 2.0;
  int pis_n = 100;
  std::string pis_out;
  auto* pis_cmd = sub(oracle_cmd, "piston", "flanged circular piston impedance");
  pis_cmd->add_option("--ka-min", pis_min, "lowest ka");
  pis_cmd->add_option("--ka-max", pis_max, "highest ka");
  pis_cmd->add_option("--n", pis_n, "number of points");
  pis_cmd->add_option("--out", pis_out, "output CSV (default: stdout)");

  double ell_min = 0.0, ell_max = 0.95;
  int ell_n = 96;
  std::string ell_out;
  auto* ell_cmd = sub(oracle_cmd, "elliptic", "elliptic integral I(e) by quadrature");
  ell_cmd->add_option("--e-min", ell_min, "lowest eccentricity");
  ell_cmd->add_option("--e-max", ell_max, "highest eccentricity");
  ell_cmd->add_option("--n", ell_n, "number of points");
  ell_cmd->add_option("--out", ell_out, "output CSV (default: stdout)");

  double dm_length = 0.1, dm_c0 = 345.0;
  int dm_n = 5;
  std::string dm_out;
  auto* dm_cmd = sub(oracle_cmd, "duct-modes", "closed-closed duct resonances");
  dm_cmd->add_option("--length", dm_length, "duct length [m]")->required();
  dm_cmd->add_option("--c0", dm_c0, "speed of sound [m/s]");
  dm_cmd->add_option("--n", dm_n, "number of modes");
  dm_cmd->add_option("--out", dm_out, "output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 1;
  }

  try {
    if (duct_cmd->parsed()) {
      Termination term = Termination::ClosedRigid;
      if (duct_term == "flanged") term = Termination::OpenFlanged;
      else if (duct_term == "coupled") term = Termination::Coupled;
      else if (duct_term != "closed") throw DomainError("unknown termination '" + duct_term + "'");
      std::vector<std::string> warnings;
      const Mesh m = generate_duct_mesh({duct_sec.resolve(), duct_length, duct_h, term}, &warnings);
      print_warnings(warnings);
      write_mesh(m, duct_out);
      std::cerr << "wrote " << duct_out << ": " << m.nodes.size() << " nodes, " << m.tets.size()
                << " tets\n";
    } else if (rad_cmd->parsed()) {
      std::vector<std::string> warnings;
      const DuctSpec spec{rad_sec.resolve(), rad_length, rad_h, Termination::OpenFlanged};
      const Mesh m = generate_radiation_domain(spec, {rad_box[0], rad_box[1], rad_box[2]}, rad_pml,
                                               rad_hbox, rad_hpml, &warnings);
      print_warnings(warnings);
      write_mesh(m, rad_out);
      std::cerr << "wrote " << rad_out << ": " << m.nodes.size() << " nodes, " << m.tets.size()
                << " tets\n";
    } else if (tract_cmd->parsed()) {
      const AreaFunction af = read_area_function(tract_af);
      std::vector<std::string> warnings;
      const Mesh m = generate_tract_mesh(af, tract_h, &warnings);
      print_warnings(warnings);
      write_mesh(m, tract_out);
      std::cerr << "wrote " << tract_out << ": " << m.nodes.size() << " nodes, " << m.tets.size()
                << " tets\n";
    } else if (sim_cmd->parsed()) {
      const Mesh m = read_mesh(sim_mesh);
      m.validate();
      SimulationConfig cfg = read_config(sim_config);
      if (sim_mu_w >= 0.0) cfg.admittances.mu_w = sim_mu_w;
      if (sim_mu_z >= 0.0) cfg.admittances.mu_z = sim_mu_z;
      if (sim_rinf > 0.0) cfg.r_inf = sim_rinf;
      if (sim_ttotal >= 0.0) cfg.t_total = sim_ttotal;
      if (sim_dt > 0.0) cfg.dt = sim_dt;
      if (cfg.probes.empty()) throw ConfigError("config defines no probes");

      // Snap requested probes to mesh nodes; report what moved.
      std::vector<std::string> warnings;
      for (Vec3& p : cfg.probes) {
        const int idx = m.nearest_node(p);
        const double moved = (m.nodes[idx] - p).norm();
        if (moved > 1e-9) {
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "probe (%g, %g, %g) snapped to mesh node (%g, %g, %g), moved %.3g m", p.x,
                        p.y, p.z, m.nodes[idx].x, m.nodes[idx].y, m.nodes[idx].z, moved);
          warnings.push_back(buf);
        }
        p = m.nodes[idx];
      }

      auto result = run_simulation(m, cfg);
      result.manifest.warnings = warnings;
      print_warnings(warnings);

      fs::create_directories(sim_out);
      for (std::size_t i = 0; i < result.records.size(); ++i) {
        auto f = open_out(sim_out + "/probe_" + std::to_string(i + 1) + ".csv");
        write_probe_csv(result.records[i], f);
      }
      auto mf = open_out(sim_out + "/manifest.txt");
      write_manifest(result.manifest, mf);
      std::cerr << "simulated " << result.manifest.steps << " steps at dt=" << result.manifest.dt
                << " s; wrote " << result.records.size() << " probe records to " << sim_out << "\n";
    } else if (imp_cmd->parsed()) {
      const ProbeRecord r1 = read_probe_csv(imp_p1);
      const ProbeRecord r2 = read_probe_csv(imp_p2);
      const LossyDuctModel duct{imp_sec.resolve(), imp_mu_z, imp_c0};
      const auto spectrum = extract_impedance(r1, r2, {imp_x1, imp_x2}, duct, imp_fmax);
      print_warnings(spectrum.warnings);
      auto f = open_out(imp_out);
      write_impedance_csv(spectrum, f);
      std::cerr << "wrote " << imp_out << ": " << spectrum.bins.size() << " bins\n";
    } else if (adv_cmd->parsed()) {
      const auto adv = spacing_advice(adv_fmax, adv_c0, adv_h, adv_a);
      std::printf("lambda_min = %.6g m\n", adv.lambda_min);
      std::printf("s_min      = %.6g m%s\n", adv.s_min, adv.mesh_limited ? "  (mesh-limited)" : "");
      std::printf("s_opt      = %.6g m\n", adv.s_opt);
      std::printf("s_max      = %.6g m\n", adv.s_max);
      if (adv.x1_min > 0.0) std::printf("x1_min     = %.6g m\n", adv.x1_min);
      std::printf("sensitivity proxy at s_opt: %.4g\n",
                  sensitivity_proxy(adv.s_opt, adv_fmax, adv_c0));
    } else if (modes_cmd->parsed()) {
      std::string csv = "label,f_hz,centerline_limiting\n";
      for (const auto& mode : circular_cutoffs(modes_a, modes_c0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "\"%s\",%.6f,%d\n", mode.label.c_str(), mode.cutoff_hz,
                      mode.centerline_limiting ? 1 : 0);
        csv += buf;
      }
      if (modes_out.empty()) std::fputs(csv.c_str(), stdout);
      else write_file(modes_out, csv);
    } else if (pis_cmd->parsed()) {
      std::string csv = "ka,resistance,reactance\n";
      for (int i = 0; i < pis_n; ++i) {
        const double ka = pis_min + (pis_max - pis_min) * i / std::max(1, pis_n - 1);
        const auto z = oracles::flanged_piston_impedance(ka);
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.8g,%.12g,%.12g\n", ka, z.real(), z.imag());
        csv += buf;
      }
      if (pis_out.empty()) std::fputs(csv.c_str(), stdout);
      else write_file(pis_out, csv);
    } else if (ell_cmd->parsed()) {
      std::string csv = "e,I_quadrature\n";
      for (int i = 0; i < ell_n; ++i) {
        const double e = ell_min + (ell_max - ell_min) * i / std::max(1, ell_n - 1);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.8g,%.14g\n", e,
                      oracles::quadrature_elliptic_integral(e));
        csv += buf;
      }
      if (ell_out.empty()) std::fputs(csv.c_str(), stdout);
      else write_file(ell_out, csv);
    } else if (dm_cmd->parsed()) {
      std::string csv = "n,f_hz\n";
      const auto modes = oracles::closed_duct_modes(dm_length, dm_c0, dm_n);
      for (std::size_t i = 0; i < modes.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu,%.8f\n", i + 1, modes[i]);
        csv += buf;
      }
      if (dm_out.empty()) std::fputs(csv.c_str(), stdout);
      else write_file(dm_out, csv);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
