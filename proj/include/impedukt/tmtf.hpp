#pragma once

// Two-microphone transfer-function processing of virtual probe signals:
//   H12 = P2/P1,
//   R1  = (H12 - e^{-j kz s}) / (e^{j kz s} - H12),
//   R   = R1 e^{j 2 kz x1},
//   Z'  = (1 + R) / (1 - R),
// with x1 > x2 > 0 the probe distances from the reference surface (probe 1
// farther, toward the source) and s = x1 - x2. kz may be complex for lossy
// duct walls. Numerically awkward bins are flagged, never dropped.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "impedukt/errors.hpp"
#include "impedukt/fft.hpp"
#include "impedukt/solver.hpp"
#include "impedukt/wavenumbers.hpp"

namespace impedukt {

struct ProbeGeometry {
  double x1 = 0.0;  // distance of probe 1 from the reference surface [m]
  double x2 = 0.0;  // probe 2, closer to the reference surface [m]

  double spacing() const { return std::abs(x1 - x2); }
  void validate() const {
    if (!(x1 > x2 && x2 > 0.0))
      throw DomainError("probe geometry requires x1 > x2 > 0 (probe 1 farther from the reference surface)");
  }
};

enum class BinFlag : std::uint8_t { Ok, Invalid, Singular, Pole, AboveCutoff };

inline const char* bin_flag_name(BinFlag f) {
  switch (f) {
    case BinFlag::Ok: return "ok";
    case BinFlag::Invalid: return "invalid";
    case BinFlag::Singular: return "singular";
    case BinFlag::Pole: return "pole";
    case BinFlag::AboveCutoff: return "above_cutoff";
  }
  return "ok";
}

enum class Window : std::uint8_t { Rectangular };

/// Full-record DFTs of the two probe signals plus the decay diagnostics:
/// tail_ratio = max |p| over the last 10% of samples / global max |p|.
struct ProbeSpectra {
  double df = 0.0;  // bin width 1/(N dt)
  std::size_t samples = 0;
  std::vector<cdouble> p1, p2;
  double tail_ratio_1 = 0.0, tail_ratio_2 = 0.0;
  bool decay_warning = false;  // tail above 1% of peak on either record
};

namespace detail {

inline double tail_ratio(const std::vector<double>& p) {
  double peak = 0.0;
  for (double v : p) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  const std::size_t tail_start = p.size() - std::max<std::size_t>(1, p.size() / 10);
  double tail = 0.0;
  for (std::size_t i = tail_start; i < p.size(); ++i) tail = std::max(tail, std::abs(p[i]));
  return tail / peak;
}

}  // namespace detail

inline ProbeSpectra spectra_from_probes(const ProbeRecord& r1, const ProbeRecord& r2,
                                        Window window = Window::Rectangular) {
  (void)window;  // rectangular over the fully decayed record; nothing else needed
  if (r1.pressure.size() != r2.pressure.size() || r1.dt != r2.dt)
    throw DomainError("probe records must share sampling rate and length");
  if (r1.pressure.empty()) throw DomainError("empty probe records");
  ProbeSpectra s;
  s.samples = r1.pressure.size();
  s.df = 1.0 / (r1.dt * static_cast<double>(s.samples));
  s.tail_ratio_1 = detail::tail_ratio(r1.pressure);
  s.tail_ratio_2 = detail::tail_ratio(r2.pressure);
  s.decay_warning = s.tail_ratio_1 >= 0.01 || s.tail_ratio_2 >= 0.01;
  s.p1 = dft_real(r1.pressure);
  s.p2 = dft_real(r2.pressure);
  return s;
}

/// Bin-wise H12 = P2/P1; bins with |P1| under 1e-12 of its peak are flagged
/// invalid instead of divided.
struct TransferFunction {
  std::vector<cdouble> h12;
  std::vector<std::uint8_t> invalid;
};

inline TransferFunction transfer_function(const std::vector<cdouble>& p1,
                                          const std::vector<cdouble>& p2) {
  if (p1.size() != p2.size()) throw DomainError("spectra must share the frequency grid");
  double peak = 0.0;
  for (const auto& v : p1) peak = std::max(peak, std::abs(v));
  const double floor = 1e-12 * peak;
  TransferFunction tf;
  tf.h12.resize(p1.size());
  tf.invalid.assign(p1.size(), 0);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (std::abs(p1[i]) < floor || peak == 0.0) {
      tf.invalid[i] = 1;
      tf.h12[i] = cdouble(0.0, 0.0);
    } else {
      tf.h12[i] = p2[i] / p1[i];
    }
  }
  return tf;
}

/// Reflection coefficient at probe 1 (the x1-local intermediate).
inline cdouble reflection_at_probe(cdouble h12, double s, cdouble kz) {
  const cdouble j(0.0, 1.0);
  return (h12 - std::exp(-j * kz * s)) / (std::exp(j * kz * s) - h12);
}

/// Translation of a probe-local reflection to the reference surface.
inline cdouble translate_reflection(cdouble r1, double x1, cdouble kz) {
  const cdouble j(0.0, 1.0);
  return r1 * std::exp(j * 2.0 * kz * x1);
}

/// Combined Eq. for the reference-surface reflection; *singular receives true
/// when |e^{j kz s} - H12| < 1e-12.
inline cdouble reflection_at_reference(cdouble h12, const ProbeGeometry& geom, cdouble kz,
                                       bool* singular = nullptr) {
  const cdouble j(0.0, 1.0);
  const cdouble denom = std::exp(j * kz * geom.spacing()) - h12;
  if (singular) *singular = std::abs(denom) < 1e-12;
  return translate_reflection((h12 - std::exp(-j * kz * geom.spacing())) / denom, geom.x1, kz);
}

/// Moebius map R -> (1+R)/(1-R); *pole receives true at R = 1 bins.
inline cdouble normalized_impedance(cdouble r, bool* pole = nullptr) {
  const cdouble denom = 1.0 - r;
  const bool is_pole = std::abs(denom) < 1e-12;
  if (pole) *pole = is_pole;
  if (is_pole)
    return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  return (1.0 + r) / denom;
}

/// Per-frequency reflection and normalized impedance at the reference surface.
struct ImpedanceSpectrum {
  struct Bin {
    double f = 0.0;
    cdouble reflection;
    cdouble impedance;  // Z/Z0 = resistance + j reactance
    BinFlag flag = BinFlag::Ok;
  };
  std::vector<Bin> bins;
  std::vector<std::string> warnings;
};

/// Frequency-domain core of the TMTF pipeline, shared by extract_impedance
/// and the synthetic-field tests. Probe spectra arrive on the DFT grid df.
inline ImpedanceSpectrum extract_from_spectra(const std::vector<cdouble>& p1,
                                              const std::vector<cdouble>& p2, double df,
                                              ProbeGeometry geom, const LossyDuctModel& duct,
                                              double f_max) {
  geom.validate();
  if (!(f_max > 0.0)) throw DomainError("f_max must be positive");
  const auto tf = transfer_function(p1, p2);

  ImpedanceSpectrum out;
  double cutoff = 0.0;
  if (duct.section.circular()) {
    cutoff = centerline_limit_hz(duct.section.a_major, duct.c0);
    if (f_max > cutoff)
      out.warnings.push_back("f_max exceeds the centerline-limiting cutoff (" +
                             std::to_string(cutoff) + " Hz); bins above it are flagged");
  }
  if (duct.mu_z > 0.0) {
    // Frequency below which the first-order wall-loss correction passes 0.5.
    const double f_soft = 2.0 * duct.correction_term(1.0);
    if (f_soft > df)
      out.warnings.push_back("wall-loss correction exceeds 0.5 below " + std::to_string(f_soft) +
                             " Hz; complex wavenumber is first-order only there");
  }

  const std::size_t half = p1.size() / 2;
  for (std::size_t k = 1; k <= half; ++k) {
    const double f = df * static_cast<double>(k);
    if (f > f_max) break;
    ImpedanceSpectrum::Bin bin;
    bin.f = f;
    if (tf.invalid[k]) {
      bin.flag = BinFlag::Invalid;
      out.bins.push_back(bin);
      continue;
    }
    const cdouble kz = kz_for(f, duct);
    bool singular = false, pole = false;
    bin.reflection = reflection_at_reference(tf.h12[k], geom, kz, &singular);
    bin.impedance = normalized_impedance(bin.reflection, &pole);
    if (singular) bin.flag = BinFlag::Singular;
    else if (pole) bin.flag = BinFlag::Pole;
    else if (cutoff > 0.0 && f > cutoff) bin.flag = BinFlag::AboveCutoff;
    out.bins.push_back(bin);
  }
  return out;
}

/// End-to-end: records -> spectra (with decay check) -> H12 -> R -> Z'.
/// A tail above 10% of the record peak is an error (the Fourier transform of
/// an undecayed record is unusable); above 1% it is a warning. Probe labels
/// are normalized so the farther probe plays the role of probe 1.
inline ImpedanceSpectrum extract_impedance(const ProbeRecord& rec1, const ProbeRecord& rec2,
                                           ProbeGeometry geom, const LossyDuctModel& duct,
                                           double f_max) {
  const ProbeRecord* r1 = &rec1;
  const ProbeRecord* r2 = &rec2;
  if (geom.x1 < geom.x2) {
    std::swap(r1, r2);
    std::swap(geom.x1, geom.x2);
  }
  geom.validate();

  const ProbeSpectra sp = spectra_from_probes(*r1, *r2);
  if (sp.tail_ratio_1 > 0.10 || sp.tail_ratio_2 > 0.10)
    throw DomainError("probe records have not decayed (tail above 10% of peak); simulate longer or add wall losses");

  ImpedanceSpectrum out = extract_from_spectra(sp.p1, sp.p2, sp.df, geom, duct, f_max);
  if (sp.decay_warning)
    out.warnings.push_back("probe tail above 1% of peak; spectra may carry truncation leakage");
  return out;
}

/// CSV: f_hz,re_R,im_R,resistance,reactance,flag
inline void write_impedance_csv(const ImpedanceSpectrum& s, std::ostream& os) {
  os << "f_hz,re_R,im_R,resistance,reactance,flag\n";
  char buf[192];
  for (const auto& b : s.bins) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g,%.17g,%s\n", b.f, b.reflection.real(),
                  b.reflection.imag(), b.impedance.real(), b.impedance.imag(),
                  bin_flag_name(b.flag));
    os << buf;
  }
}

}  // namespace impedukt
