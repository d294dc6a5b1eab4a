#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "impedukt/errors.hpp"
#include "impedukt/geometry.hpp"

namespace impedukt {

/// Complete elliptic integral of the second kind as a function of the
/// eccentricity, via the even-power series
///   I(e) = (pi/2) * [1 - sum_{n>=1} ((2n-1)!!/(2n)!!)^2 e^{2n}/(2n-1)],
/// summed until a term drops below 1e-14 of the partial sum.
inline double elliptic_I(double e) {
  if (!(e >= 0.0 && e < 1.0)) throw DomainError("elliptic_I requires 0 <= e < 1");
  const double e2 = e * e;
  double coeff = 0.25;  // ((2n-1)!!/(2n)!!)^2 / (2n-1), n = 1
  double epow = e2;
  double sum = coeff * epow;
  for (int n = 2; n < 10000; ++n) {
    coeff *= static_cast<double>((2 * n - 1) * (2 * n - 3)) / static_cast<double>(4 * n * n);
    epow *= e2;
    const double term = coeff * epow;
    sum += term;
    if (term < 1e-14 * (1.0 - sum)) break;
  }
  return 0.5 * std::numbers::pi * (1.0 - sum);
}

/// Uniform lossy duct: geometry plus wall admittance, enough to evaluate
/// the complex axial wavenumber at any frequency.
struct LossyDuctModel {
  EllipseSection section;
  double mu_z = 0.0;   // boundary admittance coefficient, rho0*c0/Z_w
  double c0 = 345.0;   // [m/s]

  /// First-order wall-loss correction 4*mu*I(e)/(k0*pi*b). The small-mu
  /// derivation degrades once this reaches ~0.5 (soft-wall regime).
  double correction_term(double f) const {
    const double k0 = 2.0 * std::numbers::pi * f / c0;
    return 4.0 * mu_z * elliptic_I(section.eccentricity()) /
           (k0 * std::numbers::pi * section.b_minor);
  }
  bool hard_wall_regime(double f) const { return correction_term(f) < 0.5; }
};

/// Axial wavenumber of a lossy elliptical duct,
///   k_z = k0 * sqrt(1 - j * 4 mu_z I(e) / (k0 pi b_e)),
/// principal branch, Im(k_z) <= 0 (e^{-j k_z x} propagation decays).
inline std::complex<double> kz_elliptical(double f, const LossyDuctModel& m) {
  if (!(f > 0.0)) throw DomainError("frequency must be positive");
  const double k0 = 2.0 * std::numbers::pi * f / m.c0;
  const double corr = 4.0 * m.mu_z * elliptic_I(m.section.eccentricity()) /
                      (k0 * std::numbers::pi * m.section.b_minor);
  return k0 * std::sqrt(std::complex<double>(1.0, -corr));
}

/// Circular specialization, k_z = k0 * sqrt(1 - j * 2 mu_z / (k0 a)).
inline std::complex<double> kz_circular(double f, double radius, double mu_z, double c0) {
  if (!(f > 0.0)) throw DomainError("frequency must be positive");
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  const double k0 = 2.0 * std::numbers::pi * f / c0;
  return k0 * std::sqrt(std::complex<double>(1.0, -2.0 * mu_z / (k0 * radius)));
}

/// Wavenumber for a duct model, dispatching on the section shape.
inline std::complex<double> kz_for(double f, const LossyDuctModel& m) {
  if (m.section.circular()) return kz_circular(f, m.section.a_major, m.mu_z, m.c0);
  return kz_elliptical(f, m);
}

/// Admittance for duct i that reproduces duct j's axial wavenumber at every
/// frequency: mu_i = mu_j * (I(e_j)/I(e_i)) * (b_i/b_j).
inline double match_admittance(double mu_j, double ecc_j, double b_minor_j, double ecc_i,
                               double b_minor_i) {
  if (!(b_minor_j > 0.0 && b_minor_i > 0.0)) throw DomainError("semi-axes must be positive");
  return mu_j * (elliptic_I(ecc_j) / elliptic_I(ecc_i)) * (b_minor_i / b_minor_j);
}

/// One non-planar circular-duct mode: cutoff frequency and whether it is the
/// first mode without a nodal line through the centerline (the mode that
/// limits centerline probing).
struct DuctMode {
  std::string label;
  double cutoff_hz = 0.0;
  bool centerline_limiting = false;
};

/// First three non-planar cutoffs of a circular duct, f = z' * c0 / (2 pi a)
/// with the Bessel-derivative zeros at full precision. The (0,1) mode has no
/// centerline nodal line and therefore limits centerline probes.
inline std::vector<DuctMode> circular_cutoffs(double radius, double c0) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  constexpr double j1p1 = 1.8411837813406593;  // first zero of J1'
  constexpr double j2p1 = 3.0542369282271403;  // first zero of J2'
  constexpr double j0p2 = 3.8317059702075123;  // second zero of J0' (= first of J1)
  const double scale = c0 / (2.0 * std::numbers::pi * radius);
  return {{"(1,0)", j1p1 * scale, false},
          {"(2,0)", j2p1 * scale, false},
          {"(0,1)", j0p2 * scale, true}};
}

/// Centerline-limiting cutoff of a circular duct (the (0,1) mode).
inline double centerline_limit_hz(double radius, double c0) {
  return circular_cutoffs(radius, c0).back().cutoff_hz;
}

/// Virtual-microphone placement advice for a maximum analysis frequency.
struct SpacingAdvice {
  double lambda_min = 0.0;  // c0 / f_max
  double s_min = 0.0;       // max(h, 0.1 lambda_min)
  double s_max = 0.0;       // 0.4 lambda_min
  double s_opt = 0.0;       // 0.25 lambda_min
  double x1_min = 0.0;      // 2.1 * a_major (0 when no section given)
  bool mesh_limited = false;
};

inline SpacingAdvice spacing_advice(double f_max, double c0, double h, double a_major = 0.0) {
  if (!(f_max > 0.0)) throw DomainError("f_max must be positive");
  if (!(h > 0.0)) throw DomainError("mesh size must be positive");
  SpacingAdvice adv;
  adv.lambda_min = c0 / f_max;
  adv.s_max = 0.4 * adv.lambda_min;
  if (h >= adv.s_max) throw DomainError("mesh too coarse: h >= 0.4 * lambda_min leaves no valid spacing");
  adv.mesh_limited = h > 0.1 * adv.lambda_min;
  adv.s_min = std::max(h, 0.1 * adv.lambda_min);
  adv.s_opt = 0.25 * adv.lambda_min;
  adv.x1_min = 2.1 * a_major;
  return adv;
}

/// Conditioning of the 2x2 plane-wave decomposition for spacing s at
/// frequency f: sqrt((1+|cos ks|)/(1-|cos ks|)). Diverges at s = m*lambda/2,
/// minimal (=1) at s = lambda/4. Depends on the probes only through s.
inline double sensitivity_proxy(double s, double f, double c0) {
  if (!(s > 0.0)) throw DomainError("spacing must be positive");
  if (!(f > 0.0)) throw DomainError("frequency must be positive");
  const double ks = 2.0 * std::numbers::pi * f / c0 * s;
  const double c = std::abs(std::cos(ks));
  const double denom = 1.0 - c;
  if (denom < 1e-30) return std::numeric_limits<double>::infinity();
  return std::sqrt((1.0 + c) / denom);
}

}  // namespace impedukt
