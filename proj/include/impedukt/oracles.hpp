#pragma once

// Independent references used by tests and acceptance checks. Nothing here
// shares numerical kernels with the production modules: elliptic integrals
// are done by quadrature (the main path uses a series), and the Bessel and
// Struve functions below appear nowhere else in the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "impedukt/errors.hpp"

namespace impedukt::oracles {

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature to absolute tolerance tol.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int max_depth = 48) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = detail::simpson(a, b, fa, fm, fb);
  return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Complete elliptic integral of the second kind by direct quadrature of
/// int_0^{pi/2} sqrt(1 - e^2 cos^2(eta)) d(eta). Valid through e = 1.
inline double quadrature_elliptic_integral(double e) {
  if (!(e >= 0.0 && e <= 1.0)) throw DomainError("quadrature_elliptic_integral requires 0 <= e <= 1");
  const double e2 = e * e;
  return adaptive_simpson(
      [e2](double eta) {
        const double c = std::cos(eta);
        return std::sqrt(std::max(0.0, 1.0 - e2 * c * c));
      },
      0.0, 0.5 * std::numbers::pi, 1e-13);
}

/// Closed-closed duct resonances f_n = n c0 / (2 L), n = 1..n_max.
inline std::vector<double> closed_duct_modes(double length, double c0, int n_max) {
  if (!(length > 0.0)) throw DomainError("duct length must be positive");
  std::vector<double> modes;
  modes.reserve(static_cast<std::size_t>(std::max(0, n_max)));
  for (int n = 1; n <= n_max; ++n)
    modes.push_back(static_cast<double>(n) * c0 / (2.0 * length));
  return modes;
}

namespace detail {

// J1 by power series (small x) or Hankel asymptotics (large x).
inline double bessel_j1(double x) {
  const double ax = std::abs(x);
  double result;
  if (ax <= 14.0) {
    const double q = 0.25 * ax * ax;
    double term = 0.5 * ax;  // m = 0: (x/2) / (0! 1!)
    double sum = term;
    for (int m = 1; m < 200; ++m) {
      term *= -q / (static_cast<double>(m) * static_cast<double>(m + 1));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
    }
    result = sum;
  } else {
    // Hankel asymptotics: J1(x) = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)],
    // chi = x - 3 pi/4, term_k = prod_{i<=k} (4 - (2i-1)^2) / (k! (8x)^k),
    // P = 1 - term_2 + term_4 - ..., Q = term_1 - term_3 + ...
    double term = 1.0;
    double p = 1.0, q = 0.0;
    double prev = 1e300;
    for (int k = 1; k <= 20; ++k) {
      term *= (4.0 - static_cast<double>((2 * k - 1) * (2 * k - 1))) /
              (8.0 * static_cast<double>(k) * ax);
      if (std::abs(term) > prev) break;  // asymptotic series started diverging
      prev = std::abs(term);
      const int r = k % 4;
      if (r == 1) q += term;
      else if (r == 2) p -= term;
      else if (r == 3) q -= term;
      else p += term;
    }
    const double chi = ax - 0.75 * std::numbers::pi;
    result = std::sqrt(2.0 / (std::numbers::pi * ax)) * (p * std::cos(chi) - q * std::sin(chi));
  }
  return x < 0.0 ? -result : result;
}

// Y1 asymptotic, only needed as a stepping stone for large-argument H1.
inline double bessel_y1_asymptotic(double x) {
  double term = 1.0;
  double p = 1.0, q = 0.0;
  double prev = 1e300;
  for (int k = 1; k <= 20; ++k) {
    term *= (4.0 - static_cast<double>((2 * k - 1) * (2 * k - 1))) /
            (8.0 * static_cast<double>(k) * x);
    if (std::abs(term) > prev) break;
    prev = std::abs(term);
    const int r = k % 4;
    if (r == 1) q += term;
    else if (r == 2) p -= term;
    else if (r == 3) q -= term;
    else p += term;
  }
  const double chi = x - 0.75 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

// Struve H1: power series for small x, Y1 + asymptotic tail for large x.
inline double struve_h1(double x) {
  const double ax = std::abs(x);
  if (ax <= 14.0) {
    const double q = 0.25 * ax * ax;
    // m = 0 term: (x/2)^2 / (Gamma(3/2) Gamma(5/2)) = (x/2)^2 * 8 / (3 pi)
    double term = q * 8.0 / (3.0 * std::numbers::pi);
    double sum = term;
    for (int m = 1; m < 200; ++m) {
      term *= -q / ((static_cast<double>(m) + 0.5) * (static_cast<double>(m) + 1.5));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
    }
    return sum;
  }
  // H1(x) - Y1(x) ~ (2/pi) [1 + 1/x^2 - 3/x^4 + 45/x^6 - 1575/x^8 + ...]
  const double inv2 = 1.0 / (ax * ax);
  const double tail = 1.0 + inv2 * (1.0 + inv2 * (-3.0 + inv2 * (45.0 + inv2 * -1575.0)));
  return bessel_y1_asymptotic(ax) + 2.0 / std::numbers::pi * tail;
}

}  // namespace detail

/// Normalized radiation impedance of a rigid circular piston in an infinite
/// flange: Z' = 1 - J1(2ka)/(ka) + j H1(2ka)/(ka).
inline std::complex<double> flanged_piston_impedance(double ka) {
  if (!(ka > 0.0)) throw DomainError("ka must be positive");
  const double x = 2.0 * ka;
  return {1.0 - detail::bessel_j1(x) / ka, detail::struve_h1(x) / ka};
}

/// Synthetic two-probe plane-wave pressure field in a duct:
///   p(x) = A (e^{+j k x} + R0 e^{-j k x}),
/// with x the distance from the reference surface measured into the duct, so
/// the incident wave travels toward the reference surface and decays along
/// its path when Im(k) < 0.
struct SyntheticFieldSpec {
  std::vector<std::complex<double>> reflection;  // R0 per bin
  std::vector<std::complex<double>> wavenumber;  // k per bin
  std::vector<std::complex<double>> amplitude;   // A per bin
  double x1 = 0.0;                               // probe 1, farther from the reference surface
  double x2 = 0.0;                               // probe 2
};

struct SyntheticField {
  std::vector<std::complex<double>> p1;
  std::vector<std::complex<double>> p2;
};

inline SyntheticField synthetic_two_point_field(const SyntheticFieldSpec& spec) {
  const std::size_t n = spec.reflection.size();
  if (spec.wavenumber.size() != n || spec.amplitude.size() != n)
    throw DomainError("synthetic field spec arrays must have equal length");
  const std::complex<double> j(0.0, 1.0);
  SyntheticField out;
  out.p1.resize(n);
  out.p2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = spec.wavenumber[i];
    const auto r = spec.reflection[i];
    out.p1[i] = spec.amplitude[i] * (std::exp(j * k * spec.x1) + r * std::exp(-j * k * spec.x1));
    out.p2[i] = spec.amplitude[i] * (std::exp(j * k * spec.x2) + r * std::exp(-j * k * spec.x2));
  }
  return out;
}

}  // namespace impedukt::oracles
