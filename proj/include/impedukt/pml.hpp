#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "impedukt/errors.hpp"

namespace impedukt {

/// Damping strength so a layer of thickness L reflects a fraction r_inf:
/// xi_hat = (c0/L) * ln(1/r_inf). Natural logarithm.
inline double xi_hat(double c0, double layer_thickness, double r_inf) {
  if (!(layer_thickness > 0.0)) throw DomainError("PML layer thickness must be positive");
  if (!(r_inf > 0.0 && r_inf <= 1.0)) throw DomainError("relative reflection must lie in (0, 1]");
  return c0 / layer_thickness * std::log(1.0 / r_inf);
}

/// Polynomial-plus-sine ramp: 0 at |x| = l, xi_hat at |x| = l + L, C^1 at both ends.
inline double damping_profile(double xi_hat_value, double x, double interior_half_extent,
                              double layer_thickness) {
  const double depth = std::abs(x) - interior_half_extent;
  if (depth < 0.0) return 0.0;
  if (depth > layer_thickness * (1.0 + 1e-12))
    throw DomainError("point lies beyond the PML outer face");
  const double t = std::min(depth / layer_thickness, 1.0);
  return xi_hat_value * (t - std::sin(2.0 * std::numbers::pi * t) / (2.0 * std::numbers::pi));
}

/// Coefficient fields of the PML-modified wave equation, as elementary
/// symmetric combinations of the per-direction damping profiles.
struct PmlCoefficients {
  double alpha = 0.0;            // xi1 + xi2 + xi3
  double beta = 0.0;             // xi1*xi2 + xi2*xi3 + xi3*xi1
  double gamma = 0.0;            // xi1*xi2*xi3
  std::array<double, 3> a{};     // a_i = xi_j + xi_k - xi_i (cyclic)
  std::array<double, 3> b{};     // b_i = xi_j * xi_k (cyclic)
};

inline PmlCoefficients pml_coefficients(double xi1, double xi2, double xi3) {
  PmlCoefficients c;
  c.alpha = xi1 + xi2 + xi3;
  c.beta = xi1 * xi2 + xi2 * xi3 + xi3 * xi1;
  c.gamma = xi1 * xi2 * xi3;
  c.a = {xi2 + xi3 - xi1, xi3 + xi1 - xi2, xi1 + xi2 - xi3};
  c.b = {xi2 * xi3, xi3 * xi1, xi1 * xi2};
  return c;
}

/// One absorbing slab: ramps from zero at `start` over `thickness` meters,
/// on the positive side if sign = +1, negative side if sign = -1.
struct PmlSlab {
  int axis = 0;          // 0,1,2 -> x,y,z
  int sign = +1;
  double start = 0.0;    // coordinate of the inner face
  double thickness = 0.0;
};

/// Box PML description: any number of one-sided slabs plus the design reflection.
/// The paper's centered layout is the special case of symmetric slab pairs.
struct PmlSpec {
  std::vector<PmlSlab> slabs;
  double r_inf = 1e-4;

  bool active() const { return !slabs.empty() && r_inf < 1.0; }

  /// Damping profile vector (xi_x, xi_y, xi_z) at a point.
  std::array<double, 3> xi_at(double c0, const std::array<double, 3>& p) const {
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    if (!active()) return xi;
    for (const PmlSlab& s : slabs) {
      const double depth = s.sign > 0 ? p[s.axis] - s.start : s.start - p[s.axis];
      if (depth <= 0.0) continue;
      const double t = std::min(depth / s.thickness, 1.0);
      const double ramp = t - std::sin(2.0 * std::numbers::pi * t) / (2.0 * std::numbers::pi);
      xi[s.axis] += xi_hat(c0, s.thickness, r_inf) * ramp;
    }
    return xi;
  }
};

}  // namespace impedukt
