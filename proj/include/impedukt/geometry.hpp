#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "impedukt/errors.hpp"

namespace impedukt {

/// Elliptical duct cross-section. Circles are the b == a special case.
struct EllipseSection {
  double a_major = 0.0;  // major semi-axis [m]
  double b_minor = 0.0;  // minor semi-axis [m]

  double eccentricity() const {
    const double r = b_minor / a_major;
    return std::sqrt(std::max(0.0, 1.0 - r * r));
  }
  double area() const { return std::numbers::pi * a_major * b_minor; }
  double focal_distance() const { return a_major * eccentricity(); }
  bool circular() const { return b_minor == a_major; }
};

/// Builds the section of given area reshaped to the given eccentricity;
/// area is preserved exactly (a*b = area/pi).
inline EllipseSection make_elliptical_section(double area, double eccentricity) {
  if (!(area > 0.0)) throw DomainError("section area must be positive");
  if (!(eccentricity >= 0.0 && eccentricity < 1.0))
    throw DomainError("eccentricity must lie in [0, 1)");
  const double ratio = std::sqrt(1.0 - eccentricity * eccentricity);  // b/a
  EllipseSection s;
  s.a_major = std::sqrt(area / (std::numbers::pi * ratio));
  s.b_minor = eccentricity == 0.0 ? s.a_major : area / (std::numbers::pi * s.a_major);
  return s;
}

inline EllipseSection circular_section(double radius) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  return EllipseSection{radius, radius};
}

enum class Termination { ClosedRigid, OpenFlanged, Coupled };

/// Uniform impedance-duct specification.
struct DuctSpec {
  EllipseSection section;
  double length = 0.0;       // [m]
  double mesh_size = 0.0;    // target element size h [m]
  Termination termination = Termination::ClosedRigid;

  /// True when the duct is shorter than the 3x-semi-axis guideline.
  bool shorter_than_recommended() const { return length < 3.0 * section.a_major; }
};

/// Piecewise area function: stations of (z, area, eccentricity), z strictly increasing.
struct AreaFunction {
  struct Station {
    double z = 0.0;     // [m]
    double area = 0.0;  // [m^2]
    double ecc = 0.0;
  };
  std::vector<Station> stations;

  void validate() const {
    if (stations.size() < 2) throw DomainError("area function needs at least 2 stations");
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (!(stations[i].area > 0.0)) throw DomainError("area function areas must be positive");
      if (!(stations[i].ecc >= 0.0 && stations[i].ecc < 1.0))
        throw DomainError("area function eccentricity must lie in [0, 1)");
      if (i > 0 && !(stations[i].z > stations[i - 1].z))
        throw ParseError("area function stations must have strictly increasing z");
    }
  }

  double total_length() const { return stations.back().z - stations.front().z; }

  /// Linear interpolation of (area, ecc) at z; z clamped to the table range.
  Station at(double z) const {
    if (z <= stations.front().z) return stations.front();
    if (z >= stations.back().z) return stations.back();
    for (std::size_t i = 1; i < stations.size(); ++i) {
      if (z <= stations[i].z) {
        const Station& lo = stations[i - 1];
        const Station& hi = stations[i];
        const double t = (z - lo.z) / (hi.z - lo.z);
        return Station{z, lo.area + t * (hi.area - lo.area), lo.ecc + t * (hi.ecc - lo.ecc)};
      }
    }
    return stations.back();
  }
};

}  // namespace impedukt
