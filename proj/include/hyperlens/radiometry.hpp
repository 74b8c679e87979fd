#pragma once

// Photon budget and dynamic-range calculators for comparing photoreceptors
// with camera pixels. SI units throughout.

namespace hyperlens::radiometry {

struct PhysicalConstants {
  static constexpr double planck = 6.6260755e-34;       // J s
  static constexpr double speed_of_light = 2.99792458e8;  // m/s
};

struct SensorSpec {
  double area = 1e-12;          // m^2
  double irradiance = 1.0;      // W/m^2
  double exposure = 1e-3;       // s
  double wavelength = 550e-9;   // m
  double sat_irradiation = 1e8;
  double min_irradiation = 1.0;

  /// NonPositiveInput unless every field is strictly positive and finite.
  void validate() const;
};

struct DynamicRange {
  double ratio;
  double db;  // 20*log10(ratio)
};

/// Expected photon count A*E*t*lambda/(h*c).
double photon_count(const SensorSpec& s);

DynamicRange dynamic_range(const SensorSpec& s);
DynamicRange dynamic_range(double sat_irradiation, double min_irradiation);

/// a2 / a1: how many times smaller the first collecting area is.
double area_ratio(double a1, double a2);

/// Area of a circular aperture of the given diameter (same length unit squared).
double circular_area(double diameter);

/// density [count/mm^2] times the area of a disc of fovea_diameter [mm].
double fovea_cone_estimate(double density, double fovea_diameter);

}  // namespace hyperlens::radiometry
