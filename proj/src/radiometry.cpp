#include "hyperlens/radiometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hyperlens/error.hpp"

namespace hyperlens::radiometry {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::NonPositiveInput,
                std::string(name) + " must be positive and finite, got " + std::to_string(v));
  }
}

}  // namespace

void SensorSpec::validate() const {
  require_positive(area, "area");
  require_positive(irradiance, "irradiance");
  require_positive(exposure, "exposure");
  require_positive(wavelength, "wavelength");
  require_positive(sat_irradiation, "sat_irradiation");
  require_positive(min_irradiation, "min_irradiation");
}

double photon_count(const SensorSpec& s) {
  s.validate();
  const double photon_energy =
      PhysicalConstants::planck * PhysicalConstants::speed_of_light / s.wavelength;
  return s.area * s.irradiance * s.exposure / photon_energy;
}

DynamicRange dynamic_range(double sat_irradiation, double min_irradiation) {
  require_positive(sat_irradiation, "sat_irradiation");
  require_positive(min_irradiation, "min_irradiation");
  const double ratio = sat_irradiation / min_irradiation;
  return {ratio, 20.0 * std::log10(ratio)};
}

DynamicRange dynamic_range(const SensorSpec& s) {
  return dynamic_range(s.sat_irradiation, s.min_irradiation);
}

double area_ratio(double a1, double a2) {
  require_positive(a1, "a1");
  require_positive(a2, "a2");
  return a2 / a1;
}

double circular_area(double diameter) {
  require_positive(diameter, "diameter");
  const double r = 0.5 * diameter;
  return std::numbers::pi * r * r;
}

double fovea_cone_estimate(double density, double fovea_diameter) {
  require_positive(density, "density");
  return density * circular_area(fovea_diameter);
}

}  // namespace hyperlens::radiometry
