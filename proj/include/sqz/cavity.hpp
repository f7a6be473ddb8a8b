#pragma once

// Two-mirror lossy Fabry-Perot cavity probed in reflection through its input
// mirror. Stands in for the signal-recycling cavity seen by the squeezed field.

#include <cmath>
#include <complex>
#include <numbers>

#include "sqz/errors.hpp"

namespace sqz {

inline constexpr double speed_of_light = 299'792'458.0;  // m/s

struct CavityParams {
  double input_transmission = 0.019;  // T1, power
  double end_reflectivity = 1.0;      // R2, power
  double round_trip_loss = 0.0;       // L_rt, power
  double round_trip_length = 2400.0;  // m
  double detuning_phase = 0.0;        // rad, 0 == carrier resonant

  friend bool operator==(const CavityParams&, const CavityParams&) = default;
};

inline void validate(const CavityParams& c) {
  if (!(c.input_transmission >= 0.0 && c.input_transmission < 1.0))
    throw DomainError("cavity input_transmission must lie in [0,1)");
  if (!(c.end_reflectivity >= 0.0 && c.end_reflectivity <= 1.0))
    throw DomainError("cavity end_reflectivity must lie in [0,1]");
  if (!(c.round_trip_loss >= 0.0 && c.round_trip_loss < 1.0))
    throw DomainError("cavity round_trip_loss must lie in [0,1)");
  if (!(c.round_trip_length > 0.0) || !std::isfinite(c.round_trip_length))
    throw DomainError("cavity round_trip_length must be > 0");
  if (!std::isfinite(c.detuning_phase)) throw DomainError("cavity detuning_phase must be finite");
}

inline double free_spectral_range(const CavityParams& c) {
  return speed_of_light / c.round_trip_length;
}

/// r(f) = (-r1 + r2' e^{i phi}) / (1 - r1 r2' e^{i phi}), phi = 2 pi f / FSR,
/// with r1 = sqrt(1 - T1) and r2' = sqrt(R2 (1 - L_rt)). Negative f is the
/// lower sideband.
inline std::complex<double> amplitude_reflectivity(const CavityParams& c, double frequency) {
  validate(c);
  if (!std::isfinite(frequency)) throw DomainError("frequency must be finite");
  const double r1 = std::sqrt(1.0 - c.input_transmission);
  const double r2 = std::sqrt(c.end_reflectivity * (1.0 - c.round_trip_loss));
  const double phi = 2.0 * std::numbers::pi * frequency / free_spectral_range(c) + c.detuning_phase;
  const std::complex<double> round_trip = r2 * std::polar(1.0, phi);
  return (-r1 + round_trip) / (1.0 - r1 * round_trip);
}

inline double power_reflectivity(const CavityParams& c, double frequency) {
  return std::norm(amplitude_reflectivity(c, frequency));
}

/// Half width of the reflection-loss dip: the frequency where 1 - |r(f)|^2
/// drops to half its on-resonance value.
inline double hwhm(const CavityParams& c) {
  validate(c);
  if (c.detuning_phase != 0.0) throw DomainError("hwhm is defined for a tuned cavity only");
  auto dip = [&](double f) { return 1.0 - power_reflectivity(c, f); };
  const double fsr = free_spectral_range(c);
  const double half = 0.5 * dip(0.0);
  if (!(half > 1e-15)) throw DomainError("cavity has no reflection-loss dip (lossless)");
  double lo = 0.0;
  double hi = 0.5 * fsr;
  if (!(dip(hi) < half)) throw DomainError("cavity dip does not fall to half depth within FSR/2");
  // dip is monotone decreasing on [0, FSR/2]
  for (int i = 0; i < 200 && hi - lo > 1e-12 * fsr; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dip(mid) > half ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sqz
