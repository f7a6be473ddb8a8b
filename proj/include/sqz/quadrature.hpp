#pragma once

// Quadrature variances of a sub-threshold degenerate OPO, beam-splitter loss
// and quadrature-angle jitter. All variances are linear and normalized to the
// vacuum level (vacuum == 1).

#include <cmath>
#include <numbers>
#include <string>

#include "sqz/errors.hpp"

namespace sqz {

struct OpoParams {
  double pump_power = 0.035;        // W
  double threshold_power = 0.061;   // W
  double output_transmission = 0.08;
  double round_trip_loss = 0.004;
  double hwhm = 25e6;               // Hz, OPO cavity half linewidth
};

struct VariancePair {
  double squeezed = 1.0;
  double anti_squeezed = 1.0;

  friend bool operator==(const VariancePair&, const VariancePair&) = default;
};

struct PhaseNoise {
  double rms_angle = 0.0;  // rad
};

namespace detail {

inline void require_efficiency(double eta, const char* what) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(eta));
}

}  // namespace detail

/// Throws DomainError unless the static invariants of `opo` hold. Does not
/// check pump_power < threshold_power; that is enforced on evaluation.
inline void validate(const OpoParams& opo) {
  if (!(opo.pump_power >= 0.0)) throw DomainError("pump_power must be >= 0");
  if (!(opo.threshold_power > 0.0)) throw DomainError("threshold_power must be > 0");
  if (!(opo.output_transmission > 0.0 && opo.output_transmission <= 1.0))
    throw DomainError("output_transmission must lie in (0,1]");
  if (!(opo.round_trip_loss >= 0.0 && opo.round_trip_loss < 1.0))
    throw DomainError("round_trip_loss must lie in [0,1)");
  if (!(opo.hwhm > 0.0)) throw DomainError("hwhm must be > 0");
}

inline void validate(const PhaseNoise& pn) {
  if (!(pn.rms_angle >= 0.0 && pn.rms_angle < std::numbers::pi / 4))
    throw DomainError("phase noise rms_angle must lie in [0, pi/4)");
}

/// Fraction of the intra-cavity field leaving through the output coupler,
/// T / (T + L).
inline double escape_efficiency(double transmission, double loss) {
  if (!(transmission > 0.0 && transmission <= 1.0))
    throw DomainError("output transmission must lie in (0,1]");
  if (!(loss >= 0.0 && loss < 1.0)) throw DomainError("intra-cavity loss must lie in [0,1)");
  return transmission / (transmission + loss);
}

inline double escape_efficiency(const OpoParams& opo) {
  return escape_efficiency(opo.output_transmission, opo.round_trip_loss);
}

/// Squeezed and anti-squeezed variances of the OPO output seen through a total
/// detection efficiency, at sideband `frequency` (normalized by opo.hwhm).
///
///   R_s/a = 1 -/+ eta * 4 sqrt(P/P_th) / ((1 +/- sqrt(P/P_th))^2 + 4 kappa^2)
inline VariancePair opo_variances(const OpoParams& opo, double detection_efficiency,
                                  double frequency) {
  validate(opo);
  detail::require_efficiency(detection_efficiency, "detection efficiency");
  if (!(frequency >= 0.0)) throw DomainError("frequency must be >= 0");
  if (!(opo.pump_power < opo.threshold_power))
    throw DomainError("pump power " + std::to_string(opo.pump_power) +
                      " W is at or above the OPO threshold " +
                      std::to_string(opo.threshold_power) + " W");

  const double x = std::sqrt(opo.pump_power / opo.threshold_power);
  const double kappa = frequency / opo.hwhm;
  const double k2 = 4.0 * kappa * kappa;
  const double gain = 4.0 * x;
  return {1.0 - detection_efficiency * gain / ((1.0 + x) * (1.0 + x) + k2),
          1.0 + detection_efficiency * gain / ((1.0 - x) * (1.0 - x) + k2)};
}

/// Beam-splitter loss: each variance R becomes eta R + (1 - eta).
inline VariancePair apply_loss(const VariancePair& v, double eta) {
  detail::require_efficiency(eta, "loss efficiency");
  return {eta * v.squeezed + (1.0 - eta), eta * v.anti_squeezed + (1.0 - eta)};
}

/// Mixes the two quadratures at a fixed angle equal to the rms jitter.
inline VariancePair rotate_phase_noise(const VariancePair& v, const PhaseNoise& pn) {
  validate(pn);
  const double c2 = std::cos(pn.rms_angle) * std::cos(pn.rms_angle);
  const double s2 = 1.0 - c2;
  return {v.squeezed * c2 + v.anti_squeezed * s2, v.anti_squeezed * c2 + v.squeezed * s2};
}

/// Power decibels, 10 log10(R). Squeezing comes out negative.
inline double to_db(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw DomainError("variance must be positive and finite to convert to dB");
  return 10.0 * std::log10(variance);
}

inline double from_db(double decibels) { return std::pow(10.0, decibels / 10.0); }

struct VariancePairDb {
  double squeezing_db = 0.0;
  double anti_squeezing_db = 0.0;
};

inline VariancePairDb to_db(const VariancePair& v) {
  return {to_db(v.squeezed), to_db(v.anti_squeezed)};
}

}  // namespace sqz
