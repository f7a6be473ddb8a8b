#pragma once

// Least-squares estimation of OPO threshold, total detection efficiency and
// (optionally) rms phase noise from squeezing / anti-squeezing measurements
// taken at several pump powers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/optimize.hpp"
#include "sqz/quadrature.hpp"

namespace sqz {

struct MeasurementRecord {
  double pump_power = 0.0;         // W
  double squeezing_db = 0.0;       // <= 0
  double anti_squeezing_db = 0.0;  // >= 0
  double frequency = 5e3;          // Hz
};

struct FitOptions {
  bool fit_phase_noise = false;
  /// Drop the anti-squeezing observations from the objective.
  bool use_anti_squeezing = true;
  /// OPO half linewidth used to evaluate kappa at each record's frequency.
  double opo_hwhm = 25e6;
  /// Records with f / opo_hwhm above this are rejected; audio-band data
  /// cannot constrain the OPO linewidth.
  double max_kappa = 0.01;
};

struct FitResult {
  double threshold_power = 0.0;  // W
  double efficiency = 0.0;
  double rms_phase_noise = 0.0;  // rad
  /// Euclidean norm of the dB residual vector.
  double residual_norm = 0.0;
  /// Finite-difference covariance over (threshold_power, efficiency[, rms_phase_noise]).
  Eigen::MatrixXd covariance;
  std::size_t evaluations = 0;
};

/// Model parameters in natural units.
struct OpoModel {
  double threshold_power = 0.061;
  double efficiency = 1.0;
  double rms_phase_noise = 0.0;
};

/// Predicted (squeezing, anti-squeezing) dB for one measurement setting.
inline VariancePairDb predict(const OpoModel& m, const MeasurementRecord& rec, double opo_hwhm = 25e6) {
  OpoParams opo;
  opo.pump_power = rec.pump_power;
  opo.threshold_power = m.threshold_power;
  opo.hwhm = opo_hwhm;
  return to_db(rotate_phase_noise(opo_variances(opo, m.efficiency, rec.frequency),
                                  PhaseNoise{m.rms_phase_noise}));
}

inline void validate(std::span<const MeasurementRecord> records, const FitOptions& opt = {}) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string at = "records[" + std::to_string(i) + "].";
    if (!(r.pump_power > 0.0) || !std::isfinite(r.pump_power))
      throw ValidationError(at + "pump_power", "must be > 0");
    if (!(r.squeezing_db <= 0.0)) throw ValidationError(at + "squeezing_db", "must be <= 0");
    if (!(r.anti_squeezing_db >= 0.0) || !std::isfinite(r.anti_squeezing_db))
      throw ValidationError(at + "anti_squeezing_db", "must be >= 0");
    if (!std::isfinite(r.squeezing_db)) throw ValidationError(at + "squeezing_db", "must be finite");
    if (!(r.frequency >= 0.0)) throw ValidationError(at + "frequency", "must be >= 0");
    if (r.frequency / opt.opo_hwhm > opt.max_kappa)
      throw ValidationError(at + "frequency",
                            "too close to the OPO linewidth (kappa > " + std::to_string(opt.max_kappa) + ")");
  }
  if (records.size() < 3)
    throw FitError(FitError::Kind::insufficient_data,
                   "fit needs at least 3 records, got " + std::to_string(records.size()));
  std::set<double> powers;
  for (const auto& r : records) powers.insert(r.pump_power);
  if (powers.size() < 2)
    throw FitError(FitError::Kind::degenerate, "all records share one pump power; threshold is unidentifiable");
}

namespace detail {

inline double max_pump(std::span<const MeasurementRecord> records) {
  double p = 0.0;
  for (const auto& r : records) p = std::max(p, r.pump_power);
  return p;
}

/// dB residuals (model - data); squeezing rows first, then anti-squeezing.
/// Returns a vector of +inf when the model is outside its domain.
inline Eigen::VectorXd residuals(const OpoModel& m, std::span<const MeasurementRecord> records,
                                 const FitOptions& opt) {
  const auto n = static_cast<Eigen::Index>(records.size());
  Eigen::VectorXd r(opt.use_anti_squeezing ? 2 * n : n);
  try {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& rec = records[static_cast<std::size_t>(i)];
      const auto p = predict(m, rec, opt.opo_hwhm);
      r[i] = p.squeezing_db - rec.squeezing_db;
      if (opt.use_anti_squeezing) r[n + i] = p.anti_squeezing_db - rec.anti_squeezing_db;
    }
  } catch (const DomainError&) {
    r.setConstant(std::numeric_limits<double>::infinity());
  }
  return r;
}

inline double sum_of_squares(const OpoModel& m, std::span<const MeasurementRecord> records,
                             const FitOptions& opt) {
  const double v = residuals(m, records, opt).squaredNorm();
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

// Unconstrained search coordinates:
//   threshold = max_pump (1 + e^u), efficiency = sin^2 v, phase = theta_max sin^2 w.
inline constexpr double phase_ceiling = 0.999 * std::numbers::pi / 4;

struct Mapping {
  double max_pump;
  bool with_phase;

  OpoModel model(const Eigen::VectorXd& z) const {
    OpoModel m;
    m.threshold_power = max_pump * (1.0 + std::exp(z[0]));
    m.efficiency = std::sin(z[1]) * std::sin(z[1]);
    m.rms_phase_noise = with_phase ? phase_ceiling * std::sin(z[2]) * std::sin(z[2]) : 0.0;
    return m;
  }

  Eigen::VectorXd coords(const OpoModel& m) const {
    Eigen::VectorXd z(with_phase ? 3 : 2);
    z[0] = std::log(m.threshold_power / max_pump - 1.0);
    z[1] = std::asin(std::sqrt(std::clamp(m.efficiency, 0.0, 1.0)));
    if (with_phase) z[2] = std::asin(std::sqrt(std::clamp(m.rms_phase_noise / phase_ceiling, 0.0, 1.0)));
    return z;
  }
};

/// s^2 (J^T J)^+ with J the central-difference Jacobian of the dB residuals in
/// natural parameters and s^2 = SSR / max(1, m - n). Steps are kept inside the
/// admissible domain by falling back to one-sided differences at the edges.
inline Eigen::MatrixXd covariance(const OpoModel& m, std::span<const MeasurementRecord> records,
                                  const FitOptions& opt, std::size_t n_params) {
  const Eigen::VectorXd r0 = residuals(m, records, opt);
  Eigen::MatrixXd jac(r0.size(), static_cast<Eigen::Index>(n_params));
  const double pmax = max_pump(records);
  for (std::size_t j = 0; j < n_params; ++j) {
    auto get = [&](OpoModel& x) -> double& {
      return j == 0 ? x.threshold_power : j == 1 ? x.efficiency : x.rms_phase_noise;
    };
    OpoModel base = m;
    const double v = get(base);
    const double h = 1e-6 * std::max(std::abs(v), j == 0 ? pmax : 1.0);
    const double lo_limit = j == 0 ? pmax : 0.0;
    const double hi_limit = j == 0 ? std::numeric_limits<double>::infinity() : j == 1 ? 1.0 : phase_ceiling;
    const double lo = std::max(v - h, lo_limit + (j == 0 ? h : 0.0));
    const double hi = std::min(v + h, hi_limit);
    OpoModel a = m, b = m;
    get(a) = lo;
    get(b) = hi;
    jac.col(static_cast<Eigen::Index>(j)) =
        (residuals(b, records, opt) - residuals(a, records, opt)) / (hi - lo);
  }
  const auto dof = std::max<Eigen::Index>(1, r0.size() - static_cast<Eigen::Index>(n_params));
  const double s2 = r0.squaredNorm() / static_cast<double>(dof);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  return 0.5 * (cov + cov.transpose());
}

inline FitResult make_result(const OpoModel& m, std::span<const MeasurementRecord> records,
                             const FitOptions& opt, std::size_t n_params, std::size_t evaluations) {
  FitResult out;
  out.threshold_power = m.threshold_power;
  out.efficiency = m.efficiency;
  out.rms_phase_noise = m.rms_phase_noise;
  out.residual_norm = residuals(m, records, opt).norm();
  out.covariance = covariance(m, records, opt, n_params);
  out.evaluations = evaluations;
  return out;
}

/// Lower residual wins; within 1e-12 the lower threshold wins.
inline bool better(double value_a, double threshold_a, double value_b, double threshold_b) {
  if (std::abs(value_a - value_b) <= 1e-12) return threshold_a < threshold_b;
  return value_a < value_b;
}

}  // namespace detail

/// Least-squares fit in dB of the OPO model to `records`. Deterministic:
/// a fixed coarse grid seeds several Nelder-Mead descents, each polished by
/// Levenberg-Marquardt; the lowest residual wins.
inline FitResult fit_opo(std::span<const MeasurementRecord> records, const FitOptions& opt = {}) {
  validate(records, opt);
  const detail::Mapping map{detail::max_pump(records), opt.fit_phase_noise};
  auto objective = [&](const Eigen::VectorXd& z) {
    return detail::sum_of_squares(map.model(z), records, opt);
  };
  auto residuals = [&](const Eigen::VectorXd& z) { return detail::residuals(map.model(z), records, opt); };

  struct Seed {
    Eigen::VectorXd z;
    double value;
  };
  std::vector<Seed> seeds;
  std::size_t evaluations = 0;
  const double ratios[] = {1.02, 1.1, 1.3, 1.7, 2.5, 4.0, 8.0};
  const double etas[] = {0.3, 0.5, 0.7, 0.85, 0.95, 0.99};
  const double phases[] = {0.0, 0.03, 0.1};
  for (double ratio : ratios)
    for (double eta : etas)
      for (double phase : phases) {
        if (!opt.fit_phase_noise && phase != 0.0) continue;
        const auto z = map.coords({map.max_pump * ratio, eta, phase});
        seeds.push_back({z, objective(z)});
        ++evaluations;
      }
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.value < b.value; });
  seeds.resize(std::min<std::size_t>(seeds.size(), 4));

  OpoModel best_model;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& seed : seeds) {
    auto nm = optimize::nelder_mead(objective, seed.z, {.initial_step = 0.2});
    auto lm = optimize::levenberg_marquardt(residuals, nm.x);
    evaluations += nm.evaluations + lm.evaluations;
    const auto& pick = lm.value <= nm.value ? lm : nm;
    const OpoModel m = map.model(pick.x);
    if (!std::isfinite(pick.value)) continue;
    if (!std::isfinite(best_value) ||
        detail::better(pick.value, m.threshold_power, best_value, best_model.threshold_power)) {
      best_value = pick.value;
      best_model = m;
    }
  }

  if (!std::isfinite(best_value) || !(best_model.threshold_power > map.max_pump))
    throw FitError(FitError::Kind::non_convergence,
                   "fit did not converge: best sum of squares " + std::to_string(best_value) + " after " +
                       std::to_string(evaluations) + " model evaluations");
  return detail::make_result(best_model, records, opt, opt.fit_phase_noise ? 3 : 2, evaluations);
}

/// Exhaustive minimum over an explicit (threshold, efficiency) grid with no
/// phase noise. Grid points with threshold <= max pump power are skipped.
inline FitResult brute_force_fit(std::span<const MeasurementRecord> records,
                                 std::span<const double> threshold_grid,
                                 std::span<const double> efficiency_grid, const FitOptions& opt = {}) {
  if (threshold_grid.empty() || efficiency_grid.empty())
    throw DomainError("brute-force fit needs non-empty threshold and efficiency grids");
  validate(records, opt);
  FitOptions o = opt;
  o.fit_phase_noise = false;

  OpoModel best;
  double best_value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  for (double pth : threshold_grid)
    for (double eta : efficiency_grid) {
      if (!(eta >= 0.0 && eta <= 1.0)) continue;
      const OpoModel m{pth, eta, 0.0};
      const double v = detail::sum_of_squares(m, records, o);
      ++evaluations;
      if (!std::isfinite(v)) continue;
      if (!std::isfinite(best_value) || detail::better(v, pth, best_value, best.threshold_power)) {
        best_value = v;
        best = m;
      }
    }
  if (!std::isfinite(best_value))
    throw FitError(FitError::Kind::degenerate, "no admissible grid point (all thresholds <= max pump power)");
  return detail::make_result(best, records, o, 2, evaluations);
}

/// Noiseless records generated by the forward model.
inline std::vector<MeasurementRecord> synthesize(const OpoModel& m, std::span<const double> pump_powers,
                                                 double frequency = 5e3, double opo_hwhm = 25e6) {
  std::vector<MeasurementRecord> out;
  out.reserve(pump_powers.size());
  for (double p : pump_powers) {
    MeasurementRecord r{p, 0.0, 0.0, frequency};
    const auto db = predict(m, r, opo_hwhm);
    r.squeezing_db = db.squeezing_db;
    r.anti_squeezing_db = db.anti_squeezing_db;
    out.push_back(r);
  }
  return out;
}

}  // namespace sqz
