#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's evaluation paths.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace sqz::oracle {

/// Lossless-detection OPO variances at kappa = 0 via the squeeze factor
/// ((1 -/+ x) / (1 +/- x))^2, then mixed with vacuum at efficiency eta.
inline std::pair<double, double> opo_dc(double pump, double threshold, double eta) {
  const double x = std::sqrt(pump / threshold);
  const double s = std::pow((1.0 - x) / (1.0 + x), 2);
  return {eta * s + (1.0 - eta), eta / s + (1.0 - eta)};
}

/// Rotates the covariance diag(rs, ra) by theta and reads the diagonal.
inline std::pair<double, double> rotate(double rs, double ra, double theta) {
  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const Eigen::Matrix2d cov = rot * Eigen::Vector2d(rs, ra).asDiagonal() * rot.transpose();
  return {cov(0, 0), cov(1, 1)};
}

/// Cavity reflection by explicit summation of the multiple-bounce series:
///   r = -r1 + t1^2 r2 e^{i phi} sum_k (r1 r2 e^{i phi})^k
inline std::complex<double> cavity_series(double t1_power, double r2_amp, double phi, int terms = 200000) {
  const double r1 = std::sqrt(1.0 - t1_power);
  const std::complex<double> rt = r2_amp * std::polar(1.0, phi);
  std::complex<double> sum = 0.0, term = 1.0;
  for (int k = 0; k < terms; ++k) {
    sum += term;
    term *= r1 * rt;
    if (std::abs(term) < 1e-18) break;
  }
  return -r1 + t1_power * rt * sum;
}

/// Half width of a monotone dip found by dense linear scan with step `df`.
template <class Dip>
double scan_half_width(Dip&& dip, double df, double fmax) {
  const double half = 0.5 * dip(0.0);
  for (double f = df; f < fmax; f += df)
    if (dip(f) <= half) return f - 0.5 * df;
  return fmax;
}

}  // namespace sqz::oracle
