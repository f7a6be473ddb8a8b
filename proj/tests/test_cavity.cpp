#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sqz/cavity.hpp"

namespace {

using namespace sqz;

// round-trip loss calibrated so the full GEO chain loses 50 % near DC with the
// old mirror; see configs/geo600_old_msr.cfg
constexpr double calibrated_loss = 0.001487;

CavityParams old_msr() { return {0.019, 1.0, calibrated_loss, 2400.0}; }
CavityParams new_msr() { return {0.10, 1.0, calibrated_loss, 2400.0}; }

TEST(Cavity, LosslessIsUnitary) {
  const CavityParams c{0.019, 1.0, 0.0, 2400.0};
  for (double f = 1.0; f <= 1e4; f *= 1.1) EXPECT_NEAR(power_reflectivity(c, f), 1.0, 1e-12);
  EXPECT_NEAR(power_reflectivity(c, 0.0), 1.0, 1e-12);
}

TEST(Cavity, ImpedanceMatchedNulls) {
  const double loss = 0.01;
  const CavityParams c{loss, 1.0, loss, 100.0};  // r1 == r2'
  EXPECT_NEAR(std::abs(amplitude_reflectivity(c, 0.0)), 0.0, 1e-12);
}

TEST(Cavity, MatchesMultipleBounceSeries) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(0.005, 0.3), l(0.0, 0.05), f(0.0, 2e5);
  for (int i = 0; i < 200; ++i) {
    const CavityParams c{t(rng), 1.0, l(rng), 2400.0};
    const double freq = f(rng);
    const double phi = 2.0 * std::numbers::pi * freq * c.round_trip_length / speed_of_light;
    const auto expected = oracle::cavity_series(c.input_transmission, std::sqrt(1.0 - c.round_trip_loss), phi);
    const auto got = amplitude_reflectivity(c, freq);
    EXPECT_NEAR(got.real(), expected.real(), 1e-9);
    EXPECT_NEAR(got.imag(), expected.imag(), 1e-9);
  }
}

TEST(Cavity, Invariants) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> t(0.0, 0.99), r(0.0, 1.0), l(0.0, 0.99), f(0.0, 1e6), len(1.0, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const CavityParams c{t(rng), r(rng), l(rng), len(rng)};
    const double freq = f(rng);
    const double p = power_reflectivity(c, freq);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0 + 1e-12);
    const double fsr = free_spectral_range(c);
    EXPECT_NEAR(std::abs(amplitude_reflectivity(c, freq + fsr) - amplitude_reflectivity(c, freq)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(amplitude_reflectivity(c, -freq)), std::abs(amplitude_reflectivity(c, freq)), 1e-12);
  }
}

TEST(Cavity, DipIsMonotoneOnHalfFsr) {
  for (const auto& c : {old_msr(), new_msr()}) {
    const double fsr = free_spectral_range(c);
    double prev = 1.0 - power_reflectivity(c, 0.0);
    for (int k = 1; k <= 2000; ++k) {
      const double dip = 1.0 - power_reflectivity(c, 0.5 * fsr * k / 2000.0);
      EXPECT_LE(dip, prev + 1e-15);
      prev = dip;
    }
    // off resonance the cavity behaves like a mirror
    EXPECT_GT(power_reflectivity(c, 0.5 * fsr), 0.999);
  }
}

TEST(Cavity, HwhmMatchesScan) {
  for (const auto& c : {old_msr(), new_msr(), CavityParams{0.05, 0.99, 0.01, 600.0}}) {
    auto dip = [&](double f) { return 1.0 - power_reflectivity(c, f); };
    const double scan = oracle::scan_half_width(dip, 0.01, free_spectral_range(c) / 2);
    EXPECT_NEAR(hwhm(c), scan, 0.01);
  }
}

TEST(Cavity, GeoBandwidths) {
  const double old_bw = hwhm(old_msr());
  const double new_bw = hwhm(new_msr());
  EXPECT_NEAR(old_bw, 220.0, 0.15 * 220.0);
  EXPECT_NEAR(new_bw, 1100.0, 0.15 * 1100.0);
  EXPECT_GT(new_bw / old_bw, 4.5);
  EXPECT_LT(new_bw / old_bw, 5.8);
}

TEST(Cavity, HwhmScalesInverselyWithLength) {
  auto c = old_msr();
  const double base = hwhm(c);
  c.round_trip_length *= 2.0;
  EXPECT_NEAR(hwhm(c), base / 2.0, 1e-6 * base);
}

TEST(Cavity, CalibratedLossReproducesHalfChainLoss) {
  // solve 1 - |r(0)|^2 = 1 - 0.50 / (static product) by bisection on L
  const double static_product = 0.93 * 0.95 * 0.97 * 0.97 * 0.99 * 0.99 * 0.94 * 0.90 * 0.99;
  const double target = 0.50 / static_product;
  double lo = 0.0, hi = 0.01;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (power_reflectivity({0.019, 1.0, mid, 2400.0}, 0.0) > target ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, calibrated_loss, 5e-7);
  EXPECT_NEAR(1.0 - power_reflectivity(old_msr(), 0.0), 0.267, 1e-3);
}

TEST(Cavity, Errors) {
  EXPECT_THROW(power_reflectivity({1.0, 1.0, 0.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(power_reflectivity({0.1, 1.1, 0.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(power_reflectivity({0.1, 1.0, 1.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(power_reflectivity({0.1, 1.0, 0.0, 0.0}, 0.0), DomainError);
  EXPECT_THROW(hwhm({0.019, 1.0, 0.0, 2400.0}), DomainError);  // no dip
}

}  // namespace
