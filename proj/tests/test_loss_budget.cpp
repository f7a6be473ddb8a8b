#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "sqz/loss_budget.hpp"
#include "test_support.hpp"

namespace {

using namespace sqz;

TEST(LossElement, Contributions) {
  EXPECT_DOUBLE_EQ(efficiency({"a", StaticLoss{0.1}}, 0.0), 0.9);
  EXPECT_DOUBLE_EQ(efficiency({"b", DoublePassLoss{0.1}}, 0.0), 0.81);
  EXPECT_DOUBLE_EQ(efficiency({"c", Visibility{0.985}}, 0.0), 0.985 * 0.985);
  const CavityParams cav{0.019, 1.0, 0.001, 2400.0};
  EXPECT_DOUBLE_EQ(efficiency({"d", CavityReflection{cav}}, 123.0), power_reflectivity(cav, 123.0));
  EXPECT_EQ(LossElement({"d", CavityReflection{cav}}).kind(), LossKind::cavity_reflection);
}

TEST(LossElement, Validation) {
  EXPECT_THROW(efficiency({"a", StaticLoss{1.0}}, 0.0), DomainError);
  EXPECT_THROW(efficiency({"a", StaticLoss{-0.1}}, 0.0), DomainError);
  EXPECT_THROW(efficiency({"a", DoublePassLoss{1.0}}, 0.0), DomainError);
  EXPECT_THROW(efficiency({"a", Visibility{0.0}}, 0.0), DomainError);
  EXPECT_THROW(efficiency({"a", Visibility{1.01}}, 0.0), DomainError);
  EXPECT_THROW(efficiency({"a", CavityReflection{{1.0, 1.0, 0.0, 1.0}}}, 0.0), DomainError);
}

TEST(ChainEfficiency, EmptyChainIsIdentity) {
  for (double f : {0.0, 10.0, 1e4, 1e7}) EXPECT_DOUBLE_EQ(chain_efficiency({}, f), 1.0);
  EXPECT_THROW(chain_efficiency({}, -1.0), DomainError);
}

TEST(ChainEfficiency, GeoChain) {
  const double static_product = 0.93 * 0.95 * 0.97 * 0.97 * 0.99 * 0.99 * 0.94 * 0.90 * 0.99;
  EXPECT_NEAR(static_product, 0.682379496696833, 1e-14);
  for (const char* name : {"geo600_old_msr", "geo600_new_msr"}) {
    const auto cfg = test::shipped_config(name);
    EXPECT_NEAR(chain_efficiency(cfg.chain, 5e3), 0.68, 0.01) << name;
  }
  const auto old_cfg = test::shipped_config("geo600_old_msr");
  EXPECT_NEAR(chain_efficiency(old_cfg.chain, 10.0), 0.50, 0.02);
  // product of the shipped elements against an independent multiplication
  const double src = power_reflectivity(std::get<CavityReflection>(old_cfg.chain.elements[4].value).cavity, 10.0);
  EXPECT_NEAR(chain_efficiency(old_cfg.chain, 10.0), static_product * src, 1e-14);
}

TEST(ChainEfficiency, OrderInvariant) {
  auto cfg = test::shipped_config("geo600_new_msr");
  std::mt19937_64 rng(23);
  const double reference = chain_efficiency(cfg.chain, 300.0);
  for (int i = 0; i < 50; ++i) {
    std::shuffle(cfg.chain.elements.begin(), cfg.chain.elements.end(), rng);
    EXPECT_NEAR(chain_efficiency(cfg.chain, 300.0), reference, 1e-12);
  }
}

TEST(ChainEfficiency, AddingLossyElementStrictlyDecreases) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> loss(1e-6, 0.5);
  LossChain chain;
  double prev = chain_efficiency(chain, 100.0);
  for (int i = 0; i < 30; ++i) {
    if (i % 3 == 0) chain.elements.push_back({"s", StaticLoss{loss(rng)}});
    else if (i % 3 == 1) chain.elements.push_back({"d", DoublePassLoss{loss(rng)}});
    else chain.elements.push_back({"v", Visibility{1.0 - loss(rng)}});
    const double now = chain_efficiency(chain, 100.0);
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(ChainEfficiency, DoublePassEqualsTwoStatics) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> loss(0.0, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double l = loss(rng);
    const LossChain one{{{"d", DoublePassLoss{l}}}};
    const LossChain two{{{"a", StaticLoss{l}}, {"b", StaticLoss{l}}}};
    EXPECT_NEAR(chain_efficiency(one, 0.0), chain_efficiency(two, 0.0), 1e-15);
  }
}

TEST(ChainEfficiency, ResonantCavityRecoversAwayFromResonance) {
  const auto cfg = test::shipped_config("geo600_old_msr");
  const double fsr = free_spectral_range(std::get<CavityReflection>(cfg.chain.elements[4].value).cavity);
  const double dc = chain_efficiency(cfg.chain, 0.0);
  for (double f = 1.0; f < fsr / 2; f *= 1.5) EXPECT_GE(chain_efficiency(cfg.chain, f), dc);
}

TEST(DetectedSqueezing, IdentityChainIsPureState) {
  OpoParams opo;
  opo.pump_power = 0.045;
  const auto db = detected_squeezing(opo, {}, {}, 5e3);
  const auto direct = to_db(opo_variances(opo, 1.0, 5e3));
  EXPECT_DOUBLE_EQ(db.squeezing_db, direct.squeezing_db);
  EXPECT_DOUBLE_EQ(db.anti_squeezing_db, direct.anti_squeezing_db);
  EXPECT_NEAR(db.squeezing_db + db.anti_squeezing_db, 0.0, 1e-6);
}

TEST(DetectedSqueezing, HomodyneDiagnostic) {
  const auto cfg = test::shipped_config("homodyne_diagnostic");
  const double eta = chain_efficiency(cfg.chain, 5e3);
  EXPECT_NEAR(eta, 0.895, 0.003);
  const auto db = detected_squeezing(cfg.opo, cfg.chain, cfg.phase_noise, 5e3);
  EXPECT_NEAR(-db.squeezing_db, 9.2, 0.3);
  EXPECT_NEAR(db.anti_squeezing_db, 16.75, 0.3);
}

TEST(DetectedSqueezing, FullGeoChainAtFiveKilohertz) {
  for (const char* name : {"geo600_old_msr", "geo600_new_msr"}) {
    const auto cfg = test::shipped_config(name);
    const auto db = detected_squeezing(cfg.opo, cfg.chain, cfg.phase_noise, 5e3);
    EXPECT_GT(-db.squeezing_db, 4.0);
    EXPECT_LT(-db.squeezing_db, 6.0);
  }
}

TEST(DetectedSqueezing, PhaseNoiseCostsMoreAtHigherPump) {
  // the 45 mW point gains little squeezing over 35 mW but is hurt more by jitter
  LossChain chain{{{"bb", StaticLoss{0.07}}}};
  OpoParams p35, p45;
  p35.pump_power = 0.035;
  p45.pump_power = 0.045;
  const PhaseNoise jitter{0.03};
  const double loss35 = detected_squeezing(p35, chain, jitter, 5e3).squeezing_db -
                        detected_squeezing(p35, chain, {}, 5e3).squeezing_db;
  const double loss45 = detected_squeezing(p45, chain, jitter, 5e3).squeezing_db -
                        detected_squeezing(p45, chain, {}, 5e3).squeezing_db;
  EXPECT_GT(loss45, loss35);
}

TEST(BudgetReport, SingleStatic) {
  const LossChain chain{{{"omc", StaticLoss{0.10}}}};
  const std::vector<double> grid{5e3};
  const auto r = budget_report(chain, grid);
  ASSERT_EQ(r.names.size(), 1u);
  EXPECT_DOUBLE_EQ(r.per_element[0][0], 0.90);
  EXPECT_DOUBLE_EQ(r.total[0], 0.90);
}

TEST(BudgetReport, ConsistentWithChainEfficiency) {
  const auto cfg = test::shipped_config("geo600_old_msr");
  const auto grid = cfg.frequency_grid.samples();
  const auto r = budget_report(cfg.chain, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double product = 1.0;
    for (std::size_t e = 0; e < r.names.size(); ++e) product *= r.per_element[e][i];
    EXPECT_NEAR(product, r.total[i], 1e-12);
    EXPECT_NEAR(r.total[i], chain_efficiency(cfg.chain, grid[i]), 1e-12);
    EXPECT_DOUBLE_EQ(r.cumulative.back()[i], r.total[i]);
  }
  const std::vector<double> five{5e3};
  EXPECT_NEAR(budget_report(cfg.chain, five).total[0], 0.68, 0.01);
}

TEST(BudgetReport, GridErrors) {
  const std::vector<double> empty, descending{10.0, 5.0};
  EXPECT_THROW(budget_report({}, empty), DomainError);
  EXPECT_THROW(budget_report({}, descending), DomainError);
}

}  // namespace
