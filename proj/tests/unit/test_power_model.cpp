#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <relayq/analysis.hpp>
#include <relayq/power_model.hpp>
#include <relayq/simulator.hpp>

using namespace relayq;

namespace {

SystemParams table_params(double lambda_per_ms, int n) {
  SystemParams p;
  p.arrival_rate = lambda_per_ms * 1e3;
  p.threshold = n;
  return p;
}

// Oracle: 40-digit evaluation of the per-time power expressions on top
// of the high-precision pi0 and waiting-time oracle (mpmath), E_sw = 8 mJ.
struct PowerReference {
  double lambda_per_ms;
  int n;
  double ptot;
};
constexpr PowerReference kPowerReference[] = {
    {0.2, 1, 16.1679415867954},
    {0.2, 5, 13.4893199877648},
    {0.1, 3, 11.0711082648551},
    {0.3, 8, 15.9211125907425},
};

}  // namespace

TEST(PowerModel, SwitchingEnergyPerCycle) {
  PowerParams pw;
  pw.switch_energy_j = 8.0;
  EXPECT_DOUBLE_EQ(switching_energy_per_cycle(pw, 0.5), 48.0);
  EXPECT_DOUBLE_EQ(switching_energy_per_cycle(pw, 1.0), 32.0);
}

TEST(PowerModel, TransmitPowers) {
  const PowerParams pw;
  EXPECT_NEAR(pw.user_transmit_w(), 0.62, 1e-15);
  EXPECT_NEAR(pw.relay_transmit_w(), 10.26, 1e-14);
}

TEST(PowerModel, RelayAndApInvariantInThreshold) {
  const PowerParams pw;
  const AnalysisResult ref = analyze(table_params(0.2, 1), pw);
  const double ra = ref.power.relay_w + ref.power.ap_w;
  for (int n = 2; n <= 10; ++n) {
    const AnalysisResult a = analyze(table_params(0.2, n), pw);
    EXPECT_NEAR(a.power.relay_w + a.power.ap_w, ra, 1e-12 * ra) << "N=" << n;
  }
}

TEST(PowerModel, PerCycleEqualsPerTime) {
  const PowerParams pw;
  for (double lam : {0.1, 0.2, 0.3}) {
    for (int n : {1, 3, 5, 8}) {
      const SystemParams p = table_params(lam, n);
      const AnalysisResult a = analyze(p, pw);
      const CycleEnergy e = cycle_energy(p, pw, a.pi0, a.mean_wq, a.cycle);
      const double per_cycle = e.total_j() / a.cycle.mean_cycle;
      EXPECT_NEAR(per_cycle, a.power.total_w, 1e-9 * a.power.total_w) << lam << " " << n;
      EXPECT_NEAR(e.user_j / a.cycle.mean_cycle, a.power.user_w, 1e-9 * a.power.user_w);
      EXPECT_NEAR((e.relay_j + e.ap_j) / a.cycle.mean_cycle, a.power.relay_w + a.power.ap_w,
                  1e-9 * (a.power.relay_w + a.power.ap_w));
    }
  }
}

TEST(PowerModel, BreakdownSumsToTotal) {
  const AnalysisResult a = analyze(table_params(0.2, 5), PowerParams{});
  const PowerBreakdown& b = a.power;
  EXPECT_DOUBLE_EQ(b.total_w, b.user_w + b.relay_w + b.ap_w + b.switching_w);
  EXPECT_GT(b.total_w, 0.0);
  EXPECT_TRUE(std::isfinite(b.total_w));
}

TEST(PowerModel, SwitchingDecreasingInThreshold) {
  const PowerParams pw;
  double prev = INFINITY;
  for (int n = 1; n <= 15; ++n) {
    const double sw = analyze(table_params(0.2, n), pw).power.switching_w;
    EXPECT_LT(sw, prev) << "N=" << n;
    prev = sw;
  }
}

TEST(PowerModel, LinearInCoefficients) {
  const PowerParams pw;
  PowerParams twice = pw;
  for (double* v : {&twice.user_base_w, &twice.relay_base_w, &twice.relay_listen_w, &twice.ap_base_w,
                    &twice.ap_listen_w, &twice.switch_energy_j})
    *v *= 2.0;
  // P_T = P_0 + slope * p doubles when P_0 and slope double.
  twice.user_slope *= 2.0;
  twice.relay_slope *= 2.0;
  const SystemParams p = table_params(0.2, 5);
  const AnalysisResult a = analyze(p, pw);
  const double t = total_power(p, twice, a.pi0, a.mean_wq, a.cycle);
  EXPECT_NEAR(t, 2.0 * a.power.total_w, 1e-12 * t);
}

TEST(PowerModel, InvalidDelayAndDomain) {
  const SystemParams p = table_params(0.2, 5);
  const AnalysisResult a = analyze(p, PowerParams{});
  EXPECT_THROW(total_power(p, PowerParams{}, a.pi0, 0.5 * a.cycle.mean_T1, a.cycle), InvalidDelay);
  Pi0Solution bad = a.pi0;
  bad.pi0 = 0.0;
  EXPECT_THROW(total_power(p, PowerParams{}, bad, a.mean_wq, a.cycle), DomainError);
}

TEST(PowerModel, ParameterValidation) {
  PowerParams pw;
  EXPECT_NO_THROW(pw.validate());
  pw.relay_listen_w = 12.0;
  EXPECT_THROW(pw.validate(), ConfigError);
  pw = PowerParams{};
  pw.switch_energy_j = -1.0;
  EXPECT_THROW(pw.validate(), ConfigError);
}

TEST(PowerModel, TotalsMatchOracle) {
  for (const auto& r : kPowerReference) {
    const AnalysisResult a = analyze(table_params(r.lambda_per_ms, r.n), PowerParams{});
    EXPECT_NEAR(a.power.total_w, r.ptot, 1e-9 * r.ptot) << r.lambda_per_ms << " " << r.n;
  }
}

TEST(PowerModel, InteriorMinimumOverThreshold) {
  const PowerParams pw;
  std::vector<double> t;
  for (int n = 1; n <= 15; ++n) t.push_back(analyze(table_params(0.2, n), pw).power.total_w);
  const auto it = std::min_element(t.begin(), t.end());
  const auto idx = it - t.begin();
  EXPECT_GT(idx, 0);
  EXPECT_LT(idx, 14);
}

TEST(PowerModel, MatchesSimulatedEnergyAccounting) {
  SimConfig c;
  c.system = table_params(0.2, 5);
  c.replications = 1;
  c.measured_packets = 1'000'000;
  const SimStats s = run_simulation(c);
  const double an = analyze(c.system, c.power).power.total_w;
  EXPECT_LE(std::abs(an - s.mean_power_hat.mean) / s.mean_power_hat.mean, 0.03)
      << "analytic " << an << " simulated " << s.mean_power_hat.mean;
}
