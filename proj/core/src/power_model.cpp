#include "relayq/power_model.hpp"

#include <cmath>

namespace relayq {

namespace {

void check_inputs(const Pi0Solution& pi0, double wq, const CycleMetrics& cycle) {
  if (!(pi0.pi0 > 0.0 && pi0.pi0 <= 1.0)) throw DomainError("pi0 must lie in (0, 1]");
  if (!(wq >= cycle.mean_T1)) throw InvalidDelay("mean waiting time below the first-stage service time");
}

}  // namespace

void PowerParams::validate() const {
  const double all[] = {user_base_w, user_slope, user_tx_power_w, relay_base_w, relay_slope, relay_tx_power_w,
                        relay_listen_w, ap_base_w, ap_listen_w, switch_energy_j};
  for (double v : all)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("power coefficients must be finite and nonnegative");
  if (!(relay_base_w > relay_listen_w)) throw ConfigError("relay_base_w must exceed relay_listen_w");
  if (!(ap_base_w > ap_listen_w)) throw ConfigError("ap_base_w must exceed ap_listen_w");
  if (!(max_delay_s > 0.0)) throw ConfigError("max_delay_s must be positive");
}

double switching_energy_per_cycle(const PowerParams& power, double pi0) {
  return 2.0 * power.switch_energy_j * (1.0 + 1.0 / pi0);
}

CycleEnergy cycle_energy(const SystemParams& params, const PowerParams& power, const Pi0Solution& pi0,
                         double wq, const CycleMetrics& cycle) {
  (void)params;
  check_inputs(pi0, wq, cycle);
  const double g = cycle.mean_gamma;
  CycleEnergy e;
  e.user_j = g * (wq - cycle.mean_T1) * power.user_base_w + g * cycle.mean_T1 * power.user_transmit_w();
  e.relay_j = cycle.mean_T0 * power.relay_listen_w + g * cycle.mean_T1 * power.relay_base_w +
              g * cycle.mean_T2 * power.relay_transmit_w();
  e.ap_j = (cycle.mean_T0 + g * cycle.mean_T1) * power.ap_listen_w + g * cycle.mean_T2 * power.ap_base_w;
  e.switching_j = switching_energy_per_cycle(power, pi0.pi0);
  return e;
}

PowerBreakdown component_powers(const SystemParams& params, const PowerParams& power, const Pi0Solution& pi0,
                                double wq, const CycleMetrics& cycle) {
  check_inputs(pi0, wq, cycle);
  const double lam = params.arrival_rate;
  const double f1 = lam * cycle.mean_T1;
  const double f2 = lam * cycle.mean_T2;
  const double rho = 1.0 - f1 - f2;
  PowerBreakdown b;
  b.user_w = lam * (wq - cycle.mean_T1) * power.user_base_w + f1 * power.user_transmit_w();
  b.relay_w = rho * power.relay_listen_w + f1 * power.relay_base_w + f2 * power.relay_transmit_w();
  b.ap_w = (rho + f1) * power.ap_listen_w + f2 * power.ap_base_w;
  b.switching_w = switching_energy_per_cycle(power, pi0.pi0) / cycle.mean_cycle;
  b.total_w = b.user_w + b.relay_w + b.ap_w + b.switching_w;
  return b;
}

double total_power(const SystemParams& params, const PowerParams& power, const Pi0Solution& pi0, double wq,
                   const CycleMetrics& cycle) {
  return component_powers(params, power, pi0, wq, cycle).total_w;
}

}  // namespace relayq
