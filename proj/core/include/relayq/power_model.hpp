#pragma once

#include "relayq/transform_engine.hpp"

namespace relayq {

struct PowerParams {
  double user_base_w = 0.5;       // circuit power while transmitting
  double user_slope = 1.2;        // per watt of radiated power
  double user_tx_power_w = 0.1;   // p1
  double relay_base_w = 10.0;
  double relay_slope = 2.6;
  double relay_tx_power_w = 0.1;  // p2
  double relay_listen_w = 4.0;
  double ap_base_w = 10.0;
  double ap_listen_w = 4.0;
  double switch_energy_j = 8e-3;
  double max_delay_s = 20e-3;

  double user_transmit_w() const { return user_base_w + user_slope * user_tx_power_w; }
  double relay_transmit_w() const { return relay_base_w + relay_slope * relay_tx_power_w; }
  void validate() const;

  friend bool operator==(const PowerParams&, const PowerParams&) = default;
};

struct PowerBreakdown {
  double user_w = 0.0;
  double relay_w = 0.0;
  double ap_w = 0.0;
  double switching_w = 0.0;
  double total_w = 0.0;
};

// Expected energy per regeneration cycle (J).
struct CycleEnergy {
  double user_j = 0.0;
  double relay_j = 0.0;
  double ap_j = 0.0;
  double switching_j = 0.0;
  double total_j() const { return user_j + relay_j + ap_j + switching_j; }
};

// Switching energy per cycle: two relay transitions plus two per sub-cycle.
double switching_energy_per_cycle(const PowerParams& power, double pi0);

CycleEnergy cycle_energy(const SystemParams& params, const PowerParams& power, const Pi0Solution& pi0,
                         double wq, const CycleMetrics& cycle);

PowerBreakdown component_powers(const SystemParams& params, const PowerParams& power, const Pi0Solution& pi0,
                                double wq, const CycleMetrics& cycle);

double total_power(const SystemParams& params, const PowerParams& power, const Pi0Solution& pi0, double wq,
                   const CycleMetrics& cycle);

}  // namespace relayq
