#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "relayq/power_model.hpp"
#include "relayq/transform_engine.hpp"

namespace relayq {

// fading: per-packet Rayleigh draws. jensen_mean: every service takes the
// average-SNR time (deterministic), used to separate queueing-model error
// from the fading approximation.
enum class SimServiceModel { fading, jensen_mean };

struct SimConfig {
  SystemParams system;
  PowerParams power;
  std::int64_t warmup_packets = 10'000;
  std::int64_t measured_packets = 1'000'000;
  int replications = 10;
  std::uint64_t base_seed = 1;
  SimServiceModel service_model = SimServiceModel::fading;
  std::int64_t queue_cap = 1'000'000;
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
  // Equal in everything except base_seed and threads.
  bool same_experiment(const SimConfig& o) const;
};

// Raw regenerative sums from one replication (complete cycles only).
struct Tally {
  std::int64_t packets = 0;
  double sum_wq = 0.0;
  std::array<std::int64_t, 3> case_count{};
  std::array<double, 3> case_sum_wq{};
  std::int64_t subcycles = 0;
  std::int64_t cycles = 0;
  double sum_cycle = 0.0;
  double sum_idle = 0.0;
  double sum_fss = 0.0;
  double sum_sss = 0.0;
  std::array<double, 2> sum_service{};
  std::array<std::int64_t, 2> n_service{};
  double energy_user = 0.0;
  double energy_relay = 0.0;
  double energy_ap = 0.0;
  double energy_switch = 0.0;
  std::int64_t max_queue = 0;
  bool unstable = false;

  double energy_total() const { return energy_user + energy_relay + energy_ap + energy_switch; }
};

struct Estimate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95%, t-based; NaN when undefined
  double std_error = 0.0;      // NaN when undefined
  bool ci_defined() const;
};

struct SimStats {
  SimConfig config;
  std::vector<Tally> runs;
  std::int64_t measured_packets = 0;
  bool unstable = false;

  Estimate mean_wq;
  Estimate pi0_hat;
  Estimate mean_gamma_hat;
  Estimate mean_cycle_hat;
  Estimate mean_idle_hat;
  Estimate mean_subcycles_hat;
  std::array<Estimate, 3> case_fractions;
  std::array<Estimate, 3> per_case_mean_wq;
  Estimate mean_power_hat;
  Estimate user_power_hat;
  Estimate relay_power_hat;
  Estimate ap_power_hat;
  Estimate switch_power_hat;
  std::array<Estimate, 2> mean_service_hat;
  // Arrivals per cycle divided by lambda * mean cycle duration.
  Estimate wald_ratio;
};

// Runs a single replication with the given index.
Tally simulate_replication(const SimConfig& config, int replication);

SimStats run_simulation(const SimConfig& config);

// Pools replications from runs of the same experiment.
SimStats summarize(const std::vector<SimStats>& stats_list);

// Builds estimates from raw tallies.
SimStats summarize_tallies(const SimConfig& config, std::vector<Tally> runs);

}  // namespace relayq
