#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relayq/analysis.hpp"

namespace relayq {

struct OptimizerSettings {
  int n_ceiling = 64;
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

// E{W_q}(n_hi) < E{W_q}(n_lo) for n_hi > n_lo.
struct NonMonotoneWarning {
  int n_lo = 0;
  int n_hi = 0;
  double wq_lo = 0.0;
  double wq_hi = 0.0;
  std::string message() const;
};

struct NMaxResult {
  int n_max = 1;
  bool cap_limited = false;
  bool linear_scan = false;
  std::vector<NonMonotoneWarning> warnings;
  int evaluations = 0;
};

struct SweepRow {
  int threshold = 0;
  double mean_wq = 0.0;
  double total_power = 0.0;
  double pi0 = 0.0;
  PowerBreakdown power;
};

struct OptimizationResult {
  int n_max = 1;
  int n_prime = 1;
  int n_star = 1;
  bool cap_limited = false;
  double power_at_star = 0.0;
  double wq_at_star = 0.0;
  std::vector<SweepRow> sweep_table;
  std::vector<NonMonotoneWarning> warnings;
};

struct Baseline {
  double wq = 0.0;
  double ptot = 0.0;
};

NMaxResult find_n_max(const TransformEngine& engine, const PowerParams& power, const OptimizerSettings& settings = {});
NMaxResult find_n_max(const SystemParams& params, const PowerParams& power, const OptimizerSettings& settings = {});

// Evaluates N = n_lo..n_hi; rows ordered by N regardless of worker timing.
std::vector<SweepRow> sweep_thresholds(const TransformEngine& engine, const PowerParams& power, int n_lo, int n_hi,
                                       unsigned threads = 0);

// Index of the smallest power; ties go to the smaller threshold.
std::size_t argmin_power(const std::vector<SweepRow>& rows);

OptimizationResult optimize_threshold(const TransformEngine& engine, const PowerParams& power,
                                      const OptimizerSettings& settings = {});
OptimizationResult optimize_threshold(const SystemParams& params, const PowerParams& power,
                                      const OptimizerSettings& settings = {});

// Always-on service, modeled as threshold 1.
Baseline baseline_aos(const TransformEngine& engine, const PowerParams& power);
Baseline baseline_aos(const SystemParams& params, const PowerParams& power);

}  // namespace relayq
