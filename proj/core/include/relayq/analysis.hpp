#pragma once

#include <array>

#include "relayq/delay_model.hpp"
#include "relayq/power_model.hpp"
#include "relayq/transform_engine.hpp"

namespace relayq {

struct AnalysisResult {
  SystemParams params;
  Stability stability;
  Pi0Solution pi0;
  CycleMetrics cycle;
  CaseProbabilities case_probs;
  std::array<double, 3> case_mean_wq{};
  double mean_wq = 0.0;
  PowerBreakdown power;
};

// Full analytic pipeline: pi0, cycle aggregates, waiting time, power.
AnalysisResult analyze(const TransformEngine& engine, const PowerParams& power);
AnalysisResult analyze(const SystemParams& params, const PowerParams& power);

}  // namespace relayq
