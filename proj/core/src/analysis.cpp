#include "relayq/analysis.hpp"

namespace relayq {

AnalysisResult analyze(const TransformEngine& engine, const PowerParams& power) {
  AnalysisResult r;
  r.params = engine.params();
  r.stability = engine.stability();
  if (!r.stability.stable) throw StabilityViolation("unstable instance", r.stability.margin);
  r.pi0 = engine.solve_pi0();
  r.cycle = engine.cycle_metrics(r.pi0);
  const DelayModel delay(engine, r.pi0);
  r.case_probs = delay.case_probabilities();
  r.case_mean_wq = delay.case_means();
  r.mean_wq = r.case_probs.p_idle * r.case_mean_wq[0] + r.case_probs.p_fss * r.case_mean_wq[1] +
              r.case_probs.p_sss * r.case_mean_wq[2];
  r.power = component_powers(r.params, power, r.pi0, r.mean_wq, r.cycle);
  return r;
}

AnalysisResult analyze(const SystemParams& params, const PowerParams& power) {
  return analyze(TransformEngine(params), power);
}

}  // namespace relayq
