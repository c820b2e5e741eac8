#include "relayq/delay_model.hpp"

namespace relayq {

Stability stability_check(const SystemParams& params) {
  const double e1 = mean_service_time(params.link1, params.lst_mode, params.quadrature);
  const double e2 = mean_service_time(params.link2, params.lst_mode, params.quadrature);
  const double margin = 1.0 - params.arrival_rate * (e1 + e2);
  return {margin > 0.0, margin};
}

DelayModel::DelayModel(const TransformEngine& engine, const Pi0Solution& pi0)
    : engine_(engine), pi0_(pi0.pi0) {
  const Stability st = engine_.stability();
  if (!st.stable) throw StabilityViolation("waiting time needs a stable instance", st.margin);
  if (!(pi0_ > 0.0 && pi0_ <= 1.0)) throw DomainError("pi0 must lie in (0, 1]");
  const DualScalar eps = DualScalar::variable(0.0);
  span_mean_[0] = engine_.n0_complement(engine_.hop1().lst_complement(eps), pi0_).deriv();
  span_mean_[1] = engine_.n0_complement(engine_.hop2().lst_complement(eps), pi0_).deriv();
}

CaseProbabilities DelayModel::case_probabilities() const {
  const double lam = engine_.params().arrival_rate;
  CaseProbabilities p;
  p.p_fss = lam * engine_.hop1().mean();
  p.p_sss = lam * engine_.hop2().mean();
  p.p_idle = 1.0 - p.p_fss - p.p_sss;
  return p;
}

std::array<double, 3> DelayModel::case_means() const {
  const DualScalar eps = DualScalar::variable(0.0);
  return {-case_lst(1, eps).deriv(), -case_lst(2, eps).deriv(), -case_lst(3, eps).deriv()};
}

double DelayModel::mean_waiting_time() const {
  const CaseProbabilities p = case_probabilities();
  const std::array<double, 3> m = case_means();
  return p.p_idle * m[0] + p.p_fss * m[1] + p.p_sss * m[2];
}

double DelayModel::mean_batch_fss() const { return span_mean_[0]; }

CaseProbabilities case_probabilities(const SystemParams& params) {
  const Stability st = stability_check(params);
  if (!st.stable) throw StabilityViolation("case probabilities need a stable instance", st.margin);
  const double e1 = mean_service_time(params.link1, params.lst_mode, params.quadrature);
  const double e2 = mean_service_time(params.link2, params.lst_mode, params.quadrature);
  CaseProbabilities p;
  p.p_fss = params.arrival_rate * e1;
  p.p_sss = params.arrival_rate * e2;
  p.p_idle = 1.0 - p.p_fss - p.p_sss;
  return p;
}

DualScalar case_lst(int which, const DualScalar& theta, const SystemParams& params, const Pi0Solution& pi0) {
  return DelayModel(TransformEngine(params), pi0).case_lst(which, theta);
}

double mean_waiting_time(const SystemParams& params, const Pi0Solution& pi0) {
  return DelayModel(TransformEngine(params), pi0).mean_waiting_time();
}

}  // namespace relayq
