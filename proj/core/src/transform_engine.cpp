#include "relayq/transform_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relayq {

void RecursionConfig::validate() const {
  if (max_depth < 8) throw ConfigError("recursion max_depth must be at least 8");
  auto in_range = [](double t) { return t > 0.0 && t < 1e-3; };
  if (!in_range(convergence_tol)) throw ConfigError("convergence_tol must lie in (0, 1e-3)");
  if (!in_range(pi0_tol)) throw ConfigError("pi0_tol must lie in (0, 1e-3)");
  if (pi0_max_iters < 1) throw ConfigError("pi0_max_iters must be positive");
}

void SystemParams::validate() const {
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
    throw ConfigError("arrival_rate must be positive");
  if (threshold < 1) throw ConfigError("threshold must be at least 1");
  link1.validate();
  link2.validate();
  recursion.validate();
  if (lst_mode == LstMode::exact) quadrature.validate();
}

bool SystemParams::symmetric_links() const {
  const ServiceDistribution a(link1, lst_mode, quadrature);
  const ServiceDistribution b(link2, lst_mode, quadrature);
  if (a.times().size() != b.times().size()) return false;
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); };
  for (std::size_t i = 0; i < a.times().size(); ++i)
    if (!close(a.times()[i], b.times()[i]) || !close(a.weights()[i], b.weights()[i])) return false;
  return true;
}

TransformEngine::TransformEngine(const SystemParams& params) : params_(params) {
  params_.validate();
  hop1_ = std::make_shared<const ServiceDistribution>(params_.link1, params_.lst_mode, params_.quadrature);
  if (params_.link2 == params_.link1) {
    hop2_ = hop1_;
  } else {
    hop2_ = std::make_shared<const ServiceDistribution>(params_.link2, params_.lst_mode, params_.quadrature);
    if (!params_.symmetric_links())
      throw AsymmetricLinks("analytic evaluation requires identically distributed hop service times");
  }
}

TransformEngine::TransformEngine(const SystemParams& params, std::shared_ptr<const ServiceDistribution> h1,
                                 std::shared_ptr<const ServiceDistribution> h2)
    : params_(params), hop1_(std::move(h1)), hop2_(std::move(h2)) {}

TransformEngine TransformEngine::with_threshold(int threshold) const {
  if (threshold < 1) throw ConfigError("threshold must be at least 1");
  SystemParams p = params_;
  p.threshold = threshold;
  return TransformEngine(p, hop1_, hop2_);
}

Stability TransformEngine::stability() const {
  const double margin = 1.0 - load();
  return {margin > 0.0, margin};
}

std::vector<double> TransformEngine::orbit_gaps(double z, int levels) const {
  if (z > 1.0) throw DomainError("PGF argument above 1");
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(levels) + 1);
  double u = 1.0 - z;
  gaps.push_back(std::abs(u));
  for (int n = 0; n < levels; ++n) {
    u = hop2_->lst_complement(params_.arrival_rate * u);
    gaps.push_back(std::abs(u));
  }
  return gaps;
}

Pi0Solution TransformEngine::solve_pi0() const {
  const Stability st = stability();
  if (!st.stable) {
    std::ostringstream os;
    os << "unstable instance: lambda (E{T1} + E{T2}) = " << load();
    throw StabilityViolation(os.str(), st.margin);
  }
  const RecursionConfig& rc = params_.recursion;
  const double w = hop2_->lst_complement(params_.arrival_rate);
  int depth = 0;
  auto residual = [&](double p) {
    int d = 0;
    const double n0 = 1.0 - n0_complement(w, p, &d);
    depth = std::max(depth, d);
    return p - n0 * n0;
  };

  double lo = 1e-12;
  double hi = 1.0;
  double r_lo = residual(lo);
  double r_hi = residual(hi);
  Pi0Solution sol;
  if (r_hi == 0.0 || r_lo == 0.0) {
    sol.pi0 = r_hi == 0.0 ? hi : lo;
    sol.residual = 0.0;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;
    sol.depth_used = depth;
    return sol;
  }
  if ((r_lo > 0.0) == (r_hi > 0.0))
    throw NoRootBracketed("pi0 residual does not change sign on (1e-12, 1]", r_lo, r_hi);

  int it = 0;
  double mid = 0.5 * (lo + hi);
  double r_mid = residual(mid);
  while (!(hi - lo <= rc.pi0_tol && std::abs(r_mid) <= rc.pi0_tol)) {
    if (++it > rc.pi0_max_iters) throw Pi0NonConvergence("pi0 bisection exhausted pi0_max_iters");
    if ((r_mid > 0.0) == (r_lo > 0.0)) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    r_mid = residual(mid);
    if (r_mid == 0.0) break;
  }
  sol.pi0 = mid;
  sol.iterations_used = it;
  sol.residual = r_mid;
  sol.bracket_lo = lo;
  sol.bracket_hi = hi;
  sol.depth_used = depth;
  return sol;
}

CycleMetrics TransformEngine::cycle_metrics(const Pi0Solution& pi0) const {
  const Stability st = stability();
  if (!st.stable) throw StabilityViolation("cycle metrics need a stable instance", st.margin);
  CycleMetrics m;
  const double lam = params_.arrival_rate;
  const double n = params_.threshold;
  m.mean_T1 = hop1_->mean();
  m.mean_T2 = hop2_->mean();
  m.mean_gamma = n / st.margin;
  m.mean_T0 = n / lam;
  m.mean_cycle = m.mean_gamma / lam;
  m.mean_subcycles = 1.0 / pi0.pi0;
  return m;
}

Pi0Solution solve_pi0(const SystemParams& params) { return TransformEngine(params).solve_pi0(); }

CycleMetrics cycle_metrics(const SystemParams& params, const Pi0Solution& pi0) {
  return TransformEngine(params).cycle_metrics(pi0);
}

}  // namespace relayq
