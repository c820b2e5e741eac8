#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "relayq/errors.hpp"
#include "relayq/link_model.hpp"
#include "relayq/taylor.hpp"

namespace relayq {

struct RecursionConfig {
  int max_depth = 512;
  double convergence_tol = 1e-12;
  double pi0_tol = 1e-10;
  int pi0_max_iters = 200;

  void validate() const;

  friend bool operator==(const RecursionConfig&, const RecursionConfig&) = default;
};

struct SystemParams {
  double arrival_rate = 200.0;  // packets/s
  int threshold = 1;
  LinkParams link1;
  LinkParams link2;
  LstMode lst_mode = LstMode::jensen;
  RecursionConfig recursion;
  QuadratureSettings quadrature;

  void validate() const;
  // True when both hops induce the same service-time law.
  bool symmetric_links() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct Pi0Solution {
  double pi0 = 1.0;
  int iterations_used = 0;
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  int depth_used = 0;
};

struct CycleMetrics {
  double mean_T1 = 0.0;
  double mean_T2 = 0.0;
  double mean_gamma = 0.0;
  double mean_T0 = 0.0;
  double mean_cycle = 0.0;
  double mean_subcycles = 0.0;
};

struct Stability {
  bool stable = true;
  double margin = 1.0;  // 1 - lambda (E{T1} + E{T2})
};

namespace detail {

inline bool small_enough(double u, double ref, double factor, double tol) {
  return factor * std::abs(u) <= tol * ref;
}

template <std::size_t K>
bool small_enough(const Taylor<K>& u, const Taylor<K>& ref, double factor, double tol) {
  for (std::size_t k = 0; k <= K; ++k) {
    const double r = ref.coeff(k) != 0.0 ? std::abs(ref.coeff(k)) : 1.0;
    if (!(factor * std::abs(u.coeff(k)) <= tol * r)) return false;
  }
  return true;
}

inline double abs_ref(double u) { return u != 0.0 ? std::abs(u) : 1.0; }
template <std::size_t K>
Taylor<K> abs_ref(const Taylor<K>& u) {
  Taylor<K> r;
  for (std::size_t k = 0; k <= K; ++k) r.coeff(k) = std::abs(u.coeff(k));
  if (r.coeff(0) == 0.0) r.coeff(0) = 1.0;
  return r;
}

// 1 - (1 - u)^n, keeping relative accuracy for small u.
template <class S>
S eta_complement(const S& u, unsigned n) {
  if (value_of(u) > 0.5) return 1.0 - ipow(1.0 - u, n);
  using std::expm1;
  using std::log1p;
  return -expm1(static_cast<double>(n) * log1p(-u));
}

}  // namespace detail

// Analytic PGF/LST machinery for one queueing instance. Holds the hop
// service-time laws so repeated evaluations share the quadrature.
class TransformEngine {
 public:
  explicit TransformEngine(const SystemParams& params);

  const SystemParams& params() const { return params_; }
  const ServiceDistribution& hop1() const { return *hop1_; }
  const ServiceDistribution& hop2() const { return *hop2_; }
  double load() const { return params_.arrival_rate * (hop1_->mean() + hop2_->mean()); }
  Stability stability() const;

  // Same links and settings, different threshold.
  TransformEngine with_threshold(int threshold) const;

  // 1 - N0(z) given w = 1 - z. All arithmetic in S so derivative
  // coefficients of w flow through the orbit and the unwinding.
  // fixed_depth > 0 forces that many levels instead of the stop rule.
  template <class S>
  S n0_complement(const S& w, double pi0, int* depth_used = nullptr, int fixed_depth = 0) const;

  template <class S>
  S eval_n0(const S& z, double pi0, int* depth_used = nullptr) const {
    return 1.0 - n0_complement(1.0 - z, pi0, depth_used);
  }

  // |f_n(z) - 1| for n = 0..levels.
  std::vector<double> orbit_gaps(double z, int levels) const;

  Pi0Solution solve_pi0() const;
  CycleMetrics cycle_metrics(const Pi0Solution& pi0) const;

 private:
  TransformEngine(const SystemParams& params, std::shared_ptr<const ServiceDistribution> h1,
                  std::shared_ptr<const ServiceDistribution> h2);

  SystemParams params_;
  std::shared_ptr<const ServiceDistribution> hop1_;
  std::shared_ptr<const ServiceDistribution> hop2_;
};

template <class S>
S TransformEngine::n0_complement(const S& w, double pi0, int* depth_used, int fixed_depth) const {
  if (value_of(w) < 0.0) throw DomainError("PGF argument above 1");
  const double lam = params_.arrival_rate;
  const unsigned n = static_cast<unsigned>(params_.threshold);
  const RecursionConfig& rc = params_.recursion;
  // Bound on the growth of a seed perturbation through the unwinding.
  const double margin = std::max(1.0 - load(), 1e-300);
  const double seed_scale = static_cast<double>(n) / margin;
  const auto ref = detail::abs_ref(w);

  std::vector<S> eta;
  eta.reserve(64);
  S u = w;
  double growth = 1.0;
  int depth = 0;
  while (true) {
    eta.push_back(detail::eta_complement(u, n));
    u = hop2_->lst_complement(lam * u);
    growth *= 2.0;
    ++depth;
    if (fixed_depth > 0) {
      if (depth >= fixed_depth) break;
      continue;
    }
    if (detail::small_enough(u, ref, growth * seed_scale, rc.convergence_tol)) break;
    if (depth >= rc.max_depth)
      throw RecursionNonConvergence("N0 recursion did not converge within max_depth", depth,
                                    std::abs(value_of(u)));
  }
  S e(0.0);
  for (std::size_t k = eta.size(); k-- > 0;) e = 2.0 * e - e * e + pi0 * eta[k];
  if (depth_used) *depth_used = depth;
  return e;
}

// Free-function forms; each builds a fresh engine.
template <class S>
S eval_n0(const S& z, double pi0, const SystemParams& params) {
  return TransformEngine(params).eval_n0(z, pi0);
}
Pi0Solution solve_pi0(const SystemParams& params);
CycleMetrics cycle_metrics(const SystemParams& params, const Pi0Solution& pi0);

}  // namespace relayq
