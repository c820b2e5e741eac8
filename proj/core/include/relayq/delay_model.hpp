#pragma once

#include <array>

#include "relayq/transform_engine.hpp"

namespace relayq {

struct CaseProbabilities {
  double p_idle = 1.0;
  double p_fss = 0.0;
  double p_sss = 0.0;
};

template <class S>
struct CaseLsts {
  S wq_case1;
  S wq_case2;
  S wq_case3;
  double theta = 0.0;
};

// Stable iff lambda < 1 / (E{T1} + E{T2}). Accepts lambda = 0.
Stability stability_check(const SystemParams& params);

// Conditional waiting-time transforms for a solved instance.
class DelayModel {
 public:
  DelayModel(const TransformEngine& engine, const Pi0Solution& pi0);

  const TransformEngine& engine() const { return engine_; }
  double pi0() const { return pi0_; }

  // case in {1, 2, 3}; theta.value >= 0.
  template <class S>
  S case_lst(int which, const S& theta) const;

  template <class S>
  CaseLsts<S> case_lsts(const S& theta) const {
    return {case_lst(1, theta), case_lst(2, theta), case_lst(3, theta), value_of(theta)};
  }

  CaseProbabilities case_probabilities() const;
  // Mean wait of an arrival in each case: -d/dtheta of the case LST at 0.
  std::array<double, 3> case_means() const;
  double mean_waiting_time() const;

  // Mean total FSS span of one gated batch, -d/dtheta N0(L_T1(theta)) at 0.
  double mean_batch_fss() const;

 private:
  template <class S>
  S n0_of_lst1(const S& theta) const {
    return 1.0 - engine_.n0_complement(engine_.hop1().lst_complement(theta), pi0_);
  }
  template <class S>
  S n0_of_lst2(const S& theta) const {
    return 1.0 - engine_.n0_complement(engine_.hop2().lst_complement(theta), pi0_);
  }
  // Joint elapsed/remaining factor for a span whose per-packet law is hop
  // `span_hop` (1 for FSS, 2 for SSS).
  template <class S>
  S joint_factor(int span_hop, const S& theta) const;
  template <std::size_t K>
  Taylor<K> joint_factor_series(int span_hop) const;

  TransformEngine engine_;
  double pi0_;
  std::array<double, 2> span_mean_{};
};

template <std::size_t K>
Taylor<K> DelayModel::joint_factor_series(int span_hop) const {
  // Numerator and denominator both vanish at 0; expand one order higher
  // and cancel the common factor theta.
  const double lam = engine_.params().arrival_rate;
  const auto eps = Taylor<K + 1>::variable(0.0);
  const ServiceDistribution& span = span_hop == 1 ? engine_.hop1() : engine_.hop2();
  auto span_complement = [&](const Taylor<K + 1>& s) {
    return engine_.n0_complement(span.lst_complement(s), pi0_);
  };
  Taylor<K + 1> a = lam * engine_.hop2().lst_complement(eps);
  Taylor<K + 1> num = span_complement(eps) - span_complement(a);
  Taylor<K + 1> den = eps - a;
  num.coeff(0) = 0.0;
  den.coeff(0) = 0.0;
  const double mean_span = span_mean_[static_cast<std::size_t>(span_hop - 1)];
  return shift_down(num) / (shift_down(den) * mean_span);
}

template <class S>
S DelayModel::joint_factor(int span_hop, const S& theta) const {
  const double t = value_of(theta);
  const double mean_span = span_mean_[static_cast<std::size_t>(span_hop - 1)];
  if (t * mean_span < 1e-6) {
    const Taylor<3> x = joint_factor_series<3>(span_hop);
    S r(x.coeff(3));
    for (std::size_t k = 3; k-- > 0;) r = r * theta + x.coeff(k);
    return r;
  }
  const double lam = engine_.params().arrival_rate;
  const ServiceDistribution& span = span_hop == 1 ? engine_.hop1() : engine_.hop2();
  auto span_complement = [&](const S& s) { return engine_.n0_complement(span.lst_complement(s), pi0_); };
  const S a = lam * engine_.hop2().lst_complement(theta);
  return (span_complement(theta) - span_complement(a)) / ((theta - a) * mean_span);
}

template <class S>
S DelayModel::case_lst(int which, const S& theta) const {
  if (value_of(theta) < 0.0) throw DomainError("negative LST argument");
  const double lam = engine_.params().arrival_rate;
  switch (which) {
    case 1: {
      const unsigned n = static_cast<unsigned>(engine_.params().threshold);
      const S idle = lam / (theta + lam);
      const S l1 = engine_.hop1().lst(theta);
      const S l2 = engine_.hop2().lst(theta);
      // sum over i = 1..N of idle^(N-i) * l2^(i-1)
      S acc(0.0);
      S idlepow(1.0);
      for (unsigned i = n; i >= 1; --i) {
        acc += idlepow * ipow(l2, i - 1);
        idlepow *= idle;
      }
      return ipow(l1, n) * acc / static_cast<double>(n);
    }
    case 2:
      return joint_factor(1, theta) * n0_of_lst2(theta) * n0_of_lst1(theta);
    case 3: {
      const S a = lam * engine_.hop2().lst_complement(theta);
      return joint_factor(2, theta) * n0_of_lst1(theta) * n0_of_lst1(a);
    }
    default:
      throw ConfigError("case index must be 1, 2 or 3");
  }
}

// Free-function forms.
CaseProbabilities case_probabilities(const SystemParams& params);
DualScalar case_lst(int which, const DualScalar& theta, const SystemParams& params, const Pi0Solution& pi0);
double mean_waiting_time(const SystemParams& params, const Pi0Solution& pi0);

}  // namespace relayq
