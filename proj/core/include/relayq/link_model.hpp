#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "relayq/errors.hpp"
#include "relayq/taylor.hpp"

namespace relayq {

enum class LogBase { two, e };
enum class LstMode { exact, jensen };

std::string to_string(LstMode mode);
std::string to_string(LogBase base);

struct LinkParams {
  double bandwidth_hz = 1e6;
  double tx_power_w = 0.1;
  double noise_power_w = 1e-5;
  double fading_variance = 1.0;
  double packet_length_bits = 1e4;
  LogBase log_base = LogBase::two;

  // p / sigma^2, the transmit SNR before fading.
  double tx_snr() const { return tx_power_w / noise_power_w; }
  double snr() const { return tx_snr() * fading_variance; }
  void validate() const;

  friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

struct QuadratureSettings {
  double lower_cutoff_delta = 1e-6;
  int node_count = 64;
  double upper_truncation_mass = 1e-12;
  double refine_tol = 1e-9;
  int max_nodes = 1 << 15;

  void validate() const;

  friend bool operator==(const QuadratureSettings&, const QuadratureSettings&) = default;
};

// bits/s for squared channel gain x.
double capacity(const LinkParams& link, double channel_gain_sq);

// Service time l / C(x) for squared channel gain x.
double service_time_at(const LinkParams& link, double channel_gain_sq);

// Discrete representation of a hop's service-time law: a single atom at
// the average-SNR time in jensen mode, quadrature nodes in exact mode.
class ServiceDistribution {
 public:
  ServiceDistribution() = default;
  ServiceDistribution(const LinkParams& link, LstMode mode, const QuadratureSettings& quad = {});

  LstMode mode() const { return mode_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& weights() const { return weights_; }
  double mean() const { return mean_; }
  double second_moment() const { return second_moment_; }
  int panels() const { return panels_; }

  // 1 - L(theta), accurate for small theta.
  template <class S>
  S lst_complement(const S& theta) const {
    if (value_of(theta) < 0.0) throw DomainError("negative LST argument");
    using std::expm1;
    S acc(0.0);
    for (std::size_t i = 0; i < times_.size(); ++i) acc -= weights_[i] * expm1(-times_[i] * theta);
    return acc;
  }

  template <class S>
  S lst(const S& theta) const {
    return 1.0 - lst_complement(theta);
  }

  bool same_law(const ServiceDistribution& o) const {
    return mode_ == o.mode_ && times_ == o.times_ && weights_ == o.weights_;
  }

 private:
  void build_exact(const LinkParams& link, const QuadratureSettings& quad);

  LstMode mode_ = LstMode::jensen;
  std::vector<double> times_;
  std::vector<double> weights_;
  double mean_ = 0.0;
  double second_moment_ = 0.0;
  int panels_ = 0;
};

double mean_service_time(const LinkParams& link, LstMode mode, const QuadratureSettings& quad = {});

template <class S>
S service_lst(const LinkParams& link, const S& theta, LstMode mode, const QuadratureSettings& quad = {}) {
  return ServiceDistribution(link, mode, quad).lst(theta);
}

// One fading draw X ~ Exp(mean fading_variance), clamped to delta.
template <class Rng>
double sample_service_time(const LinkParams& link, Rng& rng, double delta = 1e-6) {
  std::exponential_distribution<double> gain(1.0 / link.fading_variance);
  double x = gain(rng);
  if (x < delta) x = delta;
  return service_time_at(link, x);
}

}  // namespace relayq
