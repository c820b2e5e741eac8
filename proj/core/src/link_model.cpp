#include "relayq/link_model.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <limits>

namespace relayq {

namespace {

constexpr int kPanelOrder = 16;
using Rule = boost::math::quadrature::gauss<double, kPanelOrder>;

// Full symmetric Gauss-Legendre rule on [-1, 1].
struct PanelRule {
  std::array<double, kPanelOrder> x;
  std::array<double, kPanelOrder> w;
  PanelRule() {
    const auto& a = Rule::abscissa();
    const auto& wt = Rule::weights();
    const std::size_t half = a.size();
    for (std::size_t i = 0; i < half; ++i) {
      x[i] = -a[half - 1 - i];
      w[i] = wt[half - 1 - i];
      x[kPanelOrder - 1 - i] = a[half - 1 - i];
      w[kPanelOrder - 1 - i] = wt[half - 1 - i];
    }
  }
};

const PanelRule& panel_rule() {
  static const PanelRule rule;
  return rule;
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

struct Moments {
  double mean;
  double second;
  double probe;
};

Moments moments_of(const std::vector<double>& t, const std::vector<double>& w, double probe_theta) {
  Moments m{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    m.mean += w[i] * t[i];
    m.second += w[i] * t[i] * t[i];
    m.probe -= w[i] * std::expm1(-probe_theta * t[i]);
  }
  return m;
}

double rel_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

std::string to_string(LstMode mode) { return mode == LstMode::exact ? "exact" : "jensen"; }
std::string to_string(LogBase base) { return base == LogBase::two ? "2" : "e"; }

void LinkParams::validate() const {
  if (!finite_positive(bandwidth_hz)) throw ConfigError("bandwidth_hz must be positive");
  if (!finite_positive(tx_power_w)) throw ConfigError("tx_power_w must be positive");
  if (!finite_positive(noise_power_w)) throw ConfigError("noise_power_w must be positive");
  if (!finite_positive(fading_variance)) throw ConfigError("fading_variance must be positive");
  if (!finite_positive(packet_length_bits)) throw ConfigError("packet_length_bits must be positive");
  if (!finite_positive(snr())) throw ConfigError("snr must be finite and positive");
}

void QuadratureSettings::validate() const {
  if (!(lower_cutoff_delta > 0.0) || !std::isfinite(lower_cutoff_delta))
    throw ConfigError("lower_cutoff_delta must be positive");
  if (node_count < 32) throw ConfigError("node_count must be at least 32");
  if (!(upper_truncation_mass > 0.0 && upper_truncation_mass < 1.0))
    throw ConfigError("upper_truncation_mass must lie in (0, 1)");
  if (!(refine_tol > 0.0)) throw ConfigError("refine_tol must be positive");
  if (max_nodes < node_count) throw ConfigError("max_nodes must be at least node_count");
}

double capacity(const LinkParams& link, double channel_gain_sq) {
  const double s = std::log1p(channel_gain_sq * link.tx_snr());
  const double bits = link.log_base == LogBase::two ? s / std::log(2.0) : s;
  return link.bandwidth_hz * bits;
}

double service_time_at(const LinkParams& link, double channel_gain_sq) {
  return link.packet_length_bits / capacity(link, channel_gain_sq);
}

ServiceDistribution::ServiceDistribution(const LinkParams& link, LstMode mode,
                                         const QuadratureSettings& quad)
    : mode_(mode) {
  link.validate();
  if (mode == LstMode::jensen) {
    const double t = service_time_at(link, link.fading_variance);
    times_ = {t};
    weights_ = {1.0};
    mean_ = t;
    second_moment_ = t * t;
    panels_ = 0;
    return;
  }
  quad.validate();
  build_exact(link, quad);
}

void ServiceDistribution::build_exact(const LinkParams& link, const QuadratureSettings& quad) {
  const double var = link.fading_variance;
  const double delta = quad.lower_cutoff_delta;
  const double x_max = var * std::log(1.0 / quad.upper_truncation_mass);
  if (!(x_max > delta)) throw QuadratureNonConvergence("truncation point below the lower cutoff");
  const double u_lo = std::log(delta);
  const double u_hi = std::log(x_max);
  const PanelRule& rule = panel_rule();

  auto build = [&](int panels, std::vector<double>& t, std::vector<double>& w) {
    t.clear();
    w.clear();
    t.reserve(static_cast<std::size_t>(panels) * kPanelOrder + 1);
    w.reserve(t.capacity());
    // Probability mass below the cutoff sits at the clamped value.
    t.push_back(service_time_at(link, delta));
    w.push_back(-std::expm1(-delta / var));
    const double h = (u_hi - u_lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = u_lo + (p + 0.5) * h;
      for (int i = 0; i < kPanelOrder; ++i) {
        const double x = std::exp(mid + 0.5 * h * rule.x[i]);
        t.push_back(service_time_at(link, x));
        w.push_back(0.5 * h * rule.w[i] * x * std::exp(-x / var) / var);
      }
    }
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
  };

  int panels = std::max(2, (quad.node_count + kPanelOrder - 1) / kPanelOrder);
  std::vector<double> t, w, t2, w2;
  build(panels, t, w);
  Moments prev = moments_of(t, w, 1.0 / moments_of(t, w, 0.0).mean);
  while (true) {
    if (2 * panels * kPanelOrder > quad.max_nodes)
      throw QuadratureNonConvergence("service-time quadrature did not converge within max_nodes");
    build(2 * panels, t2, w2);
    const Moments cur = moments_of(t2, w2, 1.0 / prev.mean);
    const Moments prev_probe = moments_of(t, w, 1.0 / prev.mean);
    panels *= 2;
    t.swap(t2);
    w.swap(w2);
    if (rel_change(cur.mean, prev.mean) <= quad.refine_tol &&
        rel_change(cur.second, prev.second) <= quad.refine_tol &&
        rel_change(cur.probe, prev_probe.probe) <= quad.refine_tol) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  times_ = std::move(t);
  weights_ = std::move(w);
  mean_ = prev.mean;
  second_moment_ = prev.second;
  panels_ = panels;
}

double mean_service_time(const LinkParams& link, LstMode mode, const QuadratureSettings& quad) {
  return ServiceDistribution(link, mode, quad).mean();
}

}  // namespace relayq
