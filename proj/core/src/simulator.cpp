#include "relayq/simulator.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cassert>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

namespace relayq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Packet {
  double arrival;
  std::int64_t tag;  // sub-cycle count at arrival
  int stage;         // 0 idle, 1 FSS, 2 SSS
};

std::mt19937_64 substream(std::uint64_t base_seed, int replication, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

class ServiceSampler {
 public:
  ServiceSampler(const LinkParams& link, const SimConfig& cfg, std::mt19937_64 rng)
      : link_(link),
        rng_(std::move(rng)),
        delta_(cfg.system.quadrature.lower_cutoff_delta),
        fixed_(cfg.service_model == SimServiceModel::jensen_mean ? service_time_at(link, link.fading_variance)
                                                                 : 0.0) {}
  double operator()() { return fixed_ > 0.0 ? fixed_ : sample_service_time(link_, rng_, delta_); }

 private:
  LinkParams link_;
  std::mt19937_64 rng_;
  double delta_;
  double fixed_;
};

void merge(Tally& into, const Tally& c) {
  into.packets += c.packets;
  into.sum_wq += c.sum_wq;
  for (int i = 0; i < 3; ++i) {
    into.case_count[i] += c.case_count[i];
    into.case_sum_wq[i] += c.case_sum_wq[i];
  }
  into.subcycles += c.subcycles;
  into.cycles += c.cycles;
  into.sum_cycle += c.sum_cycle;
  into.sum_idle += c.sum_idle;
  into.sum_fss += c.sum_fss;
  into.sum_sss += c.sum_sss;
  for (int i = 0; i < 2; ++i) {
    into.sum_service[i] += c.sum_service[i];
    into.n_service[i] += c.n_service[i];
  }
  into.energy_user += c.energy_user;
  into.energy_relay += c.energy_relay;
  into.energy_ap += c.energy_ap;
  into.energy_switch += c.energy_switch;
}

// Ratio estimator pooled over runs, with a t-interval from run-level ratios.
template <class Num, class Den>
Estimate ratio_estimate(const std::vector<Tally>& runs, Num num, Den den) {
  double tn = 0.0;
  double td = 0.0;
  std::vector<double> per_run;
  per_run.reserve(runs.size());
  for (const Tally& t : runs) {
    const double n = num(t);
    const double d = den(t);
    tn += n;
    td += d;
    per_run.push_back(d != 0.0 ? n / d : kNaN);
  }
  Estimate e;
  e.mean = td != 0.0 ? tn / td : kNaN;
  const std::size_t r = per_run.size();
  if (r < 2) {
    e.ci_half_width = kNaN;
    e.std_error = kNaN;
    return e;
  }
  double m = 0.0;
  for (double v : per_run) m += v;
  m /= static_cast<double>(r);
  double ss = 0.0;
  for (double v : per_run) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(r - 1));
  e.std_error = sd / std::sqrt(static_cast<double>(r));
  const boost::math::students_t dist(static_cast<double>(r - 1));
  e.ci_half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * e.std_error;
  return e;
}

}  // namespace

bool Estimate::ci_defined() const { return std::isfinite(ci_half_width); }

void SimConfig::validate() const {
  system.validate();
  power.validate();
  if (warmup_packets < 0) throw ConfigError("warmup_packets must be nonnegative");
  if (measured_packets < 1) throw ConfigError("measured_packets must be positive");
  if (replications < 1) throw ConfigError("replications must be positive");
  if (queue_cap < 1) throw ConfigError("queue_cap must be positive");
}

bool SimConfig::same_experiment(const SimConfig& o) const {
  return system == o.system && power == o.power && warmup_packets == o.warmup_packets &&
         measured_packets == o.measured_packets && replications == o.replications &&
         service_model == o.service_model && queue_cap == o.queue_cap;
}

Tally simulate_replication(const SimConfig& cfg, int replication) {
  const SystemParams& sp = cfg.system;
  const PowerParams& pw = cfg.power;
  const std::size_t n_threshold = static_cast<std::size_t>(sp.threshold);
  std::mt19937_64 arrivals = substream(cfg.base_seed, replication, 0);
  ServiceSampler hop1(sp.link1, cfg, substream(cfg.base_seed, replication, 1));
  ServiceSampler hop2(sp.link2, cfg, substream(cfg.base_seed, replication, 2));
  std::exponential_distribution<double> interarrival(sp.arrival_rate);

  const double p_user_tx = pw.user_transmit_w();
  const double p_relay_tx = pw.relay_transmit_w();

  Tally total;
  std::vector<Packet> queue;
  std::vector<Packet> batch;
  std::vector<double> t1;
  double t = 0.0;
  double next_arrival = interarrival(arrivals);
  std::int64_t subcycle_index = 0;
  std::int64_t warm_packets = 0;
  bool measuring = cfg.warmup_packets == 0;

  auto admit_until = [&](double end, int stage) {
    while (next_arrival < end) {
      queue.push_back({next_arrival, subcycle_index, stage});
      next_arrival += interarrival(arrivals);
    }
  };

  while (true) {
    Tally c;
    const double cycle_start = t;
    while (queue.size() < n_threshold) {
      t = next_arrival;
      queue.push_back({t, subcycle_index, 0});
      next_arrival += interarrival(arrivals);
    }
    const double idle = t - cycle_start;
    c.sum_idle = idle;
    c.energy_relay += idle * pw.relay_listen_w;
    c.energy_ap += idle * pw.ap_listen_w;
    c.energy_switch += 2.0 * pw.switch_energy_j;

    while (true) {
      ++subcycle_index;
      ++c.subcycles;
      batch.swap(queue);
      queue.clear();

      t1.resize(batch.size());
      double fss = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        t1[i] = hop1();
        fss += t1[i];
      }
      admit_until(t + fss, 1);
      t += fss;

      double s = t;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const Packet& p = batch[i];
        assert(p.tag < subcycle_index && "packet served in its arrival sub-cycle");
        const double w = s - p.arrival;
        c.sum_wq += w;
        c.case_count[p.stage] += 1;
        c.case_sum_wq[p.stage] += w;
        c.energy_user += (w - t1[i]) * pw.user_base_w + t1[i] * p_user_tx;
        s += hop2();
      }
      const double sss = s - t;
      admit_until(s, 2);
      t = s;

      c.packets += static_cast<std::int64_t>(batch.size());
      c.sum_fss += fss;
      c.sum_sss += sss;
      c.sum_service[0] += fss;
      c.sum_service[1] += sss;
      c.n_service[0] += static_cast<std::int64_t>(batch.size());
      c.n_service[1] += static_cast<std::int64_t>(batch.size());
      c.energy_relay += fss * pw.relay_base_w + sss * p_relay_tx;
      c.energy_ap += fss * pw.ap_listen_w + sss * pw.ap_base_w;
      c.energy_switch += 2.0 * pw.switch_energy_j;

      const auto qlen = static_cast<std::int64_t>(queue.size());
      if (qlen > total.max_queue) total.max_queue = qlen;
      if (qlen > cfg.queue_cap) {
        total.unstable = true;
        return total;
      }
      if (queue.empty()) break;
    }
    c.cycles = 1;
    c.sum_cycle = t - cycle_start;

    if (measuring) {
      merge(total, c);
      if (total.packets >= cfg.measured_packets) break;
    } else {
      warm_packets += c.packets;
      if (warm_packets >= cfg.warmup_packets) measuring = true;
    }
  }
  return total;
}

SimStats summarize_tallies(const SimConfig& config, std::vector<Tally> runs) {
  SimStats s;
  s.config = config;
  s.runs = std::move(runs);
  for (const Tally& t : s.runs) {
    s.measured_packets += t.packets;
    s.unstable = s.unstable || t.unstable;
  }
  const auto& r = s.runs;
  auto packets = [](const Tally& t) { return static_cast<double>(t.packets); };
  auto cycles = [](const Tally& t) { return static_cast<double>(t.cycles); };
  auto time = [](const Tally& t) { return t.sum_cycle; };
  s.mean_wq = ratio_estimate(r, [](const Tally& t) { return t.sum_wq; }, packets);
  s.pi0_hat = ratio_estimate(r, cycles, [](const Tally& t) { return static_cast<double>(t.subcycles); });
  s.mean_gamma_hat = ratio_estimate(r, packets, cycles);
  s.mean_cycle_hat = ratio_estimate(r, time, cycles);
  s.mean_idle_hat = ratio_estimate(r, [](const Tally& t) { return t.sum_idle; }, cycles);
  s.mean_subcycles_hat = ratio_estimate(r, [](const Tally& t) { return static_cast<double>(t.subcycles); }, cycles);
  for (std::size_t k = 0; k < 3; ++k) {
    s.case_fractions[k] = ratio_estimate(r, [k](const Tally& t) { return static_cast<double>(t.case_count[k]); }, packets);
    s.per_case_mean_wq[k] = ratio_estimate(
        r, [k](const Tally& t) { return t.case_sum_wq[k]; },
        [k](const Tally& t) { return static_cast<double>(t.case_count[k]); });
  }
  s.mean_power_hat = ratio_estimate(r, [](const Tally& t) { return t.energy_total(); }, time);
  s.user_power_hat = ratio_estimate(r, [](const Tally& t) { return t.energy_user; }, time);
  s.relay_power_hat = ratio_estimate(r, [](const Tally& t) { return t.energy_relay; }, time);
  s.ap_power_hat = ratio_estimate(r, [](const Tally& t) { return t.energy_ap; }, time);
  s.switch_power_hat = ratio_estimate(r, [](const Tally& t) { return t.energy_switch; }, time);
  for (std::size_t k = 0; k < 2; ++k)
    s.mean_service_hat[k] = ratio_estimate(
        r, [k](const Tally& t) { return t.sum_service[k]; },
        [k](const Tally& t) { return static_cast<double>(t.n_service[k]); });
  const double lam = config.system.arrival_rate;
  s.wald_ratio = ratio_estimate(r, packets, [lam](const Tally& t) { return lam * t.sum_cycle; });
  return s;
}

SimStats run_simulation(const SimConfig& config) {
  config.validate();
  const int reps = config.replications;
  std::vector<Tally> runs(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, static_cast<unsigned>(reps));
  auto work = [&](unsigned w) {
    for (int i = static_cast<int>(w); i < reps; i += static_cast<int>(workers)) {
      try {
        runs[static_cast<std::size_t>(i)] = simulate_replication(config, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return summarize_tallies(config, std::move(runs));
}

SimStats summarize(const std::vector<SimStats>& stats_list) {
  if (stats_list.empty()) throw ConfigError("summarize needs at least one result");
  const SimConfig& ref = stats_list.front().config;
  std::vector<Tally> runs;
  for (const SimStats& s : stats_list) {
    if (!s.config.same_experiment(ref)) throw ConfigMismatch("cannot pool simulations of different configurations");
    runs.insert(runs.end(), s.runs.begin(), s.runs.end());
  }
  return summarize_tallies(ref, std::move(runs));
}

}  // namespace relayq
