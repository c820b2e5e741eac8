#include "relayq/optimizer.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

namespace relayq {

namespace {

double waiting_time_at(const TransformEngine& engine, int n) {
  const TransformEngine e = engine.with_threshold(n);
  const Pi0Solution pi0 = e.solve_pi0();
  return DelayModel(e, pi0).mean_waiting_time();
}

SweepRow row_at(const TransformEngine& engine, const PowerParams& power, int n) {
  const AnalysisResult a = analyze(engine.with_threshold(n), power);
  return {n, a.mean_wq, a.power.total_w, a.pi0.pi0, a.power};
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, jobs));
}

}  // namespace

std::string NonMonotoneWarning::message() const {
  std::ostringstream os;
  os << "E{W_q} not increasing: N=" << n_lo << " gives " << wq_lo << " s, N=" << n_hi << " gives " << wq_hi
     << " s";
  return os.str();
}

NMaxResult find_n_max(const TransformEngine& engine, const PowerParams& power, const OptimizerSettings& settings) {
  const double d0 = power.max_delay_s;
  const int ceiling = std::max(1, settings.n_ceiling);
  std::map<int, double> cache;
  NMaxResult res;
  auto wq = [&](int n) {
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    ++res.evaluations;
    const double v = waiting_time_at(engine, n);
    cache.emplace(n, v);
    return v;
  };

  if (wq(1) > d0) {
    std::ostringstream os;
    os << "delay bound " << d0 << " s unattainable: E{W_q}(1) = " << wq(1) << " s";
    throw Infeasible(os.str());
  }

  auto linear_scan = [&]() {
    res.linear_scan = true;
    int n = 1;
    while (n < ceiling && wq(n + 1) <= d0) {
      if (wq(n + 1) < wq(n)) res.warnings.push_back({n, n + 1, wq(n), wq(n + 1)});
      ++n;
    }
    res.n_max = n;
    res.cap_limited = n == ceiling;
    return res;
  };

  // Exponential bracketing: lo feasible, hi infeasible.
  int lo = 1;
  int hi = 0;
  for (int n = 2;; n *= 2) {
    const int probe = std::min(n, ceiling);
    if (wq(probe) < wq(lo)) {
      res.warnings.push_back({lo, probe, wq(lo), wq(probe)});
      return linear_scan();
    }
    if (wq(probe) > d0) {
      hi = probe;
      break;
    }
    lo = probe;
    if (probe == ceiling) {
      res.n_max = ceiling;
      res.cap_limited = true;
      return res;
    }
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double w = wq(mid);
    if (w < wq(lo) || w > wq(hi)) {
      res.warnings.push_back(w < wq(lo) ? NonMonotoneWarning{lo, mid, wq(lo), w}
                                        : NonMonotoneWarning{mid, hi, w, wq(hi)});
      return linear_scan();
    }
    (w <= d0 ? lo : hi) = mid;
  }
  res.n_max = lo;
  return res;
}

NMaxResult find_n_max(const SystemParams& params, const PowerParams& power, const OptimizerSettings& settings) {
  return find_n_max(TransformEngine(params), power, settings);
}

std::vector<SweepRow> sweep_thresholds(const TransformEngine& engine, const PowerParams& power, int n_lo, int n_hi,
                                       unsigned threads) {
  if (n_lo < 1 || n_hi < n_lo) throw ConfigError("invalid threshold range");
  const std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
  std::vector<SweepRow> rows(count);
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers = worker_count(threads, count);
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < count; i += workers) {
      try {
        rows[i] = row_at(engine, power, n_lo + static_cast<int>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::size_t argmin_power(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw ConfigError("empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].total_power < rows[best].total_power) best = i;
  return best;
}

OptimizationResult optimize_threshold(const TransformEngine& engine, const PowerParams& power,
                                      const OptimizerSettings& settings) {
  const Stability st = engine.stability();
  if (!st.stable) throw StabilityViolation("unstable instance", st.margin);
  const NMaxResult nm = find_n_max(engine, power, settings);
  OptimizationResult r;
  r.n_max = nm.n_max;
  r.cap_limited = nm.cap_limited;
  r.warnings = nm.warnings;
  r.sweep_table = sweep_thresholds(engine, power, 1, nm.n_max, settings.threads);
  const std::size_t best = argmin_power(r.sweep_table);
  r.n_prime = r.sweep_table[best].threshold;
  r.n_star = std::min(r.n_max, r.n_prime);
  const SweepRow& star = r.sweep_table[static_cast<std::size_t>(r.n_star - 1)];
  r.power_at_star = star.total_power;
  r.wq_at_star = star.mean_wq;
  return r;
}

OptimizationResult optimize_threshold(const SystemParams& params, const PowerParams& power,
                                      const OptimizerSettings& settings) {
  return optimize_threshold(TransformEngine(params), power, settings);
}

Baseline baseline_aos(const TransformEngine& engine, const PowerParams& power) {
  const AnalysisResult a = analyze(engine.with_threshold(1), power);
  return {a.mean_wq, a.power.total_w};
}

Baseline baseline_aos(const SystemParams& params, const PowerParams& power) {
  return baseline_aos(TransformEngine(params), power);
}

}  // namespace relayq
