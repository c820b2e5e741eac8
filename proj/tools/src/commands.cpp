#include "relayq_cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace relayq::cli {

using nlohmann::ordered_json;

namespace {

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json estimate_json(const Estimate& e) {
  return {{"mean", number(e.mean)}, {"ci95_half_width", number(e.ci_half_width)}, {"std_error", number(e.std_error)}};
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(a); }

}  // namespace

bool ValidationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

ValidationReport run_validation(const RunConfig& cfg, const std::vector<double>& lambdas,
                                const std::vector<int>& thresholds) {
  ValidationReport rep;
  for (double lam : lambdas) {
    for (int n : thresholds) {
      SimConfig sc = cfg.sim;
      sc.system.arrival_rate = lam;
      sc.system.threshold = n;
      const AnalysisResult a = analyze(sc.system, sc.power);
      const SimStats s = run_simulation(sc);
      auto add = [&](const std::string& metric, double an, double sim, double err, double tol, bool absolute) {
        rep.checks.push_back({metric, lam, n, an, sim, err, tol, absolute, err <= tol});
      };
      if (a.pi0.pi0 < 0.1)
        add("pi0", a.pi0.pi0, s.pi0_hat.mean, std::abs(a.pi0.pi0 - s.pi0_hat.mean), 0.02, true);
      else
        add("pi0", a.pi0.pi0, s.pi0_hat.mean, rel_err(a.pi0.pi0, s.pi0_hat.mean), 0.03, false);
      add("e_wq_s", a.mean_wq, s.mean_wq.mean, rel_err(a.mean_wq, s.mean_wq.mean), 0.03, false);
      add("e_ptot_w", a.power.total_w, s.mean_power_hat.mean, rel_err(a.power.total_w, s.mean_power_hat.mean), 0.03,
          false);
      add("wald_ratio", 1.0, s.wald_ratio.mean, std::abs(s.wald_ratio.mean - 1.0), 0.01, true);
      const double psum = a.case_probs.p_idle + a.case_probs.p_fss + a.case_probs.p_sss;
      add("case_probability_sum", 1.0, psum, std::abs(psum - 1.0), 1e-12, true);
      // Stage fractions against the time shares implied by empirical service means.
      const double f1 = lam * s.mean_service_hat[0].mean;
      const double f2 = lam * s.mean_service_hat[1].mean;
      const double expect[3] = {1.0 - f1 - f2, f1, f2};
      const char* names[3] = {"case_fraction_idle", "case_fraction_fss", "case_fraction_sss"};
      for (int k = 0; k < 3; ++k)
        add(names[k], expect[k], s.case_fractions[k].mean, std::abs(s.case_fractions[k].mean - expect[k]), 0.01,
            true);
    }
  }
  return rep;
}

ordered_json to_json(const AnalysisResult& a) {
  ordered_json j;
  j["lambda_per_s"] = a.params.arrival_rate;
  j["N"] = a.params.threshold;
  j["lst_mode"] = to_string(a.params.lst_mode);
  j["stable"] = a.stability.stable;
  j["stability_margin"] = a.stability.margin;
  j["pi0"] = a.pi0.pi0;
  j["pi0_residual"] = a.pi0.residual;
  j["pi0_iterations"] = a.pi0.iterations_used;
  j["pi0_bracket"] = {a.pi0.bracket_lo, a.pi0.bracket_hi};
  j["recursion_depth"] = a.pi0.depth_used;
  j["e_t1_s"] = a.cycle.mean_T1;
  j["e_t2_s"] = a.cycle.mean_T2;
  j["e_gamma_packets"] = a.cycle.mean_gamma;
  j["e_t0_s"] = a.cycle.mean_T0;
  j["e_trc_s"] = a.cycle.mean_cycle;
  j["e_k_subcycles"] = a.cycle.mean_subcycles;
  j["case_probabilities"] = {{"idle", a.case_probs.p_idle}, {"fss", a.case_probs.p_fss}, {"sss", a.case_probs.p_sss}};
  j["case_mean_wq_s"] = {a.case_mean_wq[0], a.case_mean_wq[1], a.case_mean_wq[2]};
  j["e_wq_s"] = a.mean_wq;
  j["e_ptot_w"] = a.power.total_w;
  j["power_w"] = {{"user_w", a.power.user_w},
                  {"relay_w", a.power.relay_w},
                  {"ap_w", a.power.ap_w},
                  {"switching_w", a.power.switching_w},
                  {"total_w", a.power.total_w}};
  return j;
}

ordered_json to_json(const SimStats& s) {
  ordered_json j;
  j["lambda_per_s"] = s.config.system.arrival_rate;
  j["N"] = s.config.system.threshold;
  j["service_model"] = s.config.service_model == SimServiceModel::fading ? "fading" : "jensen_mean";
  j["replications"] = s.runs.size();
  j["measured_packets"] = s.measured_packets;
  j["base_seed"] = s.config.base_seed;
  j["unstable"] = s.unstable;
  j["e_wq_s"] = estimate_json(s.mean_wq);
  j["pi0"] = estimate_json(s.pi0_hat);
  j["e_gamma_packets"] = estimate_json(s.mean_gamma_hat);
  j["e_trc_s"] = estimate_json(s.mean_cycle_hat);
  j["e_t0_s"] = estimate_json(s.mean_idle_hat);
  j["e_k_subcycles"] = estimate_json(s.mean_subcycles_hat);
  j["case_fractions"] = {estimate_json(s.case_fractions[0]), estimate_json(s.case_fractions[1]),
                         estimate_json(s.case_fractions[2])};
  j["case_mean_wq_s"] = {estimate_json(s.per_case_mean_wq[0]), estimate_json(s.per_case_mean_wq[1]),
                         estimate_json(s.per_case_mean_wq[2])};
  j["e_ptot_w"] = estimate_json(s.mean_power_hat);
  j["power_w"] = {{"user_w", estimate_json(s.user_power_hat)},
                  {"relay_w", estimate_json(s.relay_power_hat)},
                  {"ap_w", estimate_json(s.ap_power_hat)},
                  {"switching_w", estimate_json(s.switch_power_hat)}};
  j["e_t_s"] = {estimate_json(s.mean_service_hat[0]), estimate_json(s.mean_service_hat[1])};
  j["wald_ratio"] = estimate_json(s.wald_ratio);
  return j;
}

ordered_json to_json(const OptimizationResult& r) {
  ordered_json j;
  j["n_max"] = r.n_max;
  j["n_max_cap_limited"] = r.cap_limited;
  j["n_prime"] = r.n_prime;
  j["n_star"] = r.n_star;
  j["power_at_star_w"] = r.power_at_star;
  j["wq_at_star_s"] = r.wq_at_star;
  ordered_json warnings = ordered_json::array();
  for (const auto& w : r.warnings) warnings.push_back(w.message());
  j["warnings"] = warnings;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.sweep_table)
    rows.push_back({{"N", row.threshold}, {"e_wq_s", row.mean_wq}, {"e_ptot_w", row.total_power}, {"pi0", row.pi0}});
  j["sweep_table"] = rows;
  return j;
}

ordered_json to_json(const ValidationReport& r) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"metric", c.metric},
                      {"lambda_per_s", c.lambda_per_s},
                      {"N", c.threshold},
                      {"analytic", c.analytic},
                      {"simulated", c.simulated},
                      {c.absolute ? "abs_error" : "rel_error", c.error},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  return {{"all_pass", r.all_pass()}, {"checks", checks}};
}

std::vector<SweepPoint> run_sweep(const RunConfig& cfg, const std::vector<double>& lambdas, int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw ConfigError("invalid threshold range");
  std::vector<SweepPoint> points;
  for (double lam : lambdas) {
    SystemParams sp = cfg.system();
    sp.arrival_rate = lam;
    const Stability st = stability_check(sp);
    if (!st.stable) {
      for (int n = n_lo; n <= n_hi; ++n) {
        SweepPoint p;
        p.lambda_per_s = lam;
        p.threshold = n;
        p.stable = false;
        p.analysis.params = sp;
        p.analysis.stability = st;
        points.push_back(p);
      }
      continue;
    }
    const TransformEngine engine(sp);
    for (int n = n_lo; n <= n_hi; ++n) {
      SweepPoint p;
      p.lambda_per_s = lam;
      p.threshold = n;
      p.stable = true;
      p.analysis = analyze(engine.with_threshold(n), cfg.power());
      points.push_back(p);
    }
  }
  return points;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points, bool timestamp) {
  if (timestamp) os << "# generated " << iso_timestamp() << '\n';
  os << "lambda_per_s,N,pi0,e_wq_s,e_ptot_w,user_w,relay_ap_w,switch_w,stable\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : points) {
    const auto& a = p.analysis;
    auto v = [&](double x) { return fmt(p.stable ? x : nan); };
    os << fmt(p.lambda_per_s) << ',' << p.threshold << ',' << v(a.pi0.pi0) << ',' << v(a.mean_wq) << ','
       << v(a.power.total_w) << ',' << v(a.power.user_w) << ',' << v(a.power.relay_w + a.power.ap_w) << ','
       << v(a.power.switching_w) << ',' << (p.stable ? 1 : 0) << '\n';
  }
}

void write_sweep_table_csv(std::ostream& os, const OptimizationResult& r, double lambda_per_s, bool timestamp) {
  if (timestamp) os << "# generated " << iso_timestamp() << '\n';
  os << "lambda_per_s,N,pi0,e_wq_s,e_ptot_w,user_w,relay_ap_w,switch_w,stable\n";
  for (const auto& row : r.sweep_table)
    os << fmt(lambda_per_s) << ',' << row.threshold << ',' << fmt(row.pi0) << ',' << fmt(row.mean_wq) << ','
       << fmt(row.total_power) << ',' << fmt(row.power.user_w) << ',' << fmt(row.power.relay_w + row.power.ap_w)
       << ',' << fmt(row.power.switching_w) << ",1\n";
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage N-threshold gated relay queue: analysis, optimization and simulation"};
  app.require_subcommand(1);
  // Global options may follow the subcommand.
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  bool exact = false;
  bool no_timestamp = false;
  app.add_option("-c,--config", config_path, "key = value configuration file")->envname("RELAYQ_CONFIG");
  app.add_option("--set", sets, "override a configuration key (key=value), repeatable");
  app.add_flag("--exact", exact, "use quadrature (exact) service-time transforms");
  app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp header line from CSV output");

  std::string lambda_text;
  std::string n_text;
  std::string csv_path;
  bool grid = false;
  bool json_out = false;

  auto* analyze_cmd = app.add_subcommand("analyze", "analytic pi0, waiting time and power as JSON");
  auto* simulate_cmd = app.add_subcommand("simulate", "discrete-event simulation statistics as JSON");
  auto* optimize_cmd = app.add_subcommand("optimize", "minimize power subject to the delay bound");
  auto* sweep_cmd = app.add_subcommand("sweep", "CSV over a grid of arrival rates and thresholds");
  auto* validate_cmd = app.add_subcommand("validate", "paired analytic vs simulation comparison");
  for (auto* sub : {analyze_cmd, simulate_cmd, optimize_cmd, sweep_cmd, validate_cmd}) {
    sub->add_option("--lambda", lambda_text, "arrival rate(s), e.g. 0.2/ms or 0.1/ms,0.2/ms");
  }
  for (auto* sub : {analyze_cmd, simulate_cmd, sweep_cmd, validate_cmd})
    sub->add_option("--n", n_text, "threshold N or range a:b");
  for (auto* sub : {optimize_cmd, sweep_cmd}) sub->add_option("--csv", csv_path, "CSV output path (sweep: default stdout)");
  validate_cmd->add_flag("--grid", grid, "run the full lambda x N acceptance grid");
  validate_cmd->add_flag("--json", json_out, "print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    for (const auto& s : sets) apply_assignment(cfg, s);
    if (exact) cfg.system().lst_mode = LstMode::exact;

    std::vector<double> lambdas = cfg.sweep_lambdas;
    if (!lambda_text.empty()) {
      lambdas = parse_rate_list(lambda_text);
      cfg.system().arrival_rate = lambdas.front();
    } else if (!sweep_cmd->parsed()) {
      lambdas = {cfg.system().arrival_rate};
    }
    int n_lo = cfg.sweep_n_lo;
    int n_hi = cfg.sweep_n_hi;
    if (!n_text.empty()) {
      std::tie(n_lo, n_hi) = parse_range(n_text);
      if (!sweep_cmd->parsed()) cfg.system().threshold = n_lo;
    }

    if (analyze_cmd->parsed()) {
      out << to_json(analyze(cfg.system(), cfg.power())).dump(2) << '\n';
    } else if (simulate_cmd->parsed()) {
      out << to_json(run_simulation(cfg.sim)).dump(2) << '\n';
    } else if (optimize_cmd->parsed()) {
      const OptimizationResult r = optimize_threshold(cfg.system(), cfg.power(), cfg.optimizer);
      const Baseline aos = baseline_aos(cfg.system(), cfg.power());
      ordered_json j;
      j["lambda_per_s"] = cfg.system().arrival_rate;
      j["max_delay_s"] = cfg.power().max_delay_s;
      j.update(to_json(r));
      j["aos"] = {{"e_wq_s", aos.wq}, {"e_ptot_w", aos.ptot}};
      out << j.dump(2) << '\n';
      if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw ConfigError("cannot write '" + csv_path + "'");
        write_sweep_table_csv(f, r, cfg.system().arrival_rate, !no_timestamp);
      }
    } else if (sweep_cmd->parsed()) {
      const auto points = run_sweep(cfg, lambdas, n_lo, n_hi);
      if (csv_path.empty()) {
        write_sweep_csv(out, points, !no_timestamp);
      } else {
        std::ofstream f(csv_path);
        if (!f) throw ConfigError("cannot write '" + csv_path + "'");
        write_sweep_csv(f, points, !no_timestamp);
      }
    } else if (validate_cmd->parsed()) {
      std::vector<double> lams = lambdas;
      std::vector<int> ns;
      if (grid) {
        lams = {100.0, 200.0, 300.0};
        ns = {1, 3, 5, 8};
      } else {
        const int a = n_text.empty() ? cfg.system().threshold : n_lo;
        const int b = n_text.empty() ? cfg.system().threshold : n_hi;
        for (int n = a; n <= b; ++n) ns.push_back(n);
      }
      const ValidationReport rep = run_validation(cfg, lams, ns);
      if (json_out) {
        out << to_json(rep).dump(2) << '\n';
      } else {
        for (const auto& c : rep.checks) {
          out << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(22) << c.metric << " lambda=" << fmt(c.lambda_per_s)
              << "/s N=" << c.threshold << " analytic=" << fmt(c.analytic) << " simulated=" << fmt(c.simulated)
              << (c.absolute ? " abs_err=" : " rel_err=") << fmt(c.error) << " tol=" << fmt(c.tolerance) << '\n';
        }
        out << (rep.all_pass() ? "validation passed" : "validation FAILED") << '\n';
      }
      return rep.all_pass() ? kOk : kValidationFailed;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const StabilityViolation& e) {
    err << "stability violation: " << e.what() << '\n';
    return kStability;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  }
}

}  // namespace relayq::cli
