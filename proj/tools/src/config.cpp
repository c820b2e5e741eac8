#include "relayq_cli/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

namespace relayq::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct UnitTable {
  Dimension dim;
  std::vector<std::pair<std::string, double>> units;  // lower-case suffix -> SI factor
};

const std::vector<UnitTable>& unit_tables() {
  static const std::vector<UnitTable> tables = {
      {Dimension::rate,
       {{"/s", 1.0}, {"/ms", 1e3}, {"packets/s", 1.0}, {"packets/ms", 1e3}, {"pkt/s", 1.0}, {"pkt/ms", 1e3}}},
      {Dimension::time, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}}},
      {Dimension::power, {{"w", 1.0}, {"mw", 1e-3}}},
      {Dimension::energy, {{"j", 1.0}, {"mj", 1e-3}, {"uj", 1e-6}}},
      {Dimension::frequency, {{"hz", 1.0}, {"khz", 1e3}, {"mhz", 1e6}}},
      {Dimension::bits, {{"bits", 1.0}, {"bit", 1.0}, {"kbit", 1e3}, {"kbits", 1e3}}},
  };
  return tables;
}

double to_double(const std::string& num, const std::string& whole) {
  double v = 0.0;
  const char* b = num.data();
  const char* e = b + num.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) throw ConfigError("malformed number: '" + whole + "'");
  return v;
}

long long to_integer(const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc() && p == t.data() + t.size()) return v;
  // Accept integral values in floating notation such as 1e6.
  double d = 0.0;
  auto [pd, ecd] = std::from_chars(t.data(), t.data() + t.size(), d);
  if (ecd != std::errc() || pd != t.data() + t.size() || d != std::floor(d) || std::abs(d) > 9e15)
    throw ConfigError("malformed integer: '" + text + "'");
  return static_cast<long long>(d);
}

int to_int(const std::string& text) {
  const long long v = to_integer(text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) throw ConfigError("integer out of range: '" + text + "'");
  return static_cast<int>(v);
}

// Keeps p/sigma^2 fixed while the transmit power changes.
void set_tx_power(LinkParams& link, double p) {
  const double snr = link.tx_snr();
  link.tx_power_w = p;
  link.noise_power_w = p / snr;
}

void set_tx_snr(LinkParams& link, double snr) {
  if (!(snr > 0.0)) throw ConfigError("tx_snr must be positive");
  link.noise_power_w = link.tx_power_w / snr;
}

LstMode parse_mode(const std::string& v) {
  const std::string s = lower(trim(v));
  if (s == "exact") return LstMode::exact;
  if (s == "jensen") return LstMode::jensen;
  throw ConfigError("lst_mode must be 'exact' or 'jensen', got '" + v + "'");
}

LogBase parse_base(const std::string& v) {
  const std::string s = lower(trim(v));
  if (s == "2") return LogBase::two;
  if (s == "e") return LogBase::e;
  throw ConfigError("log_base must be '2' or 'e', got '" + v + "'");
}

SimServiceModel parse_service_model(const std::string& v) {
  const std::string s = lower(trim(v));
  if (s == "fading") return SimServiceModel::fading;
  if (s == "jensen_mean") return SimServiceModel::jensen_mean;
  throw ConfigError("sim.service_model must be 'fading' or 'jensen_mean', got '" + v + "'");
}

}  // namespace

RunConfig::RunConfig() {
  sim.system.arrival_rate = 200.0;
  sim.system.threshold = 5;
  sweep_lambdas = {200.0};
}

double parse_quantity(const std::string& text, Dimension dim) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty value");
  std::size_t split = 0;
  while (split < t.size() &&
         (std::isdigit(static_cast<unsigned char>(t[split])) || t[split] == '.' || t[split] == '-' ||
          t[split] == '+' ||
          ((t[split] == 'e' || t[split] == 'E') && split > 0 && split + 1 < t.size() &&
           (std::isdigit(static_cast<unsigned char>(t[split + 1])) || t[split + 1] == '-' || t[split + 1] == '+'))))
    ++split;
  const std::string num = t.substr(0, split);
  const std::string unit = lower(trim(t.substr(split)));
  const double v = to_double(num, text);
  if (unit.empty()) return v;
  if (dim == Dimension::ratio) {
    if (unit == "db") return std::pow(10.0, v / 10.0);
    throw ConfigError("unknown unit '" + unit + "' in '" + text + "'");
  }
  for (const UnitTable& tab : unit_tables()) {
    if (tab.dim != dim) continue;
    for (const auto& [suffix, factor] : tab.units)
      if (unit == suffix) return v * factor;
  }
  throw ConfigError("unknown unit '" + unit + "' in '" + text + "'");
}

std::pair<int, int> parse_range(const std::string& text) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos) {
    const int n = to_int(t);
    return {n, n};
  }
  const int a = to_int(t.substr(0, colon));
  const int b = to_int(t.substr(colon + 1));
  if (a < 1 || b < a) throw ConfigError("invalid threshold range '" + text + "'");
  return {a, b};
}

std::vector<double> parse_rate_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_quantity(item, Dimension::rate));
  }
  if (out.empty()) throw ConfigError("empty rate list");
  return out;
}

const std::map<std::string, Dimension>& known_keys() {
  static const std::map<std::string, Dimension> keys = {
      {"arrival_rate", Dimension::rate},
      {"threshold", Dimension::count},
      {"lst_mode", Dimension::none},
      {"log_base", Dimension::none},
      {"bandwidth", Dimension::frequency},
      {"packet_length", Dimension::bits},
      {"fading_variance", Dimension::ratio},
      {"tx_snr", Dimension::ratio},
      {"user_tx_power", Dimension::power},
      {"relay_tx_power", Dimension::power},
      {"link2.bandwidth", Dimension::frequency},
      {"link2.packet_length", Dimension::bits},
      {"link2.fading_variance", Dimension::ratio},
      {"link2.tx_snr", Dimension::ratio},
      {"user_base_power", Dimension::power},
      {"user_slope", Dimension::ratio},
      {"relay_base_power", Dimension::power},
      {"relay_slope", Dimension::ratio},
      {"relay_listen_power", Dimension::power},
      {"ap_base_power", Dimension::power},
      {"ap_listen_power", Dimension::power},
      {"listen_power", Dimension::power},
      {"switch_energy", Dimension::energy},
      {"max_delay", Dimension::time},
      {"recursion.max_depth", Dimension::count},
      {"recursion.convergence_tol", Dimension::ratio},
      {"recursion.pi0_tol", Dimension::ratio},
      {"recursion.pi0_max_iters", Dimension::count},
      {"quadrature.delta", Dimension::ratio},
      {"quadrature.node_count", Dimension::count},
      {"quadrature.upper_truncation_mass", Dimension::ratio},
      {"sim.warmup_packets", Dimension::count},
      {"sim.measured_packets", Dimension::count},
      {"sim.replications", Dimension::count},
      {"sim.base_seed", Dimension::count},
      {"sim.service_model", Dimension::none},
      {"sim.queue_cap", Dimension::count},
      {"threads", Dimension::count},
      {"optimizer.n_ceiling", Dimension::count},
      {"sweep.lambda", Dimension::rate},
      {"sweep.n", Dimension::count},
  };
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  const auto& keys = known_keys();
  const auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError("unknown configuration key '" + key + "'");
  auto q = [&]() { return parse_quantity(value, it->second); };
  SystemParams& sp = cfg.system();
  PowerParams& pw = cfg.power();

  if (key == "arrival_rate") sp.arrival_rate = q();
  else if (key == "threshold") sp.threshold = to_int(value);
  else if (key == "lst_mode") sp.lst_mode = parse_mode(value);
  else if (key == "log_base") sp.link1.log_base = sp.link2.log_base = parse_base(value);
  else if (key == "bandwidth") sp.link1.bandwidth_hz = sp.link2.bandwidth_hz = q();
  else if (key == "packet_length") sp.link1.packet_length_bits = sp.link2.packet_length_bits = q();
  else if (key == "fading_variance") sp.link1.fading_variance = sp.link2.fading_variance = q();
  else if (key == "tx_snr") {
    const double s = q();
    set_tx_snr(sp.link1, s);
    set_tx_snr(sp.link2, s);
  } else if (key == "user_tx_power") {
    const double p = q();
    set_tx_power(sp.link1, p);
    pw.user_tx_power_w = p;
  } else if (key == "relay_tx_power") {
    const double p = q();
    set_tx_power(sp.link2, p);
    pw.relay_tx_power_w = p;
  } else if (key == "link2.bandwidth") sp.link2.bandwidth_hz = q();
  else if (key == "link2.packet_length") sp.link2.packet_length_bits = q();
  else if (key == "link2.fading_variance") sp.link2.fading_variance = q();
  else if (key == "link2.tx_snr") set_tx_snr(sp.link2, q());
  else if (key == "user_base_power") pw.user_base_w = q();
  else if (key == "user_slope") pw.user_slope = q();
  else if (key == "relay_base_power") pw.relay_base_w = q();
  else if (key == "relay_slope") pw.relay_slope = q();
  else if (key == "relay_listen_power") pw.relay_listen_w = q();
  else if (key == "ap_base_power") pw.ap_base_w = q();
  else if (key == "ap_listen_power") pw.ap_listen_w = q();
  else if (key == "listen_power") pw.relay_listen_w = pw.ap_listen_w = q();
  else if (key == "switch_energy") pw.switch_energy_j = q();
  else if (key == "max_delay") pw.max_delay_s = q();
  else if (key == "recursion.max_depth") sp.recursion.max_depth = to_int(value);
  else if (key == "recursion.convergence_tol") sp.recursion.convergence_tol = q();
  else if (key == "recursion.pi0_tol") sp.recursion.pi0_tol = q();
  else if (key == "recursion.pi0_max_iters") sp.recursion.pi0_max_iters = to_int(value);
  else if (key == "quadrature.delta") sp.quadrature.lower_cutoff_delta = q();
  else if (key == "quadrature.node_count") sp.quadrature.node_count = to_int(value);
  else if (key == "quadrature.upper_truncation_mass") sp.quadrature.upper_truncation_mass = q();
  else if (key == "sim.warmup_packets") cfg.sim.warmup_packets = to_integer(value);
  else if (key == "sim.measured_packets") cfg.sim.measured_packets = to_integer(value);
  else if (key == "sim.replications") cfg.sim.replications = to_int(value);
  else if (key == "sim.base_seed") {
    const long long s = to_integer(value);
    if (s < 0) throw ConfigError("sim.base_seed must be nonnegative");
    cfg.sim.base_seed = static_cast<std::uint64_t>(s);
  } else if (key == "sim.service_model") cfg.sim.service_model = parse_service_model(value);
  else if (key == "sim.queue_cap") cfg.sim.queue_cap = to_integer(value);
  else if (key == "threads") {
    const int t = to_int(value);
    if (t < 0) throw ConfigError("threads must be nonnegative");
    cfg.sim.threads = cfg.optimizer.threads = static_cast<unsigned>(t);
  } else if (key == "optimizer.n_ceiling") cfg.optimizer.n_ceiling = to_int(value);
  else if (key == "sweep.lambda") cfg.sweep_lambdas = parse_rate_list(value);
  else if (key == "sweep.n") std::tie(cfg.sweep_n_lo, cfg.sweep_n_hi) = parse_range(value);
}

void apply_assignment(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void load_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  load_config_text(cfg, ss.str(), path);
}

}  // namespace relayq::cli
