#pragma once

#include <map>
#include <string>
#include <vector>

#include <relayq/optimizer.hpp>
#include <relayq/simulator.hpp>

namespace relayq::cli {

// Flat run configuration. Every value is stored in SI units.
struct RunConfig {
  SimConfig sim;
  OptimizerSettings optimizer;
  std::vector<double> sweep_lambdas;  // packets/s
  int sweep_n_lo = 1;
  int sweep_n_hi = 15;

  RunConfig();

  SystemParams& system() { return sim.system; }
  const SystemParams& system() const { return sim.system; }
  PowerParams& power() { return sim.power; }
  const PowerParams& power() const { return sim.power; }
};

// Value with an optional unit suffix, e.g. "0.2/ms", "40 dB", "8 mJ".
enum class Dimension { none, count, rate, time, power, energy, frequency, bits, ratio };
double parse_quantity(const std::string& text, Dimension dim);

// "a:b" or "a" into an inclusive integer range.
std::pair<int, int> parse_range(const std::string& text);
std::vector<double> parse_rate_list(const std::string& text);

// Applies one key = value assignment. Throws ConfigError on unknown keys
// or malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
// "key=value" form used by --set.
void apply_assignment(RunConfig& cfg, const std::string& assignment);

void load_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "<text>");
void load_config_file(RunConfig& cfg, const std::string& path);

// Recognized keys with their dimension, for help output and validation.
const std::map<std::string, Dimension>& known_keys();

}  // namespace relayq::cli
