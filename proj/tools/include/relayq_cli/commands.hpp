#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include <relayq/analysis.hpp>
#include <relayq/optimizer.hpp>
#include <relayq/simulator.hpp>

#include "relayq_cli/config.hpp"

namespace relayq::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kStability = 4,
  kConvergence = 5,
};

struct ValidationCheck {
  std::string metric;
  double lambda_per_s = 0.0;
  int threshold = 0;
  double analytic = 0.0;
  double simulated = 0.0;
  double error = 0.0;  // relative unless `absolute`
  double tolerance = 0.0;
  bool absolute = false;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
};

// Paired analytic/simulation comparison at each (lambda, N) point.
ValidationReport run_validation(const RunConfig& cfg, const std::vector<double>& lambdas,
                                const std::vector<int>& thresholds);

nlohmann::ordered_json to_json(const AnalysisResult& a);
nlohmann::ordered_json to_json(const SimStats& s);
nlohmann::ordered_json to_json(const OptimizationResult& r);
nlohmann::ordered_json to_json(const ValidationReport& r);

struct SweepPoint {
  double lambda_per_s = 0.0;
  int threshold = 0;
  bool stable = false;
  AnalysisResult analysis;
};

std::vector<SweepPoint> run_sweep(const RunConfig& cfg, const std::vector<double>& lambdas, int n_lo, int n_hi);
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points, bool timestamp);
void write_sweep_table_csv(std::ostream& os, const OptimizationResult& r, double lambda_per_s, bool timestamp);

// Entry point shared by the executable and the tests.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relayq::cli
