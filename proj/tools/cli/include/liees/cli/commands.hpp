#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liees/analysis.hpp"
#include "liees/cli/config.hpp"

namespace liees::cli {

enum ExitCode : int { exit_ok = 0, exit_failed = 1, exit_invalid = 2, exit_numeric = 3 };

/// Maps a library exception to the process exit code.
int exit_code_for(const Error& e);

struct RunResult {
  ExperimentConfig config;
  Trajectory trajectory;
  std::optional<RateEstimate> rate;
  std::optional<double> time_to_band;
  std::optional<double> lbs_closeness;
};

RunResult run_experiment(const ExperimentConfig& config);
std::string summary_json(const RunResult& r);

void write_trajectory_csv(const Trajectory& t, std::ostream& os);
Trajectory read_trajectory_csv(std::istream& is, double epsilon);

struct RunOptions {
  std::string config;
  std::optional<std::string> out;  // summary path override
  std::optional<int> decimate;
  std::optional<int> steps_per_period;
};
int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err);

struct CompareOptions {
  std::string config_a;
  std::string config_b;
  std::string out_csv;
  std::optional<std::string> summary;
  std::optional<int> decimate;
  std::optional<int> steps_per_period;
};
int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err);

struct CoeffsOptions {
  std::optional<std::string> config;
  std::string kind = "first12";
  int kappa = 1;
  double epsilon = 1.0;
  int depth = 4;
  std::optional<std::string> target;
  double tol = 1e-3;
  std::optional<std::string> out;
};
int cmd_coeffs(const CoeffsOptions& o, std::ostream& out, std::ostream& err);

struct RateOptions {
  std::string in;
  double xstar = 0.0;
  double epsilon = 0.0;
  std::optional<std::string> out;
};
int cmd_rate(const RateOptions& o, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// suite: all | brackets | excitation | lemma3 | assumptions | signature | integrator
std::vector<CheckResult> run_verify(const std::string& suite);
int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err);

}  // namespace liees::cli
