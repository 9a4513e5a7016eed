#pragma once

#include <optional>
#include <string>

#include "liees/sim.hpp"

namespace liees::cli {

struct CostConfig {
  std::string name = "power";
  double alpha = 1.0;
  double xstar = 0.0;
  int m = 2;
};

struct ShapeConfig {
  std::string shape = "constant";
  double gain = 1.0;
};

struct SystemConfig {
  std::string builder;
  int N = 2;
  int kappa = 1;
  double gain = 1.0;
  ShapeConfig phi2;
  ShapeConfig seed;
  Interval zdomain{0.0, 1.0};
  int kappa12 = 5;
  int kappa1222 = 1;
  double gamma1 = 1.0;
  double gamma3 = 1.0;
};

struct IntegratorSection {
  double epsilon = 1e-4;
  int steps_per_period = 4096;
  double total_time = 1.0;
  double x0 = 0.0;
};

struct AnalysisSection {
  bool fit = true;
  bool lbs_compare = false;
  double band = 0.05;
};

struct OutputSection {
  std::string trajectory_csv;  // empty: not written
  std::string summary_json;
  int decimation = 1;
};

struct ExperimentConfig {
  CostConfig cost;
  SystemConfig system;
  IntegratorSection integrator;
  AnalysisSection analysis;
  OutputSection output;
};

/// Every field is checked; failures throw ValidationError naming the field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

CostFunction make_cost(const CostConfig& c);
ESSystem make_system(const ExperimentConfig& c);

}  // namespace liees::cli
