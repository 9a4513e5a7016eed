#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liees/sim.hpp"

namespace liees {

/// |x(k eps) - x*| at every whole period.
struct Envelope {
  std::vector<double> times;
  std::vector<double> distances;

  std::size_t size() const { return times.size(); }
};

Envelope envelope(const Trajectory& traj, double xstar, std::size_t min_periods = 20);

enum class RateClass { exponential, polynomial, stalled, ambiguous };
const char* to_string(RateClass c) noexcept;

struct RateEstimate {
  RateClass rate_class = RateClass::ambiguous;
  double lambda = 0.0;  // d ~ exp(-lambda t)
  bool lambda_valid = false;
  double power_exponent = 0.0;  // d ~ (1 + s t)^power_exponent
  bool power_valid = false;
  double poly_scale = 0.0;  // s
  double r_squared = 0.0;   // of the selected model (best of the two if ambiguous)
  double r_squared_exp = 0.0;
  double r_squared_poly = 0.0;
  double rho = 0.0;  // residual floor
  double decrease = 0.0;  // (d0 - tail median) / d0
  std::size_t samples_used = 0;
};

/// Fits exponential and polynomial decay to the envelope above its floor.
RateEstimate fit_rate(const Envelope& env);

/// max_k |a(k eps) - b(k eps)| with eps the larger stroboscopic period.
double closeness(const Trajectory& a, const Trajectory& b);

/// First stroboscopic time after which the distance stays within band.
std::optional<double> time_to_band(const Envelope& env, double band);

struct ContractionPoint {
  double x0 = 0.0;
  double lhs = 0.0;  // |x(eps) - x*|^2
  double rhs = 0.0;  // |x0 - x*|^2 (1 - 2 eps gamma) + eps^(1+1/m) sigma
  bool holds = false;
};

struct ContractionReport {
  std::vector<ContractionPoint> points;
  double gamma = 0.0;
  double sigma = 0.0;
  int m = 2;
  bool contracting = false;
};

/// One-period contraction test over a grid of initial states.
ContractionReport contraction_check(const ESSystem& system, const std::vector<double>& x0_grid,
                                    double xstar, int steps_per_period = 4096);

}  // namespace liees
