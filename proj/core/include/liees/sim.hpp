#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liees/chenfliess.hpp"
#include "liees/dither.hpp"
#include "liees/system.hpp"

namespace liees {

/// Construction rejected; carries the resonance report when that was the cause.
class ConstructionError : public Error {
 public:
  explicit ConstructionError(const std::string& what,
                             std::optional<ResonanceReport> report = std::nullopt)
      : Error(ErrorKind::construction, what), report_(std::move(report)) {}
  const std::optional<ResonanceReport>& resonance() const noexcept { return report_; }

 private:
  std::optional<ResonanceReport> report_;
};

/// Generating pair of length N with the matching two-channel dither kind.
ESSystem build_two_input(const CostFunction& cost, int N, int kappa, double epsilon,
                         double gain);

/// 2 sqrt(pi/eps) (J cos + sin)(2 pi t / eps).
ESSystem build_classic_durr(const CostFunction& cost, double epsilon);

/// 2 (2 pi / eps)^(3/4) (3 J sin(6 pi t/eps) + cos(2 pi t/eps)).
ESSystem build_fourth_order_we(const CostFunction& cost, double epsilon, int kappa = 1);

/// Triple family from phi2 with a triple123 dither set. zdomain bounds the
/// cost values on which the Wronskian seed is checked.
ESSystem build_three_input(const CostFunction& cost, const Shape& phi2, double epsilon,
                           int kappa, const Shape& seed = Shape::constant(1.0),
                           Interval zdomain = {0.0, 1.0});

/// Gradient pair on first12 at kappa12 plus a fourth-order pair on
/// third1222 at kappa1222: averaged flow -gamma1 J' - gamma3 J'''.
ESSystem build_mixed(const CostFunction& cost, int kappa12, int kappa1222, double gamma1,
                     double gamma3, double epsilon);

struct IntegratorConfig {
  int steps_per_period = 4096;
  double total_time = 1.0;
  /// Keep every k-th step. Period boundaries and the final 10 periods are
  /// always kept.
  int decimation = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  std::vector<double> cost_values;
  double epsilon = 0.0;  // stroboscopic period
  std::string meta;

  std::size_t size() const { return times.size(); }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }
  double final_state() const { return states.empty() ? 0.0 : states.back(); }
  /// Linear interpolation of the state at t.
  double state_at(double t) const;
};

/// Fixed-step RK4 on the full oscillatory system.
Trajectory integrate(const ESSystem& system, double x0, const IntegratorConfig& config);

/// State after one period from x0.
double integrate_period(const ESSystem& system, double x0, int steps_per_period = 4096);

/// RK4 on xdot = -sum gain_j J^(order_j)(x). The trajectory's epsilon is the step.
Trajectory integrate_lbs(const CostFunction& cost, const std::vector<LbsTerm>& terms, double x0,
                         double total_time, int steps);

/// RK4 on xdot = system.averaged_rhs(x).
Trajectory integrate_averaged(const ESSystem& system, double x0, double total_time, int steps);

}  // namespace liees
