#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liees/error.hpp"

namespace liees {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_strictly(double x) const { return lo < x && x < hi; }
  double width() const { return hi - lo; }
};

using RealFn = std::function<double(double)>;

/// Objective J with optional analytic derivatives of orders 1..4.
struct CostFunction {
  std::string name;
  RealFn eval;
  std::array<RealFn, 4> analytic{};  // analytic[k-1] is J^(k)
  std::optional<double> xstar;
  std::optional<double> jstar;
  std::optional<int> degree;

  double operator()(double x) const { return eval(x); }
  bool has_analytic(int order) const {
    return order >= 1 && order <= 4 && static_cast<bool>(analytic[order - 1]);
  }
};

/// alpha * |x - xstar|^m; equal to alpha * (x - xstar)^m for even m.
CostFunction make_power_cost(double alpha, double xstar, int m);

/// Cost from a plain function, derivatives by finite differences.
CostFunction make_cost(std::string name, RealFn eval,
                       std::optional<double> xstar = std::nullopt,
                       std::optional<double> jstar = std::nullopt,
                       std::optional<int> degree = std::nullopt);

/// order in 0..4. Analytic where available, otherwise finite differences.
double derivative(const CostFunction& cost, int order, double x);

/// Single central stencil of the given order and step (O(h^2) accurate).
double central_difference(const RealFn& f, int order, double x, double h);

/// Central stencil plus one Richardson level (h, h/2).
double richardson_difference(const RealFn& f, int order, double x, double h);

/// Default step for a derivative of the given order at x.
double default_step(int order, double x);

/// richardson_difference with default_step.
double finite_difference(const RealFn& f, int order, double x);

struct AssumptionConstant {
  std::string name;
  double value = 0.0;
  double witness = 0.0;  // grid point attaining the fitted extremum
  bool lower = true;     // lower bounds must stay positive (or nonnegative)
  bool ok = true;
  std::string note;
};

struct AssumptionReport {
  int assumption_id = 0;
  int m = 0;
  Interval domain;
  std::vector<AssumptionConstant> constants;
  bool satisfied = false;

  const AssumptionConstant* find(const std::string& name) const;
  double value(const std::string& name) const;
};

/// Fits the tightest constants of assumption 1, 2 or 3 on a uniform grid
/// plus geometric probes toward x*. m defaults to cost.degree.
AssumptionReport check_assumption(const CostFunction& cost, int assumption_id,
                                  Interval domain, int grid_points,
                                  std::optional<int> m = std::nullopt);

}  // namespace liees
