#pragma once

#include <string>
#include <vector>

#include "liees/costs.hpp"
#include "liees/dither.hpp"
#include "liees/lie.hpp"

namespace liees {

struct Channel {
  Shape shape;
  DitherSpec dither;
};

/// Term -gain * J^(order) of an averaged flow.
struct LbsTerm {
  int order = 1;
  double gain = 1.0;
};

/// xdot = sum_k g_k(J(x)) u_k(t).
struct ESSystem {
  CostFunction cost;
  std::vector<Channel> channels;
  std::string description;
  /// Brackets the dithers are meant to excite, with their measured
  /// per-period coefficients.
  std::vector<BracketIndex> targets;
  std::vector<double> target_coeffs;
  /// Averaged flow as cost derivatives, when it has that form.
  std::vector<LbsTerm> averaged;
  int bracket_length = 2;

  int arity() const { return static_cast<int>(channels.size()); }
  double epsilon() const;
  std::vector<Shape> shapes() const;
  std::vector<DitherSpec> dithers() const;
  int fastest_harmonic() const;

  double rhs(double t, double x) const;
  /// sum over targets of coefficient * bracket value.
  double averaged_rhs(double x) const;

  /// Throws invalid-parameter when channels disagree on eps or arity > 4.
  void validate() const;
};

}  // namespace liees
