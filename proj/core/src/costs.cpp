#include "liees/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace liees {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_domain: return "invalid-domain";
    case ErrorKind::invalid_seed: return "invalid-seed";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::calibration: return "calibration";
    case ErrorKind::construction: return "construction";
    case ErrorKind::insufficient_signal: return "insufficient-signal";
    case ErrorKind::validation: return "validation";
  }
  return "unknown";
}

namespace {

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double falling_factorial(int m, int l) {
  double r = 1.0;
  for (int i = 0; i < l; ++i) r *= (m - i);
  return r;
}

}  // namespace

CostFunction make_power_cost(double alpha, double xstar, int m) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::invalid_parameter,
          "power cost: alpha must be positive");
  require(m >= 2, ErrorKind::invalid_parameter, "power cost: m must be >= 2");
  require(std::isfinite(xstar), ErrorKind::invalid_parameter,
          "power cost: xstar must be finite");

  const bool odd = (m % 2) != 0;
  CostFunction c;
  std::ostringstream name;
  name << "power(" << alpha << "," << xstar << "," << m << ")";
  c.name = name.str();
  // |d|^m = sgn(d)^m d^m, so every derivative keeps the sgn factor for odd m.
  auto term = [=](int l, double x) {
    const double d = x - xstar;
    if (l > m) return 0.0;
    const double s = odd ? (d < 0.0 ? -1.0 : 1.0) : 1.0;
    return alpha * s * falling_factorial(m, l) * ipow(d, m - l);
  };
  c.eval = [=](double x) { return term(0, x); };
  for (int l = 1; l <= 4; ++l) c.analytic[l - 1] = [=](double x) { return term(l, x); };
  c.xstar = xstar;
  c.jstar = 0.0;
  c.degree = m;
  return c;
}

CostFunction make_cost(std::string name, RealFn eval, std::optional<double> xstar,
                       std::optional<double> jstar, std::optional<int> degree) {
  require(static_cast<bool>(eval), ErrorKind::invalid_parameter, "cost: empty eval");
  CostFunction c;
  c.name = std::move(name);
  c.eval = std::move(eval);
  c.xstar = xstar;
  c.jstar = jstar;
  c.degree = degree;
  return c;
}

double central_difference(const RealFn& f, int order, double x, double h) {
  switch (order) {
    case 0: return f(x);
    case 1: return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2: return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) /
             (2.0 * h * h * h);
    case 4:
      return (f(x + 2 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) +
              f(x - 2 * h)) /
             (h * h * h * h);
    default: break;
  }
  fail(ErrorKind::invalid_parameter, "finite difference order must be in 0..4");
}

double richardson_difference(const RealFn& f, int order, double x, double h) {
  if (order == 0) return f(x);
  const double coarse = central_difference(f, order, x, h);
  const double fine = central_difference(f, order, x, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double default_step(int order, double x) {
  // Wider steps for higher orders; round-off grows like eps/h^order.
  static constexpr double base[5] = {0.0, 1e-4, 1e-3, 3e-3, 2e-2};
  require(order >= 0 && order <= 4, ErrorKind::invalid_parameter,
          "derivative order must be in 0..4");
  return base[order] * std::max(1.0, std::abs(x));
}

double finite_difference(const RealFn& f, int order, double x) {
  return richardson_difference(f, order, x, default_step(order, x));
}

double derivative(const CostFunction& cost, int order, double x) {
  require(order >= 0 && order <= 4, ErrorKind::invalid_parameter,
          "derivative order must be in 0..4");
  double v;
  if (order == 0)
    v = cost.eval(x);
  else if (cost.has_analytic(order))
    v = cost.analytic[order - 1](x);
  else
    v = finite_difference(cost.eval, order, x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "derivative of order " << order << " of " << cost.name
       << " is not finite at x=" << x;
    fail(ErrorKind::numeric_failure, os.str());
  }
  return v;
}

const AssumptionConstant* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return &c;
  return nullptr;
}

double AssumptionReport::value(const std::string& name) const {
  const auto* c = find(name);
  require(c != nullptr, ErrorKind::invalid_parameter, "no assumption constant " + name);
  return c->value;
}

namespace {

// One inequality of an assumption, written as a ratio whose extremum over the
// domain is the tightest constant.
struct Ratio {
  std::string name;
  bool lower;
  bool strict;  // lower bound must be > 0 rather than >= 0
  std::function<double(double)> eval;
  std::optional<double> pinned;  // constant fixed a priori instead of fitted
};

// Ratio values along x* +- w 2^-k as k grows. A clear power-law trend means
// the extremum is attained only in the limit x -> x*.
double probe_slope(const Ratio& r, double xstar, double w, double side) {
  const int k0 = 8, k1 = 12;
  const double h0 = w * std::ldexp(1.0, -k0), h1 = w * std::ldexp(1.0, -k1);
  const double r0 = std::abs(r.eval(xstar + side * h0));
  const double r1 = std::abs(r.eval(xstar + side * h1));
  if (!(r0 > 0.0) || !(r1 > 0.0) || !std::isfinite(r0) || !std::isfinite(r1)) return 0.0;
  return std::log(r1 / r0) / std::log(h1 / h0);
}

}  // namespace

AssumptionReport check_assumption(const CostFunction& cost, int assumption_id,
                                  Interval domain, int grid_points, std::optional<int> m_opt) {
  require(assumption_id >= 1 && assumption_id <= 3, ErrorKind::invalid_parameter,
          "assumption id must be 1, 2 or 3");
  require(grid_points >= 16, ErrorKind::invalid_parameter, "grid_points must be >= 16");
  require(cost.xstar.has_value(), ErrorKind::invalid_parameter,
          "assumption check needs a declared minimizer");
  const double xstar = *cost.xstar;
  require(domain.contains_strictly(xstar), ErrorKind::invalid_domain,
          "minimizer lies outside the open domain");
  const int m = m_opt ? *m_opt : cost.degree.value_or(0);
  require(m >= (assumption_id == 1 ? 1 : 2), ErrorKind::invalid_parameter,
          "assumption check needs a degree m");
  if (assumption_id == 2)
    require(m - 1 <= 4, ErrorKind::invalid_parameter,
            "assumption 2 needs J^(m-1) with m-1 <= 4");

  const double jstar = cost.jstar.value_or(cost.eval(xstar));
  auto dj = [&](double x) { return cost.eval(x) - jstar; };
  auto dist = [&](double x) { return std::abs(x - xstar); };
  auto D = [&](int k, double x) { return derivative(cost, k, x); };
  const double md = m;

  std::vector<Ratio> ratios;
  auto add = [&](std::string name, bool lower, bool strict, std::function<double(double)> f) {
    ratios.push_back({std::move(name), lower, strict, std::move(f), std::nullopt});
  };
  auto alpha = [&](double x) { return dj(x) / std::pow(dist(x), md); };
  add("alpha1", true, true, alpha);
  add("alpha2", false, false, alpha);
  if (assumption_id == 1) {
    auto beta = [&](double x) {
      return std::abs(D(1, x)) / std::pow(std::max(dj(x), 0.0), 1.0 - 1.0 / md);
    };
    add("beta1", true, true, beta);
    add("beta2", false, false, beta);
    add("mu", false, false, [&](double x) {
      return std::abs(D(2, x)) / std::pow(std::max(dj(x), 0.0), 1.0 - 2.0 / md);
    });
  } else if (assumption_id == 2) {
    const int k = m - 1;
    add("beta1", true, true, [&, k](double x) {
      const double d = x - xstar;
      return D(k, x) * d / (d * d);
    });
    add("beta2", false, false, [&, k](double x) { return std::abs(D(k, x)) / dist(x); });
  } else {
    add("beta11", true, false, [&](double x) {
      const double d = x - xstar;
      return D(1, x) * d / std::pow(dist(x), md);
    });
    add("beta12", false, false,
        [&](double x) { return std::abs(D(1, x)) / std::pow(dist(x), md - 1.0); });
    add("beta21", true, false, [&](double x) {
      const double d = x - xstar;
      return D(3, x) * d / std::pow(dist(x), md - 2.0);
    });
    if (m == 2) ratios.back().pinned = 0.0;
    add("beta22", false, false, [&](double x) { return std::abs(D(3, x)); });
  }

  // Uniform grid without x*, plus geometric probes on both sides.
  std::vector<double> pts;
  const double tiny = 1e-9 * domain.width();
  for (int i = 0; i < grid_points; ++i) {
    const double x = domain.lo + domain.width() * i / (grid_points - 1.0);
    if (std::abs(x - xstar) > tiny) pts.push_back(x);
  }
  const double w = std::min(xstar - domain.lo, domain.hi - xstar);
  for (int k = 1; k <= 12; ++k) {
    pts.push_back(xstar - w * std::ldexp(1.0, -k));
    pts.push_back(xstar + w * std::ldexp(1.0, -k));
  }

  AssumptionReport rep;
  rep.assumption_id = assumption_id;
  rep.m = m;
  rep.domain = domain;
  rep.satisfied = true;
  for (const auto& r : ratios) {
    AssumptionConstant c;
    c.name = r.name;
    c.lower = r.lower;
    double best = r.lower ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
    bool finite = true;
    for (double x : pts) {
      const double v = r.eval(x);
      if (!std::isfinite(v)) {
        finite = false;
        c.witness = x;
        break;
      }
      if (r.lower ? v < best : v > best) {
        best = v;
        c.witness = x;
      }
    }
    c.value = best;
    if (!finite) {
      c.ok = false;
      c.note = "ratio not finite";
    } else if (r.pinned) {
      c.value = *r.pinned;
      c.ok = best >= *r.pinned;
      if (!c.ok) c.note = "inequality violated with the pinned constant";
    } else if (r.lower) {
      c.ok = r.strict ? best > 0.0 : best >= 0.0;
      if (!c.ok) c.note = r.strict ? "lower constant not positive" : "lower constant negative";
      if (c.ok && r.strict) {
        for (double side : {-1.0, 1.0}) {
          if (probe_slope(r, xstar, w, side) > 0.2) {
            c.ok = false;
            c.note = "ratio vanishes toward the minimizer";
          }
        }
      }
    } else {
      for (double side : {-1.0, 1.0}) {
        if (probe_slope(r, xstar, w, side) < -0.2) {
          c.ok = false;
          c.note = "ratio unbounded toward the minimizer";
        }
      }
    }
    rep.satisfied = rep.satisfied && c.ok;
    rep.constants.push_back(std::move(c));
  }
  return rep;
}

}  // namespace liees
