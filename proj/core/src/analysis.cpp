#include "liees/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liees {

const char* to_string(RateClass c) noexcept {
  switch (c) {
    case RateClass::exponential: return "exponential";
    case RateClass::polynomial: return "polynomial";
    case RateClass::stalled: return "stalled";
    case RateClass::ambiguous: return "ambiguous";
  }
  return "unknown";
}

Envelope envelope(const Trajectory& traj, double xstar, std::size_t min_periods) {
  require(traj.size() >= 2 && traj.epsilon > 0.0, ErrorKind::insufficient_signal,
          "envelope: trajectory too short");
  const double eps = traj.epsilon;
  const auto K = static_cast<std::size_t>(std::floor(traj.final_time() / eps + 1e-6));
  require(K >= min_periods, ErrorKind::insufficient_signal,
          "envelope: trajectory spans fewer periods than required");
  Envelope env;
  env.times.reserve(K + 1);
  env.distances.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) * eps;
    auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - traj.times.begin());
    if (i == traj.size() || (i > 0 && t - traj.times[i - 1] < traj.times[i] - t)) --i;
    env.times.push_back(t);
    env.distances.push_back(std::abs(traj.states[i] - xstar));
  }
  return env;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  if (syy <= 0.0) {
    f.r2 = 1.0;
    return f;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.r2 = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  return f;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  double hi = v[m];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + m);
  return 0.5 * (lo + hi);
}

// log d = c - q log(1 + s t) for fixed s is linear in log(1 + s t).
struct PolyFit {
  double s = 0.0;
  double q = 0.0;
  double r2 = -1.0;
};

PolyFit poly_at(double s, const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> X(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) X[i] = std::log1p(s * t[i]);
  const LineFit f = fit_line(X, y);
  PolyFit p;
  p.s = s;
  p.q = -f.slope;
  p.r2 = (p.q > 0.0 && p.q <= 10.0) ? f.r2 : -1.0;
  return p;
}

PolyFit fit_poly(const std::vector<double>& t, const std::vector<double>& y) {
  const double span = std::max(t.back() - t.front(), 1e-300);
  const int n = 600;
  const double lo = std::log(1e-3), hi = std::log(1e6);
  PolyFit best;
  int best_i = -1;
  for (int i = 0; i < n; ++i) {
    const double s = std::exp(lo + (hi - lo) * i / (n - 1)) / span;
    const PolyFit p = poly_at(s, t, y);
    if (p.r2 > best.r2) {
      best = p;
      best_i = i;
    }
  }
  if (best_i < 0) return best;
  // Golden-section refinement in log s between the neighbouring grid points.
  double a = lo + (hi - lo) * std::max(best_i - 1, 0) / (n - 1) - std::log(span);
  double b = lo + (hi - lo) * std::min(best_i + 1, n - 1) / (n - 1) - std::log(span);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto score = [&](double ls) { return poly_at(std::exp(ls), t, y).r2; };
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = score(c), fd = score(d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = score(d);
    }
  }
  const PolyFit refined = poly_at(std::exp(0.5 * (a + b)), t, y);
  return refined.r2 > best.r2 ? refined : best;
}

}  // namespace

RateEstimate fit_rate(const Envelope& env) {
  const std::size_t n = env.size();
  require(n >= 20, ErrorKind::insufficient_signal, "fit_rate: fewer than 20 samples");
  const auto& d = env.distances;
  const auto& t = env.times;
  const double dmax = *std::max_element(d.begin(), d.end());
  require(dmax > 0.0, ErrorKind::insufficient_signal, "fit_rate: envelope is identically zero");

  const std::size_t tail0 = static_cast<std::size_t>(std::floor(0.9 * n));
  const std::vector<double> tail(d.begin() + tail0, d.end());
  const double rho_tail = median(tail);

  RateEstimate est;
  est.decrease = d[0] > 0.0 ? (d[0] - rho_tail) / d[0] : -std::numeric_limits<double>::infinity();
  if (est.decrease < 0.05) {
    est.rate_class = RateClass::stalled;
    est.rho = rho_tail;
    return est;
  }

  // The tail median is a floor only once the envelope has settled.
  const std::size_t half = tail.size() / 2;
  const double m1 = median(std::vector<double>(tail.begin(), tail.begin() + half));
  const double m2 = median(std::vector<double>(tail.begin() + half, tail.end()));
  const double tiny = 1e-300;
  const double dt_tail = std::max(0.5 * (t.back() - t[tail0]), tiny);
  const double tail_slope = std::log(std::max(m1, tiny) / std::max(m2, tiny)) / dt_tail;
  const double global_slope =
      std::log(dmax / std::max(rho_tail, tiny)) / std::max(t.back() - t.front(), tiny);
  const bool settled = rho_tail <= 0.05 * dmax && std::abs(tail_slope) < 0.2 * std::abs(global_slope);
  const double rho = settled ? rho_tail : 0.0;
  est.rho = rho;

  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = d[i] - rho;
    if (d[i] > 0.0 && e > 10.0 * rho) {
      ts.push_back(t[i]);
      ys.push_back(std::log(e));
    }
  }
  est.samples_used = ts.size();
  require(ts.size() >= 20, ErrorKind::insufficient_signal,
          "fit_rate: fewer than 20 samples above the residual floor");

  const LineFit ex = fit_line(ts, ys);
  est.lambda = -ex.slope;
  est.r_squared_exp = ex.r2;
  const PolyFit po = fit_poly(ts, ys);
  est.power_exponent = -po.q;
  est.poly_scale = po.s;
  est.r_squared_poly = std::max(po.r2, 0.0);

  // Unexplained variance must differ by a clear factor to pick a model.
  const double ue = std::max(1.0 - est.r_squared_exp, 1e-15);
  const double up = po.r2 < 0.0 ? 1.0 : std::max(1.0 - est.r_squared_poly, 1e-15);
  const double factor = 10.0;
  if (ue * factor <= up && est.lambda > 0.0) {
    est.rate_class = RateClass::exponential;
    est.lambda_valid = true;
    est.r_squared = est.r_squared_exp;
  } else if (up * factor <= ue && po.r2 >= 0.0) {
    est.rate_class = RateClass::polynomial;
    est.power_valid = true;
    est.r_squared = est.r_squared_poly;
  } else {
    est.rate_class = RateClass::ambiguous;
    est.lambda_valid = est.lambda > 0.0;
    est.power_valid = po.r2 >= 0.0;
    est.r_squared = std::max(est.r_squared_exp, est.r_squared_poly);
  }
  return est;
}

double closeness(const Trajectory& a, const Trajectory& b) {
  require(a.size() >= 2 && b.size() >= 2, ErrorKind::insufficient_signal,
          "closeness: empty trajectory");
  const double T = std::max(a.final_time(), b.final_time());
  require(std::abs(a.final_time() - b.final_time()) <= 1e-6 * std::max(T, 1e-300),
          ErrorKind::invalid_parameter, "closeness: trajectories span different times");
  const double P = std::max(a.epsilon, b.epsilon);
  require(P > 0.0, ErrorKind::invalid_parameter, "closeness: missing stroboscopic period");
  const auto K = static_cast<long long>(std::floor(std::min(a.final_time(), b.final_time()) / P + 1e-6));
  double m = 0.0;
  for (long long k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) * P;
    m = std::max(m, std::abs(a.state_at(t) - b.state_at(t)));
  }
  return m;
}

std::optional<double> time_to_band(const Envelope& env, double band) {
  if (env.size() == 0) return std::nullopt;
  std::size_t last_out = env.size();
  for (std::size_t i = env.size(); i-- > 0;) {
    if (env.distances[i] > band) {
      last_out = i;
      break;
    }
  }
  if (last_out == env.size()) return env.times.front();
  if (last_out + 1 == env.size()) return std::nullopt;
  return env.times[last_out + 1];
}

ContractionReport contraction_check(const ESSystem& system, const std::vector<double>& grid,
                                    double xstar, int steps_per_period) {
  require(!grid.empty(), ErrorKind::invalid_parameter, "contraction_check: empty grid");
  ContractionReport rep;
  rep.m = system.bracket_length;
  const double eps = system.epsilon();
  const double slack = std::pow(eps, 1.0 + 1.0 / rep.m);

  std::vector<double> r2(grid.size()), lhs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x1 = integrate_period(system, grid[i], steps_per_period);
    r2[i] = (grid[i] - xstar) * (grid[i] - xstar);
    lhs[i] = (x1 - xstar) * (x1 - xstar);
  }

  // lhs - r^2 = -2 eps gamma r^2 + eps^(1+1/m) sigma, least squares in (gamma, sigma).
  std::vector<double> y(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) y[i] = lhs[i] - r2[i];
  double a = 0.0;
  const double r2max = *std::max_element(r2.begin(), r2.end());
  const double r2min = *std::min_element(r2.begin(), r2.end());
  if (r2max > r2min) {
    a = fit_line(r2, y).slope;
  } else if (r2max > 0.0) {
    a = y[0] / r2max;
  }
  rep.gamma = -a / (2.0 * eps);
  double sigma = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    sigma = std::max(sigma, (lhs[i] - r2[i] * (1.0 - 2.0 * eps * rep.gamma)) / slack);
  rep.sigma = sigma;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    ContractionPoint p;
    p.x0 = grid[i];
    p.lhs = lhs[i];
    p.rhs = r2[i] * (1.0 - 2.0 * eps * rep.gamma) + slack * sigma;
    p.holds = p.lhs <= p.rhs + 1e-12 * std::max(p.rhs, 1e-300);
    rep.points.push_back(p);
  }
  rep.contracting = rep.gamma > 0.0 && 2.0 * eps * rep.gamma * r2max > slack * sigma;
  return rep;
}

}  // namespace liees
