#include "liees/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liees {

double ESSystem::epsilon() const {
  require(!channels.empty(), ErrorKind::invalid_parameter, "system has no channels");
  return channels.front().dither.epsilon;
}

std::vector<Shape> ESSystem::shapes() const {
  std::vector<Shape> s;
  for (const auto& c : channels) s.push_back(c.shape);
  return s;
}

std::vector<DitherSpec> ESSystem::dithers() const {
  std::vector<DitherSpec> d;
  for (const auto& c : channels) d.push_back(c.dither);
  return d;
}

int ESSystem::fastest_harmonic() const {
  int f = 1;
  for (const auto& c : channels) f = std::max(f, liees::fastest_harmonic(c.dither));
  return f;
}

double ESSystem::rhs(double t, double x) const {
  const double z = cost.eval(x);
  double v = 0.0;
  for (const auto& c : channels) v += c.shape(z) * eval_dither(c.dither, t);
  return v;
}

double ESSystem::averaged_rhs(double x) const {
  const auto s = shapes();
  double v = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i)
    v += target_coeffs[i] * iterated_bracket(cost, s, targets[i], x);
  return v;
}

void ESSystem::validate() const {
  require(!channels.empty() && channels.size() <= 4, ErrorKind::invalid_parameter,
          "system arity must be in 1..4");
  require(static_cast<bool>(cost.eval), ErrorKind::invalid_parameter, "system has no cost");
  require(targets.size() == target_coeffs.size(), ErrorKind::invalid_parameter,
          "targets and coefficients differ in length");
  const double eps = channels.front().dither.epsilon;
  for (const auto& c : channels) {
    liees::validate(c.dither);
    require(std::abs(c.dither.epsilon - eps) <= 1e-12 * eps, ErrorKind::invalid_parameter,
            "all channels must share one epsilon");
  }
}

namespace {

DitherKind kind_for_length(int N) {
  switch (N) {
    case 2: return DitherKind::first12;
    case 3: return DitherKind::second122;
    case 4: return DitherKind::third1222;
    default: break;
  }
  fail(ErrorKind::invalid_parameter, "bracket length N must be 2, 3 or 4");
}

void check_epsilon(double eps) {
  require(std::isfinite(eps) && eps > 0.0, ErrorKind::invalid_parameter,
          "epsilon must be positive");
}

std::vector<double> gate(const std::vector<DitherSpec>& d, const std::vector<BracketIndex>& t,
                         const std::string& who) {
  const ExcitationReport rep = verify_excitation(d, t, 1e-3);
  if (!rep.ok) {
    std::ostringstream os;
    os << who << ": dithers fail excitation (target " << rep.target_coeff << ", off-target "
       << rep.max_offtarget << " at " << rep.worst_offtarget.str() << ")";
    throw ConstructionError(os.str());
  }
  return rep.target_coeffs;
}

BracketIndex one_then_twos(int N) {
  BracketIndex b;
  b.idx.push_back(1);
  for (int k = 1; k < N; ++k) b.idx.push_back(2);
  return b;
}

}  // namespace

ESSystem build_two_input(const CostFunction& cost, int N, int kappa, double epsilon,
                         double gain) {
  check_epsilon(epsilon);
  const DitherKind kind = kind_for_length(N);
  auto [g1, g2] = make_generating_pair(N, gain);
  ESSystem s;
  s.cost = cost;
  s.channels = {{g1, DitherSpec::make(kind, 1, kappa, epsilon)},
                {g2, DitherSpec::make(kind, 2, kappa, epsilon)}};
  s.targets = {one_then_twos(N)};
  s.target_coeffs = gate(s.dithers(), s.targets, "two-input system");
  s.averaged = {{N - 1, gain * s.target_coeffs[0]}};
  s.bracket_length = N;
  std::ostringstream os;
  os << "two_input N=" << N << " kappa=" << kappa << " gain=" << gain << " eps=" << epsilon
     << " cost=" << cost.name;
  s.description = os.str();
  return s;
}

ESSystem build_classic_durr(const CostFunction& cost, double epsilon) {
  check_epsilon(epsilon);
  ESSystem s;
  s.cost = cost;
  s.channels = {{Shape::linear(1.0), DitherSpec::make(DitherKind::classic, 1, 1, epsilon)},
                {Shape::constant(1.0), DitherSpec::make(DitherKind::classic, 2, 1, epsilon)}};
  s.targets = {{1, 2}};
  s.target_coeffs = gate(s.dithers(), s.targets, "classic system");
  s.averaged = {{1, s.target_coeffs[0]}};
  s.bracket_length = 2;
  std::ostringstream os;
  os << "classic_durr eps=" << epsilon << " cost=" << cost.name;
  s.description = os.str();
  return s;
}

ESSystem build_fourth_order_we(const CostFunction& cost, double epsilon, int kappa) {
  ESSystem s = build_two_input(cost, 4, kappa, epsilon, 1.0);
  std::ostringstream os;
  os << "fourth_order_we kappa=" << kappa << " eps=" << epsilon << " cost=" << cost.name;
  s.description = os.str();
  return s;
}

ESSystem build_three_input(const CostFunction& cost, const Shape& phi2, double epsilon,
                           int kappa, const Shape& seed, Interval zdomain) {
  check_epsilon(epsilon);
  bool nonzero = false;
  for (int i = 0; i <= 64; ++i)
    nonzero = nonzero || std::abs(phi2(zdomain.lo + zdomain.width() * i / 64.0)) > 0.0;
  if (!nonzero) throw ConstructionError("three-input system: phi2 vanishes, no bracket to excite");

  const auto g = make_triple_family(phi2, seed, zdomain);
  ESSystem s;
  s.cost = cost;
  for (int c = 1; c <= 3; ++c)
    s.channels.push_back({g[c - 1], DitherSpec::make(DitherKind::triple123, c, kappa, epsilon)});
  s.targets = {{1, 2, 3}};
  s.target_coeffs = gate(s.dithers(), s.targets, "three-input system");
  if (auto v = phi2.constant_value()) s.averaged = {{2, (*v) * (*v) * s.target_coeffs[0]}};
  s.bracket_length = 3;
  std::ostringstream os;
  os << "three_input phi2=" << phi2.name() << " kappa=" << kappa << " eps=" << epsilon
     << " cost=" << cost.name;
  s.description = os.str();
  return s;
}

ESSystem build_mixed(const CostFunction& cost, int kappa12, int kappa1222, double gamma1,
                     double gamma3, double epsilon) {
  check_epsilon(epsilon);
  require(kappa12 >= 1 && kappa1222 >= 1, ErrorKind::invalid_parameter,
          "mixed system: frequency multipliers must be >= 1");
  require(gamma1 > 0.0 && gamma3 > 0.0, ErrorKind::invalid_parameter,
          "mixed system: gains must be positive");
  const ResonanceReport res = check_resonances({kappa12}, {kappa1222, 3 * kappa1222});
  if (!res.ok) throw ConstructionError("mixed system: resonant frequencies: " + res.describe(), res);

  auto [g1, g2] = make_wronskian_pair(Shape::constant(gamma1), Shape::constant(1.0), {0.0, 1.0});
  auto [g3, g4] = make_generating_pair(4, gamma3);
  ESSystem s;
  s.cost = cost;
  s.channels = {{g1, DitherSpec::make(DitherKind::first12, 1, kappa12, epsilon)},
                {g2, DitherSpec::make(DitherKind::first12, 2, kappa12, epsilon)},
                {g3, DitherSpec::make(DitherKind::third1222, 1, kappa1222, epsilon)},
                {g4, DitherSpec::make(DitherKind::third1222, 2, kappa1222, epsilon)}};
  s.targets = {{1, 2}, {3, 4, 4, 4}};
  s.target_coeffs = gate(s.dithers(), s.targets, "mixed system");
  s.averaged = {{1, gamma1 * s.target_coeffs[0]}, {3, gamma3 * s.target_coeffs[1]}};
  s.bracket_length = 4;
  std::ostringstream os;
  os << "mixed kappa12=" << kappa12 << " kappa1222=" << kappa1222 << " gamma1=" << gamma1
     << " gamma3=" << gamma3 << " eps=" << epsilon << " cost=" << cost.name;
  s.description = os.str();
  return s;
}

double Trajectory::state_at(double t) const {
  require(!times.empty(), ErrorKind::insufficient_signal, "empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[i - 1], t1 = times[i];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * states[i - 1] + w * states[i];
}

namespace {

// Dither values at every half step of one period, indexed 0..2n.
struct DitherTable {
  int n = 0;
  std::vector<std::vector<double>> u;

  DitherTable(const ESSystem& s, int steps) : n(steps) {
    const double h = s.epsilon() / steps;
    for (const auto& c : s.channels) {
      std::vector<double> row(2 * steps + 1);
      for (int j = 0; j <= 2 * steps; ++j) row[j] = eval_dither(c.dither, 0.5 * h * j);
      u.push_back(std::move(row));
    }
  }
};

struct Stepper {
  const ESSystem& sys;
  const DitherTable& table;
  std::vector<Shape> shapes;
  double h;

  double f(double x, int j) const {
    const double z = sys.cost.eval(x);
    double v = 0.0;
    for (std::size_t c = 0; c < shapes.size(); ++c) v += shapes[c](z) * table.u[c][j];
    return v;
  }

  double step(double x, long long i) const {
    const int j = 2 * static_cast<int>(i % table.n);
    const double k1 = f(x, j);
    const double k2 = f(x + 0.5 * h * k1, j + 1);
    const double k3 = f(x + 0.5 * h * k2, j + 1);
    const double k4 = f(x + h * k3, j + 2);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

void check_resolution(const ESSystem& s, int steps) {
  const int need = 16 * s.fastest_harmonic();
  if (steps < need) {
    std::ostringstream os;
    os << "steps_per_period " << steps << " below the minimum " << need;
    fail(ErrorKind::resolution, os.str());
  }
}

void check_state(double x, double t_last) {
  if (!std::isfinite(x) || std::abs(x) > 1e12) {
    std::ostringstream os;
    os << "state diverged after t=" << t_last;
    throw DivergenceError(t_last, os.str());
  }
}

}  // namespace

Trajectory integrate(const ESSystem& system, double x0, const IntegratorConfig& cfg) {
  system.validate();
  require(cfg.total_time > 0.0 && std::isfinite(cfg.total_time), ErrorKind::invalid_parameter,
          "total_time must be positive");
  require(cfg.decimation >= 1, ErrorKind::invalid_parameter, "decimation must be >= 1");
  require(std::isfinite(x0), ErrorKind::invalid_parameter, "x0 must be finite");
  check_resolution(system, cfg.steps_per_period);

  const int n = cfg.steps_per_period;
  const double eps = system.epsilon();
  const double h = eps / n;
  const long long K = std::max<long long>(1, std::llround(cfg.total_time / h));
  const long long tail_start = K - 10LL * n;

  DitherTable table(system, n);
  Stepper st{system, table, system.shapes(), h};

  Trajectory tr;
  tr.epsilon = eps;
  tr.meta = system.description;
  const std::size_t reserve = static_cast<std::size_t>(K / cfg.decimation + K / n + 10LL * n + 2);
  tr.times.reserve(reserve);
  tr.states.reserve(reserve);
  tr.cost_values.reserve(reserve);
  auto record = [&](long long i, double x) {
    tr.times.push_back(static_cast<double>(i) * h);
    tr.states.push_back(x);
    tr.cost_values.push_back(system.cost.eval(x));
  };

  double x = x0;
  record(0, x);
  for (long long i = 0; i < K; ++i) {
    const double next = st.step(x, i);
    check_state(next, static_cast<double>(i) * h);
    x = next;
    const long long k = i + 1;
    if (k % cfg.decimation == 0 || k % n == 0 || k >= tail_start) record(k, x);
  }
  return tr;
}

double integrate_period(const ESSystem& system, double x0, int steps_per_period) {
  system.validate();
  check_resolution(system, steps_per_period);
  DitherTable table(system, steps_per_period);
  Stepper st{system, table, system.shapes(), system.epsilon() / steps_per_period};
  double x = x0;
  for (long long i = 0; i < steps_per_period; ++i) {
    x = st.step(x, i);
    check_state(x, static_cast<double>(i) * st.h);
  }
  return x;
}

namespace {

template <class F>
Trajectory rk4_autonomous(F f, const CostFunction& cost, double x0, double T, int steps,
                          std::string meta) {
  require(T > 0.0 && std::isfinite(T), ErrorKind::invalid_parameter, "total_time must be positive");
  require(steps >= 1, ErrorKind::invalid_parameter, "steps must be >= 1");
  const double h = T / steps;
  Trajectory tr;
  tr.epsilon = h;
  tr.meta = std::move(meta);
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.cost_values.reserve(steps + 1);
  double x = x0;
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  tr.cost_values.push_back(cost.eval(x));
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h * k2);
    const double k4 = f(x + h * k3);
    const double next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_state(next, i * h);
    x = next;
    tr.times.push_back((i + 1) * h);
    tr.states.push_back(x);
    tr.cost_values.push_back(cost.eval(x));
  }
  return tr;
}

}  // namespace

Trajectory integrate_lbs(const CostFunction& cost, const std::vector<LbsTerm>& terms, double x0,
                         double total_time, int steps) {
  for (const auto& t : terms) {
    require(t.order >= 1 && t.order <= 3, ErrorKind::invalid_parameter,
            "averaged-flow term order must be in 1..3");
    require(t.gain >= 0.0, ErrorKind::invalid_parameter, "averaged-flow gains must be >= 0");
  }
  std::ostringstream meta;
  meta << "lbs";
  for (const auto& t : terms) meta << " -" << t.gain << "*J^(" << t.order << ")";
  meta << " cost=" << cost.name;
  auto f = [&](double x) {
    double v = 0.0;
    for (const auto& t : terms) v -= t.gain * derivative(cost, t.order, x);
    return v;
  };
  return rk4_autonomous(f, cost, x0, total_time, steps, meta.str());
}

Trajectory integrate_averaged(const ESSystem& system, double x0, double total_time, int steps) {
  require(!system.targets.empty(), ErrorKind::invalid_parameter, "system has no target brackets");
  auto f = [&](double x) { return system.averaged_rhs(x); };
  return rk4_autonomous(f, system.cost, x0, total_time, steps, "averaged " + system.description);
}

}  // namespace liees
