#include <cmath>

#include "liees/analysis.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace liees;

namespace {

Envelope synthetic(const oracle::Fn& d, double T, int n) {
  Envelope e;
  for (int i = 0; i <= n; ++i) {
    e.times.push_back(T * i / n);
    e.distances.push_back(d(T * i / n));
  }
  return e;
}

Trajectory curve(const oracle::Fn& x, double eps, int periods, int per_period = 4) {
  Trajectory t;
  t.epsilon = eps;
  for (int i = 0; i <= periods * per_period; ++i) {
    const double s = eps * i / per_period;
    t.times.push_back(s);
    t.states.push_back(x(s));
    t.cost_values.push_back(0.0);
  }
  return t;
}

ESSystem zero_system(const CostFunction& J, double eps) {
  ESSystem s;
  s.cost = J;
  const auto z = DitherSpec::custom({{1, 0.0, 0.0}}, 2, eps);
  s.channels = {{Shape::linear(), z}, {Shape::constant(1), z}};
  return s;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("envelope of a constant trajectory at the minimizer") {
    const auto env = envelope(curve([](double) { return 1.0; }, 0.01, 30), 1.0);
    CHECK(env.size() == 31);
    for (double d : env.distances) CHECK(d == 0.0);
  }

  TEST_CASE("envelope samples whole periods") {
    const auto tr = integrate_lbs(make_power_cost(0.5, 0, 2), {{1, 1.0}}, 1.0, 1.0, 100);
    const auto env = envelope(tr, 0.0);
    REQUIRE(env.size() == 101);
    for (std::size_t k = 0; k < env.size(); ++k) {
      CHECK(env.times[k] == doctest::Approx(0.01 * k));
      CHECK(env.distances[k] == doctest::Approx(std::exp(-0.01 * k)).epsilon(1e-9));
    }
    CHECK_ERROR_KIND(envelope(curve([](double) { return 0.0; }, 0.1, 5), 0.0), ErrorKind::insufficient_signal);
  }

  TEST_CASE("exponential envelope") {
    const auto r = fit_rate(synthetic([](double t) { return std::exp(-2 * t); }, 5, 500));
    CHECK(r.rate_class == RateClass::exponential);
    CHECK(r.lambda_valid);
    CHECK_FALSE(r.power_valid);
    CHECK(r.lambda == doctest::Approx(2.0).epsilon(0.01));
    CHECK(r.r_squared > 0.999);
  }

  TEST_CASE("polynomial envelope") {
    const auto r = fit_rate(synthetic([](double t) { return 1 / std::sqrt(1 + 2 * t); }, 20, 500));
    CHECK(r.rate_class == RateClass::polynomial);
    CHECK(r.power_valid);
    CHECK_FALSE(r.lambda_valid);
    CHECK(r.power_exponent == doctest::Approx(-0.5).epsilon(0.1));
  }

  TEST_CASE("constant envelope stalls") {
    const auto r = fit_rate(synthetic([](double) { return 0.7; }, 1, 100));
    CHECK(r.rate_class == RateClass::stalled);
    CHECK_FALSE(r.lambda_valid);
    CHECK_FALSE(r.power_valid);
    CHECK(r.rho == doctest::Approx(0.7));
  }

  TEST_CASE("degenerate envelopes") {
    CHECK_ERROR_KIND(fit_rate(synthetic([](double) { return 0.0; }, 1, 100)), ErrorKind::insufficient_signal);
    CHECK_ERROR_KIND(fit_rate(synthetic([](double t) { return std::exp(-t); }, 1, 10)), ErrorKind::insufficient_signal);
  }

  TEST_CASE("exponential decay to a floor") {
    oracle::Gen g(61);
    for (int i = 0; i < 20; ++i) {
      const double lam = g.uniform(1, 30), rho = g.uniform(1e-6, 1e-4);
      const double T = 30 / lam;
      // Floor band: a deterministic oscillation around rho.
      const auto r = fit_rate(synthetic(
          [&](double t) { return std::exp(-lam * t) + rho * (1 + 0.2 * std::sin(37 * t * lam)); }, T, 2000));
      CHECK(r.rate_class == RateClass::exponential);
      CHECK(r.lambda == doctest::Approx(lam).epsilon(0.02));
      CHECK(r.rho > 0.5 * rho);
      CHECK(r.rho < 2 * rho);
    }
  }

  TEST_CASE("model recovery") {
    oracle::Gen g(62);
    for (int i = 0; i < 30; ++i) {
      const double lam = g.uniform(0.2, 50), a = g.uniform(0.1, 5);
      const auto r = fit_rate(synthetic([&](double t) { return a * std::exp(-lam * t); }, g.uniform(3, 15) / lam, 800));
      CHECK(r.rate_class == RateClass::exponential);
      CHECK(r.lambda == doctest::Approx(lam).epsilon(0.02));
    }
    for (int i = 0; i < 30; ++i) {
      const double q = g.uniform(0.25, 2), s = g.uniform(0.5, 20), a = g.uniform(0.1, 5);
      const double T = g.uniform(50, 200) / s;
      const auto r = fit_rate(synthetic([&](double t) { return a * std::pow(1 + s * t, -q); }, T, 800));
      CHECK(r.rate_class == RateClass::polynomial);
      CHECK(r.power_exponent == doctest::Approx(-q).epsilon(0.1));
    }
  }

  TEST_CASE("closeness") {
    const auto a = curve([](double t) { return std::exp(-t); }, 0.01, 100);
    CHECK(closeness(a, a) == 0.0);
    const auto b = curve([](double t) { return std::exp(-t) + 0.1 * t; }, 0.01, 100, 7);
    CHECK(closeness(a, b) == closeness(b, a));
    CHECK(closeness(a, b) == doctest::Approx(0.1).epsilon(1e-6));
    const auto c = curve([](double t) { return std::exp(-t); }, 0.01, 100, 3);
    CHECK(closeness(a, c) < 1e-15);
    CHECK_ERROR_KIND(closeness(a, curve([](double t) { return t; }, 0.01, 50)), ErrorKind::invalid_parameter);
  }

  TEST_CASE("closeness against a constant trajectory") {
    const auto J = make_power_cost(0.5, 0, 2);
    IntegratorConfig c;
    c.steps_per_period = 64;
    c.total_time = 1.0;
    const auto full = integrate(zero_system(J, 0.01), 1.0, c);
    const auto avg = integrate_lbs(J, {{1, 1.0}}, 1.0, 1.0, 100);
    CHECK(closeness(full, avg) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-9));
  }

  TEST_CASE("time to band") {
    const auto env = synthetic([](double t) { return std::exp(-t); }, 5, 500);
    const auto t = time_to_band(env, 0.05);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(-std::log(0.05)).epsilon(0.01));
    CHECK_FALSE(time_to_band(env, 1e-6).has_value());
    CHECK(*time_to_band(env, 2.0) == 0.0);
    // Leaving the band again resets the entry time.
    const auto bump = synthetic([](double t) { return t > 3 && t < 3.5 ? 0.5 : std::exp(-t); }, 5, 500);
    CHECK(*time_to_band(bump, 0.05) >= 3.5);
  }

  TEST_CASE("contraction on the fourth-order system") {
    const auto s = build_fourth_order_we(make_power_cost(1, 1, 4), 1e-4);
    const auto r = contraction_check(s, {0, 0.25, 0.5, 0.75}, 1.0);
    CHECK(r.gamma > 0.0);
    CHECK(r.contracting);
    CHECK(r.m == 4);
    for (const auto& p : r.points) CHECK(p.holds);
  }

  TEST_CASE("no contraction when the bracket vanishes") {
    const auto s = build_two_input(make_power_cost(0.5, 0, 2), 4, 1, 1e-4, 1.0);
    const auto r = contraction_check(s, {0.25, 0.5, 0.75, 1.0}, 0.0);
    CHECK_FALSE(r.contracting);
    CHECK(std::abs(r.gamma) < 0.1);
    for (const auto& p : r.points) CHECK(p.holds);
  }

  TEST_CASE("zero dither is not a contraction") {
    const auto r = contraction_check(zero_system(make_power_cost(1, 1, 4), 1e-3), {0, 0.5}, 1.0, 64);
    CHECK(r.gamma == 0.0);
    CHECK(r.sigma == 0.0);
    CHECK_FALSE(r.contracting);
    for (const auto& p : r.points) {
      CHECK(p.holds);
      CHECK(p.lhs == p.rhs);
    }
  }

  TEST_CASE("contraction sign survives cost rescaling") {
    const auto J = make_power_cost(1, 1, 4), J2 = make_power_cost(2, 1, 4);
    for (int N : {2, 4}) {
      const auto a = contraction_check(build_two_input(J, N, 1, 1e-4, 1.0), {0, 0.25, 0.5, 0.75}, 1.0);
      const auto b = contraction_check(build_two_input(J2, N, 1, 1e-4, 0.5), {0, 0.25, 0.5, 0.75}, 1.0);
      CHECK((a.gamma > 0) == (b.gamma > 0));
      CHECK(a.contracting == b.contracting);
    }
  }
}
