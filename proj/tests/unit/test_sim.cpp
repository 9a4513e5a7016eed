#include <cmath>
#include <numbers>

#include "liees/analysis.hpp"
#include "liees/sim.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace liees;

namespace {

const double pi = std::numbers::pi;

ESSystem zero_system(const CostFunction& J, double eps) {
  ESSystem s;
  s.cost = J;
  const auto z = DitherSpec::custom({{1, 0.0, 0.0}}, 2, eps);
  s.channels = {{Shape::linear(), z}, {Shape::constant(1), z}};
  return s;
}

double max_abs_error(const Trajectory& tr, const oracle::Fn& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) e = std::max(e, std::abs(tr.states[i] - exact(tr.times[i])));
  return e;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("fourth-order two-input system is the printed one") {
    const double eps = 1e-4;
    const auto J = make_power_cost(1, 1, 4);
    const auto s = build_two_input(J, 4, 1, eps, 1.0);
    oracle::Gen g(51);
    for (int i = 0; i < 50; ++i) {
      const double t = g.uniform(0, 20 * eps), x = g.uniform(-1, 2);
      const double expected = 2 * std::pow(2 * pi / eps, 0.75) *
                              (3 * J(x) * std::sin(6 * pi * t / eps) + std::cos(2 * pi * t / eps));
      CHECK(s.rhs(t, x) == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(s.bracket_length == 4);
    for (double x : {0.0, 0.5, 2.0}) CHECK(s.averaged_rhs(x) == doctest::Approx(-24 * (x - 1)).scale(1.0));
    const auto w = build_fourth_order_we(J, eps);
    CHECK(w.rhs(3.3e-5, 0.2) == doctest::Approx(s.rhs(3.3e-5, 0.2)));
  }

  TEST_CASE("classic system is the printed one") {
    const double eps = 1e-4;
    const auto J = make_power_cost(1, 1, 4);
    const auto s = build_classic_durr(J, eps);
    oracle::Gen g(52);
    for (int i = 0; i < 50; ++i) {
      const double t = g.uniform(0, 20 * eps), x = g.uniform(-1, 2);
      const double expected =
          2 * std::sqrt(pi / eps) * (J(x) * std::cos(2 * pi * t / eps) + std::sin(2 * pi * t / eps));
      CHECK(s.rhs(t, x) == doctest::Approx(expected).epsilon(1e-9));
    }
    for (double x : {0.0, 0.5, 2.0}) CHECK(s.averaged_rhs(x) == doctest::Approx(-4 * std::pow(x - 1, 3)).scale(1.0));
  }

  TEST_CASE("two-input averaged flows") {
    const auto G = build_two_input(make_power_cost(1, 1, 2), 2, 1, 1e-4, 1.0);
    for (double x : {-1.0, 0.0, 3.0}) CHECK(G.averaged_rhs(x) == doctest::Approx(-2 * (x - 1)).scale(1.0));
    const auto C = build_two_input(make_power_cost(0.5, 0, 2), 3, 1, 1e-4, 1.5);
    for (double x : {-1.0, 0.0, 3.0}) CHECK(C.averaged_rhs(x) == doctest::Approx(-1.5));
    CHECK(C.averaged.front().order == 2);
    CHECK_ERROR_KIND(build_two_input(make_power_cost(1, 0, 2), 5, 1, 1e-4, 1.0), ErrorKind::invalid_parameter);
    CHECK_ERROR_KIND(build_two_input(make_power_cost(1, 0, 2), 2, 1, -1.0, 1.0), ErrorKind::invalid_parameter);
  }

  TEST_CASE("three-input system") {
    const auto J = make_power_cost(0.5, 0, 2);
    const auto s1 = build_three_input(J, Shape::constant(1), 1e-4, 1);
    CHECK(s1.arity() == 3);
    for (double x : {-1.0, 0.4}) CHECK(s1.averaged_rhs(x) == doctest::Approx(-1.0).epsilon(1e-6));
    const auto s2 = build_three_input(J, Shape::constant(std::sqrt(2.0)), 1e-4, 1);
    CHECK(s2.averaged_rhs(0.7) == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK_THROWS_AS(build_three_input(J, Shape::constant(0.0), 1e-4, 1), ConstructionError);
  }

  TEST_CASE("three-input system averages correctly over one period") {
    const double eps = 1e-3;
    const auto J = make_power_cost(0.5, 0, 2);
    const auto s = build_three_input(J, Shape::constant(1), eps, 1);
    const double x1 = integrate_period(s, 0.5);
    CHECK((x1 - 0.5) / eps == doctest::Approx(-1.0).epsilon(0.05));
  }

  TEST_CASE("mixed system") {
    const auto J4 = make_power_cost(1, 1, 4);
    const auto m = build_mixed(J4, 5, 1, 1.0, 1.0, 1e-4);
    CHECK(m.arity() == 4);
    for (double x : {0.0, 0.5, 2.0})
      CHECK(m.averaged_rhs(x) == doctest::Approx(-4 * std::pow(x - 1, 3) - 24 * (x - 1)).epsilon(1e-6).scale(1.0));
    const auto q = build_mixed(make_power_cost(0.5, 0, 2), 5, 1, 1.0, 1.0, 1e-4);
    for (double x : {-1.0, 0.3, 2.0}) CHECK(q.averaged_rhs(x) == doctest::Approx(-x).epsilon(1e-6).scale(1.0));
    try {
      build_mixed(J4, 1, 1, 1.0, 1.0, 1e-4);
      FAIL("resonant design accepted");
    } catch (const ConstructionError& e) {
      REQUIRE(e.resonance().has_value());
      CHECK_FALSE(e.resonance()->ok);
      CHECK(e.resonance()->violations.front().order() == 2);
    }
    CHECK_THROWS_AS(build_mixed(J4, 3, 1, 1.0, 1.0, 1e-4), ConstructionError);
  }

  TEST_CASE("zero dither leaves the state fixed") {
    const auto s = zero_system(make_power_cost(1, 1, 4), 1e-3);
    IntegratorConfig c;
    c.steps_per_period = 64;
    c.total_time = 0.1;
    const auto tr = integrate(s, 0.3, c);
    for (double x : tr.states) CHECK(x == 0.3);
  }

  TEST_CASE("trajectory layout") {
    const auto s = build_classic_durr(make_power_cost(1, 1, 4), 1e-3);
    IntegratorConfig c;
    c.steps_per_period = 256;
    c.total_time = 0.05;
    const auto tr = integrate(s, 0.0, c);
    REQUIRE(tr.size() == 50 * 256 + 1);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.states.size() == tr.times.size());
    CHECK(tr.cost_values.size() == tr.times.size());
    const double h = 1e-3 / 256;
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.times[i] - tr.times[i - 1] == doctest::Approx(h));
    for (std::size_t i = 0; i < tr.size(); i += 97) CHECK(tr.cost_values[i] == doctest::Approx(s.cost(tr.states[i])));

    c.decimation = 100;
    const auto d = integrate(s, 0.0, c);
    CHECK(d.final_state() == tr.final_state());
    CHECK(d.final_time() == doctest::Approx(0.05));
    for (int k = 0; k <= 50; ++k) CHECK(d.state_at(k * 1e-3) == doctest::Approx(tr.states[k * 256]).epsilon(1e-14));
    std::size_t tail = 0;
    for (double t : d.times) tail += t > 0.04 + 1e-12;
    CHECK(tail == 10 * 256);
  }

  TEST_CASE("integration is deterministic") {
    const auto s = build_fourth_order_we(make_power_cost(1, 1, 4), 1e-4);
    IntegratorConfig c;
    c.total_time = 2e-3;
    const auto a = integrate(s, 0.0, c), b = integrate(s, 0.0, c);
    CHECK(a.states == b.states);
  }

  TEST_CASE("classic system approaches the minimizer") {
    const auto s = build_classic_durr(make_power_cost(1, 1, 4), 1e-4);
    IntegratorConfig c;
    c.total_time = 0.02;
    c.decimation = 64;
    const auto env = envelope(integrate(s, 0.0, c), 1.0);
    CHECK(env.distances.back() < env.distances.front());
    const std::size_t q = env.size() / 4;
    CHECK(env.distances[3 * q] < env.distances[q]);
  }

  TEST_CASE("step halving on the two printed systems") {
    const auto J = make_power_cost(1, 1, 4);
    for (const auto& s : {build_classic_durr(J, 1e-4), build_fourth_order_we(J, 1e-4)}) {
      IntegratorConfig c;
      c.total_time = 0.02;
      c.decimation = 4096;
      const double a = integrate(s, 0.0, c).final_state();
      c.steps_per_period = 8192;
      c.decimation = 8192;
      const double b = integrate(s, 0.0, c).final_state();
      CHECK(std::abs(a - b) < 1e-6);
    }
  }

  TEST_CASE("resolution and divergence errors") {
    const auto s = build_fourth_order_we(make_power_cost(1, 1, 4), 1e-4);
    IntegratorConfig c;
    c.steps_per_period = 40;  // fastest harmonic is 3
    CHECK_ERROR_KIND(integrate(s, 0.0, c), ErrorKind::resolution);
    CHECK_ERROR_KIND(integrate_period(s, 0.0, 16), ErrorKind::resolution);

    ESSystem blow;
    blow.cost = make_power_cost(1, 0, 2);
    const auto d = DitherSpec::custom({{1, 10.0, 0.0}}, 2, 1.0);
    blow.channels = {{Shape::polynomial({0, 0, 0, 1}), d}};
    c.steps_per_period = 4096;
    c.total_time = 1.0;
    try {
      integrate(blow, 2.0, c);
      FAIL("no divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.last_time() > 0.0);
      CHECK(e.last_time() < 0.25);
    }
  }

  TEST_CASE("system validation") {
    auto s = build_classic_durr(make_power_cost(1, 0, 2), 1e-3);
    s.channels[1].dither.epsilon = 2e-3;
    CHECK_ERROR_KIND(s.validate(), ErrorKind::invalid_parameter);
  }

  TEST_CASE("averaged-flow closed forms") {
    const auto q = integrate_lbs(make_power_cost(0.25, 0, 4), {{1, 1.0}}, 1.0, 4.0, 4000);
    CHECK(q.final_state() == doctest::Approx(1.0 / 3).epsilon(1e-9));
    const auto e = integrate_lbs(make_power_cost(0.5, 0, 2), {{1, 1.0}}, 1.0, 5.0, 5000);
    CHECK(max_abs_error(e, [](double t) { return std::exp(-t); }) <= 1e-8);
    const auto w = integrate_lbs(make_power_cost(1, 1, 4), {{3, 1.0}}, 0.0, 0.5, 5000);
    CHECK(max_abs_error(w, [](double t) { return 1 - std::exp(-24 * t); }) <= 1e-8);
    CHECK(e.epsilon == doctest::Approx(1e-3));
    CHECK_ERROR_KIND(integrate_lbs(make_power_cost(1, 0, 2), {{4, 1.0}}, 1.0, 1.0, 10), ErrorKind::invalid_parameter);
    CHECK_ERROR_KIND(integrate_lbs(make_power_cost(1, 0, 2), {{1, -1.0}}, 1.0, 1.0, 10), ErrorKind::invalid_parameter);
  }

  TEST_CASE("averaged system integrator follows the bracket flow") {
    const auto s = build_classic_durr(make_power_cost(1, 1, 4), 1e-3);
    const auto a = integrate_averaged(s, 0.0, 1.0, 2000);
    const auto b = integrate_lbs(s.cost, s.averaged, 0.0, 1.0, 2000);
    CHECK(a.final_state() == doctest::Approx(b.final_state()).epsilon(1e-9));
  }

  TEST_CASE("gradient flow never increases the cost") {
    oracle::Gen g(53);
    for (int i = 0; i < 20; ++i) {
      const auto J = make_power_cost(g.uniform(0.2, 2), g.uniform(-1, 1), 2 * g.integer(1, 2));
      const auto tr = integrate_lbs(J, {{1, g.uniform(0.1, 2)}}, g.uniform(-2, 2), 2.0, 2000);
      for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr.cost_values[k] <= tr.cost_values[k - 1] + 1e-10);
    }
  }

  TEST_CASE("RK4 converges at fourth order") {
    const auto J = make_power_cost(0.5, 0, 2);
    std::vector<double> lx, ly;
    for (int steps : {10, 20, 40, 80}) {
      const auto tr = integrate_lbs(J, {{1, 1.0}}, 1.0, 5.0, steps);
      lx.push_back(std::log(static_cast<double>(steps)));
      ly.push_back(std::log(std::abs(tr.final_state() - std::exp(-5.0))));
    }
    const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
    CHECK(slope == doctest::Approx(-4.0).epsilon(0.3 / 4));
  }
}
