#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "liees/cli/commands.hpp"

namespace liees::cli {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t s) : g(s) {}
  double u(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
  int i(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
};

Shape random_shape(Rng& r) {
  switch (r.i(0, 4)) {
    case 0: return Shape::polynomial({r.u(-1, 1), r.u(-1, 1), r.u(-1, 1)});
    case 1: return Shape::sine(r.u(0.5, 2));
    case 2: return Shape::cosine(r.u(0.5, 2));
    case 3: return Shape::linear(r.u(0.5, 2));
    default: return Shape::constant(r.u(0.5, 2));
  }
}

CostFunction random_power(Rng& r) {
  return make_power_cost(r.u(0.2, 2), r.u(-1, 1), 2 * r.i(1, 2));
}

using Check = std::function<std::pair<bool, std::string>()>;

void add(std::vector<CheckResult>& out, const std::string& suite, const std::string& name, const Check& f) {
  CheckResult c{suite, name, false, ""};
  try {
    auto [ok, detail] = f();
    c.pass = ok;
    c.detail = detail;
  } catch (const std::exception& e) {
    c.detail = std::string("threw: ") + e.what();
  }
  out.push_back(c);
}

// Largest |got - want| / scale over a sampled set.
struct Worst {
  double v = 0.0;
  void operator()(double got, double want, double scale) {
    v = std::max(v, std::abs(got - want) / std::max(scale, 1e-300));
  }
};

std::vector<DitherSpec> random_dithers(Rng& r, int n, double eps) {
  std::vector<DitherSpec> d;
  for (int i = 0; i < n; ++i) {
    std::vector<Harmonic> h;
    const int terms = r.i(1, 3);
    for (int k = 0; k < terms; ++k) h.push_back({r.i(1, 4), r.u(-1, 1), r.u(-1, 1)});
    d.push_back(DitherSpec::custom(h, r.i(2, 4), eps));
  }
  return d;
}

double fd1(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

void brackets(std::vector<CheckResult>& out) {
  const std::string s = "brackets";
  add(out, s, "antisymmetry", [] {
    Rng r(101);
    Worst w;
    for (int i = 0; i < 200; ++i) {
      const auto J = random_power(r);
      const ScalarField f{random_shape(r), J}, g{random_shape(r), J};
      const double x = r.u(-1.5, 1.5);
      const double a = bracket2(f, g, x), b = bracket2(g, f, x);
      w(a, -b, std::max(1.0, std::abs(a)));
    }
    return std::pair{w.v <= 1e-9, "max rel " + sci(w.v)};
  });
  add(out, s, "jacobi identity", [] {
    Rng r(102);
    Worst w;
    for (int i = 0; i < 200; ++i) {
      const auto J = random_power(r);
      const std::vector<Shape> sh{random_shape(r), random_shape(r), random_shape(r)};
      const double x = r.u(-1.5, 1.5);
      const double sum = iterated_bracket(J, sh, {1, 2, 3}, x) + iterated_bracket(J, sh, {2, 3, 1}, x) +
                         iterated_bracket(J, sh, {3, 1, 2}, x);
      double scale = 1.0;
      for (const auto& f : sh) {
        const Jet v = field_jet(f, J, x, 2);
        scale *= std::abs(v.value()) + std::abs(v.derivative(1)) + std::abs(v.derivative(2));
      }
      w(sum, 0.0, scale);
    }
    return std::pair{w.v <= 1e-6, "max rel " + sci(w.v)};
  });
  add(out, s, "generating pairs give -c J^(N-1)", [] {
    Rng r(103);
    Worst w;
    for (int i = 0; i < 60; ++i) {
      const int N = r.i(2, 4);
      const double c = r.u(0.1, 3);
      const auto J = random_power(r);
      auto [a, b] = make_generating_pair(N, c);
      BracketIndex idx{1};
      for (int k = 1; k < N; ++k) idx.idx.push_back(2);
      const double x = r.u(-2, 2);
      const double want = -c * derivative(J, N - 1, x);
      w(iterated_bracket(J, {a, b}, idx, x), want, std::max(1.0, std::abs(want)));
    }
    return std::pair{w.v <= 1e-10, "max rel " + sci(w.v)};
  });
  add(out, s, "[[[J,1],1],1] = -J'''", [] {
    const auto J = make_power_cost(1, 1, 4);
    Worst w;
    for (int i = 0; i <= 40; ++i) {
      const double x = -1 + 4.0 * i / 40;
      const double want = -derivative(J, 3, x);
      w(iterated_bracket(J, {Shape::linear(), Shape::constant(1)}, {1, 2, 2, 2}, x), want,
        std::max(1.0, std::abs(want)));
    }
    return std::pair{w.v <= 1e-10, "max rel " + sci(w.v)};
  });
  add(out, s, "jets match nested finite differences", [] {
    Rng r(104);
    Worst w;
    for (int i = 0; i < 80; ++i) {
      const auto J = random_power(r);
      const int n = r.i(2, 4), len = r.i(1, 4);
      std::vector<Shape> sh;
      for (int k = 0; k < n; ++k) sh.push_back(random_shape(r));
      std::vector<int> word(len);
      for (auto& c : word) c = r.i(1, n);
      std::function<double(double)> acc = [&, f = sh[word[0] - 1]](double x) { return f(J(x)); };
      for (int k = 1; k < len; ++k) {
        const Shape g = sh[word[k] - 1];
        std::function<double(double)> gf = [g, J](double x) { return g(J(x)); };
        acc = [acc, gf](double x) { return fd1(gf, x, 2e-3) * acc(x) - fd1(acc, x, 2e-3) * gf(x); };
      }
      const double x = r.u(-1, 1);
      const double ref = acc(x);
      w(iterated_bracket(J, sh, BracketIndex(word), x), ref, std::max(1.0, std::abs(ref)));
    }
    return std::pair{w.v <= 1e-5, "max rel " + sci(w.v)};
  });
}

void excitation(std::vector<CheckResult>& out) {
  const std::string s = "excitation";
  const std::pair<DitherKind, BracketIndex> kinds[] = {{DitherKind::first12, {1, 2}},
                                                       {DitherKind::second122, {1, 2, 2}},
                                                       {DitherKind::third1222, {1, 2, 2, 2}},
                                                       {DitherKind::classic, {1, 2}},
                                                       {DitherKind::triple123, {1, 2, 3}}};
  for (const auto& [kind, target] : kinds)
    for (int k = 1; k <= (kind == DitherKind::classic ? 1 : 3); ++k)
      add(out, s, std::string(to_string(kind)) + " kappa=" + std::to_string(k) + " excites " + target.str(),
          [kind = kind, target = target, k] {
            const auto r = verify_excitation(dither_family(kind, k, 1.0), target, 1e-3);
            return std::pair{r.ok, "coeff " + sci(r.target_coeff) + ", off-target " + sci(r.max_offtarget)};
          });
  add(out, s, "classic pair I12 = -eps, I21 = +eps", [] {
    Worst w;
    for (double eps : {1.0, 1e-2, 1e-4}) {
      const auto sig = compute_signature(dither_family(DitherKind::classic, 1, eps), 2);
      w(sig.entry({1, 2}), -eps, eps);
      w(sig.entry({2, 1}), eps, eps);
    }
    return std::pair{w.v <= 1e-6, "max rel " + sci(w.v)};
  });
  add(out, s, "third1222 does not excite [1,2]", [] {
    const auto r = verify_excitation(dither_family(DitherKind::third1222, 1, 1.0), {1, 2}, 1e-3);
    return std::pair{!r.ok, "coeff " + sci(r.target_coeff)};
  });
  add(out, s, "literal |cos| second122 variant is rejected", [] {
    const auto r = verify_excitation(dither_family(DitherKind::second122_abs, 1, 1.0), {1, 2, 2}, 1e-3);
    return std::pair{!r.ok, "coeff " + sci(r.target_coeff) + ", off-target " + sci(r.max_offtarget)};
  });
}

void lemma3(std::vector<CheckResult>& out) {
  const std::string s = "lemma3";
  const std::pair<std::string, Shape> phis[] = {
      {"1", Shape::constant(1)}, {"sqrt2", Shape::constant(std::sqrt(2.0))}, {"z", Shape::linear()}};
  const std::pair<std::string, CostFunction> costs[] = {{"quadratic", make_power_cost(1, 0, 2)},
                                                        {"quartic", make_power_cost(1, 1, 4)}};
  for (const auto& [cn, J] : costs)
    for (const auto& [pn, phi] : phis)
      add(out, s, "triple bracket = -phi2^2 J'' (phi2=" + pn + ", " + cn + ")", [&J = J, &phi = phi] {
        const auto fam = make_triple_family(phi, Shape::constant(1), {0, 20});
        const double lo = *J.xstar - 2, hi = *J.xstar + 2;
        Worst w;
        for (int i = 0; i < 50; ++i) {
          const double x = lo + (hi - lo) * (i + 0.5) / 50;
          const double want = -std::pow(phi(J(x)), 2) * derivative(J, 2, x);
          w(iterated_bracket(J, {fam[0], fam[1], fam[2]}, {1, 2, 3}, x), want, std::abs(want));
        }
        return std::pair{w.v <= 1e-6, "max rel " + sci(w.v)};
      });
  add(out, s, "wronskian pair relation", [] {
    const Shape phis2[] = {Shape::constant(1), Shape::linear(), Shape::polynomial({1, 0.5, 0.25}), Shape::cosine()};
    const Shape seeds[] = {Shape::constant(1), Shape::polynomial({2, 0.3}), Shape::polynomial({1.5, -0.2})};
    Worst w;
    for (const auto& phi : phis2)
      for (const auto& a : seeds) {
        auto [g1, g2] = make_wronskian_pair(phi, a, {0, 3});
        for (int i = 0; i <= 60; ++i) {
          const double z = 3.0 * i / 60;
          const Jet ja = g1.jet(z, 1), jb = g2.jet(z, 1);
          w(ja.value() * jb.derivative(1) - ja.derivative(1) * jb.value(), -phi(z), std::max(1.0, std::abs(phi(z))));
        }
      }
    return std::pair{w.v <= 1e-8, "max residual " + sci(w.v)};
  });
  add(out, s, "quadruple bracket = -phi3^2 J'''", [] {
    const auto J = make_power_cost(1, 1, 4);
    const auto fam = make_quadruple_family(Shape::polynomial({1, 1}), Shape::constant(1), {0, 20});
    const std::vector<Shape> sh(fam.begin(), fam.end());
    Worst w;
    for (int i = 0; i < 50; ++i) {
      const double x = -1 + 4.0 * (i + 0.5) / 50;
      const double want = -std::pow(1 + J(x), 2) * derivative(J, 3, x);
      w(iterated_bracket(J, sh, {1, 2, 3, 4}, x), want, std::abs(want));
    }
    return std::pair{w.v <= 1e-6, "max rel " + sci(w.v)};
  });
}

void assumptions(std::vector<CheckResult>& out) {
  const std::string s = "assumptions";
  add(out, s, "quartic satisfies assumption 2 with alpha1=alpha2=1", [] {
    const auto r = check_assumption(make_power_cost(1, 1, 4), 2, {0, 2}, 64);
    const bool ok = r.satisfied && std::abs(r.value("alpha1") - 1) < 1e-9 && std::abs(r.value("alpha2") - 1) < 1e-9;
    return std::pair{ok, "alpha1 " + sci(r.value("alpha1")) + ", alpha2 " + sci(r.value("alpha2"))};
  });
  add(out, s, "quadratic satisfies assumption 3 with beta21=beta22=0", [] {
    const auto r = check_assumption(make_power_cost(1, 0, 2), 3, {-1, 1}, 64);
    const bool ok = r.satisfied && r.value("beta21") == 0.0 && std::abs(r.value("beta22")) < 1e-12;
    return std::pair{ok, "beta22 " + sci(r.value("beta22"))};
  });
  for (int id = 1; id <= 3; ++id)
    add(out, s, "power costs satisfy assumption " + std::to_string(id), [id] {
      Rng r(200 + id);
      int bad = 0;
      for (int i = 0; i < 10; ++i) {
        const auto J = random_power(r);
        const Interval dom{*J.xstar - r.u(0.3, 2), *J.xstar + r.u(0.3, 2)};
        bad += !check_assumption(J, id, dom, 48).satisfied;
      }
      return std::pair{bad == 0, std::to_string(bad) + " of 10 rejected"};
    });
  add(out, s, "|x| violates assumption 2 with m=2", [] {
    const auto J = liees::make_cost("abs", [](double x) { return std::abs(x); }, 0.0, 0.0);
    return std::pair{!check_assumption(J, 2, {-1, 1}, 64, 2).satisfied, ""};
  });
}

void signature(std::vector<CheckResult>& out) {
  const std::string s = "signature";
  add(out, s, "shuffle identities", [] {
    Rng r(301);
    Worst w;
    for (int t = 0; t < 8; ++t) {
      const int n = r.i(1, 3);
      const auto sig = compute_signature(random_dithers(r, n, 1.0), 4, 65536);
      for (int k = 0; k < 20; ++k) {
        const int l1 = r.i(1, 3), l2 = r.i(1, 4 - l1);
        std::vector<int> a(l1), b(l2);
        for (auto& c : a) c = r.i(1, n);
        for (auto& c : b) c = r.i(1, n);
        // Sum over interleavings via a bitmask of positions taken by a.
        double rhs = 0.0, mag = 0.0;
        const int L = l1 + l2;
        for (int mask = 0; mask < (1 << L); ++mask) {
          if (__builtin_popcount(mask) != l1) continue;
          std::vector<int> wd;
          int ia = 0, ib = 0;
          for (int p = 0; p < L; ++p) wd.push_back((mask >> p) & 1 ? a[ia++] : b[ib++]);
          rhs += sig.time_ordered(wd);
          mag += std::abs(sig.time_ordered(wd));
        }
        const double lhs = sig.time_ordered(a) * sig.time_ordered(b);
        w(lhs, rhs, std::max({1.0, mag, std::abs(lhs)}));
      }
    }
    return std::pair{w.v <= 1e-7, "max rel " + sci(w.v)};
  });
  add(out, s, "log/exp round-trip", [] {
    Rng r(302);
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      const int n = r.i(1, 4);
      const auto sig = compute_signature(random_dithers(r, n, r.u(0.1, 1)), 4, 8192);
      const auto c = log_signature(sig);
      TruncatedTensor lie(n, 4);
      for (const auto& it : c.items) lie = lie + it.value * bracket_tensor(it.index, n, 4);
      worst = std::max(worst, tensor_exp(lie).max_abs_difference(sig.tensor));
      worst = std::max(worst, tensor_exp(tensor_log(sig.tensor)).max_abs_difference(sig.tensor));
    }
    return std::pair{worst <= 1e-9, "max abs " + sci(worst)};
  });
}

void integrator(std::vector<CheckResult>& out) {
  const std::string s = "integrator";
  add(out, s, "RK4 order slope", [] {
    const auto J = make_power_cost(0.5, 0, 2);
    const double e1 = std::abs(integrate_lbs(J, {{1, 1.0}}, 1.0, 5.0, 10).final_state() - std::exp(-5.0));
    const double e2 = std::abs(integrate_lbs(J, {{1, 1.0}}, 1.0, 5.0, 80).final_state() - std::exp(-5.0));
    const double slope = std::log(e2 / e1) / std::log(8.0);
    return std::pair{std::abs(slope + 4) <= 0.3, "slope " + sci(slope)};
  });
  add(out, s, "gradient flow e^-t on [0,5]", [] {
    const auto t = integrate_lbs(make_power_cost(0.5, 0, 2), {{1, 1.0}}, 1.0, 5.0, 5000);
    double e = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) e = std::max(e, std::abs(t.states[i] - std::exp(-t.times[i])));
    return std::pair{e <= 1e-8, "max abs " + sci(e)};
  });
  add(out, s, "cubic flow (1+2t)^-1/2 on [0,10]", [] {
    const auto t = integrate_lbs(make_power_cost(0.25, 0, 4), {{1, 1.0}}, 1.0, 10.0, 10000);
    double e = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      e = std::max(e, std::abs(t.states[i] - 1 / std::sqrt(1 + 2 * t.times[i])));
    return std::pair{e <= 1e-6, "max abs " + sci(e)};
  });
}

}  // namespace

std::vector<CheckResult> run_verify(const std::string& suite) {
  static const std::vector<std::pair<std::string, void (*)(std::vector<CheckResult>&)>> suites{
      {"brackets", brackets}, {"excitation", excitation}, {"lemma3", lemma3},
      {"assumptions", assumptions}, {"signature", signature}, {"integrator", integrator}};
  std::vector<CheckResult> out;
  bool known = suite == "all";
  for (const auto& [name, fn] : suites)
    if (suite == "all" || suite == name) {
      known = true;
      fn(out);
    }
  if (!known) throw ValidationError("suite", "unknown suite '" + suite + "'");
  return out;
}

int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err) {
  std::vector<CheckResult> res;
  try {
    res = run_verify(suite);
  } catch (const Error& e) {
    err << "liees: " << e.what() << "\n";
    return exit_code_for(e);
  }
  int failures = 0;
  for (const auto& r : res) {
    failures += !r.pass;
    out << std::left << std::setw(12) << r.suite << ' ' << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << '\n';
  }
  out << res.size() - failures << '/' << res.size() << " checks passed\n";
  return failures ? exit_failed : exit_ok;
}

}  // namespace liees::cli
