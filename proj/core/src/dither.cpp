#include "liees/dither.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace liees {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace

const char* to_string(DitherKind kind) noexcept {
  switch (kind) {
    case DitherKind::first12: return "first12";
    case DitherKind::second122: return "second122";
    case DitherKind::second122_abs: return "second122_abs";
    case DitherKind::third1222: return "third1222";
    case DitherKind::classic: return "classic";
    case DitherKind::triple123: return "triple123";
    case DitherKind::custom_harmonic: return "custom_harmonic";
  }
  return "unknown";
}

DitherKind dither_kind_from_string(const std::string& name) {
  for (auto k : {DitherKind::first12, DitherKind::second122, DitherKind::second122_abs,
                 DitherKind::third1222, DitherKind::classic, DitherKind::triple123,
                 DitherKind::custom_harmonic})
    if (name == to_string(k)) return k;
  fail(ErrorKind::invalid_parameter, "unknown dither kind '" + name + "'");
}

DitherSpec DitherSpec::make(DitherKind kind, int channel, int kappa, double epsilon) {
  DitherSpec s;
  s.kind = kind;
  s.channel = channel;
  s.kappa = kappa;
  s.epsilon = epsilon;
  validate(s);
  return s;
}

DitherSpec DitherSpec::custom(std::vector<Harmonic> harmonics, int bracket_length,
                              double epsilon) {
  DitherSpec s;
  s.kind = DitherKind::custom_harmonic;
  s.channel = 1;
  s.harmonics = std::move(harmonics);
  s.custom_length = bracket_length;
  s.epsilon = epsilon;
  validate(s);
  return s;
}

int channel_count(DitherKind kind) {
  switch (kind) {
    case DitherKind::triple123: return 3;
    case DitherKind::custom_harmonic: return 1;
    default: return 2;
  }
}

void validate(const DitherSpec& s) {
  require(std::isfinite(s.epsilon) && s.epsilon > 0.0, ErrorKind::invalid_parameter,
          "dither: epsilon must be positive");
  require(s.kappa >= 1, ErrorKind::invalid_parameter, "dither: kappa must be >= 1");
  if (s.kind == DitherKind::custom_harmonic) {
    require(!s.harmonics.empty(), ErrorKind::invalid_parameter,
            "dither: custom waveform needs harmonics");
    for (const auto& h : s.harmonics)
      require(h.multiplier >= 1, ErrorKind::invalid_parameter,
              "dither: harmonic multipliers must be >= 1");
    require(s.custom_length >= 1 && s.custom_length <= 4, ErrorKind::invalid_parameter,
            "dither: bracket length must be in 1..4");
  } else {
    require(s.channel >= 1 && s.channel <= channel_count(s.kind),
            ErrorKind::invalid_parameter, "dither: channel out of range");
  }
}

int bracket_length(const DitherSpec& s) {
  switch (s.kind) {
    case DitherKind::first12:
    case DitherKind::classic: return 2;
    case DitherKind::second122:
    case DitherKind::second122_abs:
    case DitherKind::triple123: return 3;
    case DitherKind::third1222: return 4;
    case DitherKind::custom_harmonic: return s.custom_length;
  }
  return 2;
}

double amplitude_exponent(const DitherSpec& s) { return 1.0 - 1.0 / bracket_length(s); }

int fastest_harmonic(const DitherSpec& s) {
  const int k = s.kappa;
  switch (s.kind) {
    case DitherKind::first12: return k;
    case DitherKind::classic: return 1;
    case DitherKind::second122: return s.channel == 1 ? 2 * k : k;
    case DitherKind::second122_abs: return 2 * k;  // |cos| repeats at twice its carrier
    case DitherKind::third1222: return s.channel == 1 ? 3 * k : k;
    case DitherKind::triple123: return s.channel == 1 ? k : (s.channel == 2 ? 4 * k : 5 * k);
    case DitherKind::custom_harmonic: {
      int f = 1;
      for (const auto& h : s.harmonics) f = std::max(f, h.multiplier);
      return f;
    }
  }
  return 1;
}

double unit_waveform(const DitherSpec& s, double tau) {
  const double k = s.kappa;
  switch (s.kind) {
    case DitherKind::first12: {
      const double a = 2.0 * std::sqrt(k * pi);
      return s.channel == 1 ? a * std::cos(two_pi * k * tau) : a * std::sin(two_pi * k * tau);
    }
    case DitherKind::classic: {
      const double a = 2.0 * std::sqrt(pi);
      return s.channel == 1 ? a * std::cos(two_pi * tau) : a * std::sin(two_pi * tau);
    }
    case DitherKind::second122: {
      const double b = std::pow(4.0 * k * pi, 2.0 / 3.0);
      return s.channel == 1 ? -2.0 * b * std::cos(two_pi * 2.0 * k * tau)
                            : b * std::cos(two_pi * k * tau);
    }
    case DitherKind::second122_abs: {
      const double b = std::pow(4.0 * k * pi, 2.0 / 3.0);
      if (s.channel == 1) return -2.0 * b * std::cos(two_pi * 2.0 * k * tau);
      return b * (std::abs(std::cos(two_pi * k * tau)) - 2.0 / pi);
    }
    case DitherKind::third1222: {
      const double c = std::pow(2.0 * k * pi, 0.75);
      return s.channel == 1 ? 6.0 * c * std::sin(two_pi * 3.0 * k * tau)
                            : 2.0 * c * std::cos(two_pi * k * tau);
    }
    case DitherKind::triple123: {
      // lambda^3 = 120 pi^2 kappa^2 normalizes the [[1,2],3] coefficient to 1.
      const double lam = std::cbrt(120.0 * pi * pi * k * k);
      const double c1 = std::cos(two_pi * k * tau), c4 = std::cos(two_pi * 4.0 * k * tau);
      if (s.channel == 1) return lam * c1;
      if (s.channel == 2) return lam * c4;
      return 2.0 * lam * c1 * c4;
    }
    case DitherKind::custom_harmonic: {
      double v = 0.0;
      for (const auto& h : s.harmonics)
        v += h.cos_coeff * std::cos(two_pi * h.multiplier * tau) +
             h.sin_coeff * std::sin(two_pi * h.multiplier * tau);
      return v;
    }
  }
  return 0.0;
}

double eval_dither(const DitherSpec& s, double t) {
  const double tau = t / s.epsilon;
  return std::pow(s.epsilon, -amplitude_exponent(s)) * unit_waveform(s, tau - std::floor(tau));
}

double period_mean(const std::function<double(double)>& f, double period, int steps) {
  require(steps >= 64, ErrorKind::invalid_parameter, "period_mean: steps must be >= 64");
  require(period > 0.0, ErrorKind::invalid_parameter, "period_mean: period must be positive");
  if (steps % 2) ++steps;
  const double h = period / steps;
  double s = f(0.0) + f(period);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0 / period;
}

double period_mean(const DitherSpec& spec, int steps) {
  validate(spec);
  return period_mean([&](double t) { return eval_dither(spec, t); }, spec.epsilon, steps);
}

std::vector<DitherSpec> dither_family(DitherKind kind, int kappa, double epsilon) {
  std::vector<DitherSpec> out;
  for (int c = 1; c <= channel_count(kind); ++c)
    out.push_back(DitherSpec::make(kind, c, kappa, epsilon));
  return out;
}

std::string ResonanceReport::describe() const {
  std::ostringstream os;
  if (ok) return "no resonances";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    os << v.n1 << "*" << v.a << (v.n2 < 0 ? " - " : " + ") << std::abs(v.n2) << "*" << v.b
       << " = 0 (order " << v.order() << ")";
  }
  return os.str();
}

ResonanceReport check_resonances(const std::vector<int>& fa, const std::vector<int>& fb,
                                 int max_order) {
  require(!fa.empty() && !fb.empty(), ErrorKind::invalid_parameter,
          "check_resonances: frequency lists must be nonempty");
  for (int f : fa)
    require(f > 0, ErrorKind::invalid_parameter, "check_resonances: frequencies must be positive");
  for (int f : fb)
    require(f > 0, ErrorKind::invalid_parameter, "check_resonances: frequencies must be positive");

  ResonanceReport rep;
  for (int a : fa) {
    for (int b : fb) {
      if (std::find(rep.pairs.begin(), rep.pairs.end(), std::make_pair(a, b)) != rep.pairs.end())
        continue;
      rep.pairs.emplace_back(a, b);
      // With a, b > 0 both coefficients are nonzero; fix n1 > 0.
      for (int n1 = 1; n1 < max_order; ++n1)
        for (int n2 = -(max_order - n1); n2 <= -1; ++n2)
          if (n1 * a + n2 * b == 0) rep.violations.push_back({a, b, n1, n2});
    }
  }
  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const auto& x, const auto& y) { return x.order() < y.order(); });
  rep.ok = rep.violations.empty();
  return rep;
}

}  // namespace liees
