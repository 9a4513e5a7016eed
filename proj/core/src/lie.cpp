#include "liees/lie.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liees {

Jet cost_jet(const CostFunction& cost, double x, int order) {
  double d[kMaxJetOrder + 1];
  for (int k = 0; k <= order; ++k) d[k] = derivative(cost, k, x);
  return Jet::from_derivatives(d, order);
}

Jet field_jet(const Shape& shape, const CostFunction& cost, double x, int order) {
  const Jet j = cost_jet(cost, x, order);
  return compose(shape.jet(j.value(), order), j);
}

std::string BracketIndex::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "." : "") << idx[i];
  return os.str();
}

BracketIndex BracketIndex::parse(const std::string& s) {
  BracketIndex b;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == tok.size() && v >= 1, ErrorKind::invalid_parameter,
            "bad bracket index '" + s + "'");
    b.idx.push_back(v);
    tok.clear();
  };
  for (char ch : s) {
    if (ch == '.' || ch == ',' || ch == ' ' || ch == '(' || ch == ')')
      flush();
    else
      tok.push_back(ch);
  }
  flush();
  require(!b.idx.empty(), ErrorKind::invalid_parameter, "empty bracket index");
  return b;
}

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::numeric_failure, std::string(what) + " is not finite");
  return v;
}

}  // namespace

double bracket2(const ScalarField& f, const ScalarField& g, double x) {
  const Jet jf = field_jet(f, x, 1);
  const Jet jg = field_jet(g, x, 1);
  return checked(bracket(jf, jg).value(), "bracket");
}

Jet iterated_bracket_jet(const CostFunction& cost, const std::vector<Shape>& shapes,
                         const BracketIndex& idx, double x, int order) {
  const int l = idx.length();
  require(l >= 1 && l <= 4, ErrorKind::invalid_parameter, "bracket length must be in 1..4");
  const int base = order + l - 1;
  require(order >= 0 && base <= kMaxJetOrder, ErrorKind::invalid_parameter,
          "bracket jet order too high");
  for (int i : idx.idx)
    require(i >= 1 && i <= static_cast<int>(shapes.size()), ErrorKind::invalid_parameter,
            "bracket index exceeds the number of fields");

  const Jet cj = cost_jet(cost, x, base);
  auto leaf = [&](int i) { return compose(shapes[i - 1].jet(cj.value(), base), cj); };
  Jet b = leaf(idx.idx[0]);
  for (int k = 1; k < l; ++k) b = bracket(b, leaf(idx.idx[k]));
  if (!is_finite(b)) fail(ErrorKind::numeric_failure, "iterated bracket is not finite");
  return b;
}

double iterated_bracket(const CostFunction& cost, const std::vector<Shape>& shapes,
                        const BracketIndex& idx, double x) {
  return iterated_bracket_jet(cost, shapes, idx, x, 0).value();
}

double iterated_bracket(const std::vector<ScalarField>& fields, const BracketIndex& idx,
                        double x) {
  const int l = idx.length();
  require(l >= 1 && l <= 4, ErrorKind::invalid_parameter, "bracket length must be in 1..4");
  for (int i : idx.idx)
    require(i >= 1 && i <= static_cast<int>(fields.size()), ErrorKind::invalid_parameter,
            "bracket index exceeds the number of fields");
  Jet b = field_jet(fields[idx.idx[0] - 1], x, l - 1);
  for (int k = 1; k < l; ++k) b = bracket(b, field_jet(fields[idx.idx[k] - 1], x, l - 1));
  return checked(b.value(), "iterated bracket");
}

namespace {

// Smooth test cost with every derivative nonzero; J(0) = z0.
CostFunction calibration_cost(double z0) {
  CostFunction c;
  c.name = "calibration";
  c.eval = [z0](double x) { return z0 + x + x * x / 2 + x * x * x / 6 + x * x * x * x / 24; };
  c.analytic[0] = [](double x) { return 1 + x + x * x / 2 + x * x * x / 6; };
  c.analytic[1] = [](double x) { return 1 + x + x * x / 2; };
  c.analytic[2] = [](double x) { return 1 + x; };
  c.analytic[3] = [](double) { return 1.0; };
  return c;
}

struct Simpson {
  const std::function<double(double)>& f;
  int evaluations = 0;

  double step(double a, double fa, double m, double fm, double b, double fb, double whole,
              double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta)) fail(ErrorKind::numeric_failure, "quadrature integrand not finite");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) fail(ErrorKind::numeric_failure, "adaptive Simpson did not converge");
    return step(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           step(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
  }

  double operator()(double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return step(a, fa, m, fm, b, fb, whole, tol, 48);
  }
};

// w(z) = -int_{z0}^z phi / a^2, tabulated at nodes so each evaluation only
// integrates over a short stretch.
class WronskianPotential {
 public:
  WronskianPotential(Shape phi, Shape a, double lo, double hi, double z0)
      : phi_(std::move(phi)), a_(std::move(a)), z0_(z0), lo_(lo), hi_(hi) {
    integrand_ = [this](double s) {
      const double av = a_(s);
      return -phi_(s) / (av * av);
    };
    const int n = 128;
    nodes_.resize(n + 1);
    values_.resize(n + 1);
    for (int i = 0; i <= n; ++i) nodes_[i] = lo_ + (hi_ - lo_) * i / n;
    for (int i = 0; i <= n; ++i) values_[i] = integral(z0_, nodes_[i]);
  }

  double operator()(double z) const {
    std::size_t i;
    if (z <= lo_)
      i = 0;
    else if (z >= hi_)
      i = nodes_.size() - 1;
    else
      i = static_cast<std::size_t>(std::lround((z - lo_) / (hi_ - lo_) * (nodes_.size() - 1)));
    return values_[i] + integral(nodes_[i], z);
  }

 private:
  double integral(double a, double b) const {
    Simpson s{integrand_};
    return s(a, b, 1e-12);
  }

  Shape phi_, a_;
  double z0_, lo_, hi_;
  std::function<double(double)> integrand_;
  std::vector<double> nodes_, values_;
};

}  // namespace

std::pair<Shape, Shape> make_generating_pair(int N, double gain) {
  require(N >= 2 && N <= 4, ErrorKind::invalid_parameter, "generating pair: N must be 2, 3 or 4");
  require(gain > 0.0 && std::isfinite(gain), ErrorKind::invalid_parameter,
          "generating pair: gain must be positive");
  const CostFunction test = calibration_cost(0.5);
  const double x = 0.1;
  BracketIndex idx;
  idx.idx.push_back(1);
  for (int k = 1; k < N; ++k) idx.idx.push_back(2);

  const double b = iterated_bracket(test, {Shape::linear(gain), Shape::constant(1.0)}, idx, x);
  const double target = -gain * derivative(test, N - 1, x);
  if (std::abs(b) < 1e-12) fail(ErrorKind::calibration, "generating pair bracket vanishes");
  const double s = (b * target > 0.0) ? 1.0 : -1.0;
  if (std::abs(s * b - target) > 1e-8 * std::abs(target))
    fail(ErrorKind::calibration, "generating pair does not reproduce -c J^(N-1)");
  return {Shape::linear(s * gain), Shape::constant(1.0)};
}

std::pair<Shape, Shape> make_wronskian_pair(const Shape& phi, const Shape& a, Interval zdomain,
                                            double z0) {
  require(zdomain.hi >= zdomain.lo, ErrorKind::invalid_parameter, "wronskian pair: empty domain");
  const double lo = std::min(zdomain.lo, z0), hi = std::max(zdomain.hi, z0);

  const int n = 2048;
  double prev = a(lo);
  for (int i = 0; i <= n; ++i) {
    const double v = a(lo + (hi - lo) * i / n);
    if (!std::isfinite(v) || std::abs(v) < 1e-12 || v * prev < 0.0)
      fail(ErrorKind::invalid_seed, "wronskian pair: seed vanishes on the cost range");
    prev = v;
  }

  if (phi.constant_value() && a.constant_value()) {
    const double k = *phi.constant_value() / *a.constant_value();
    // b = -(phi/a)(z - z0) in closed form.
    return {a, Shape::polynomial({k * z0, -k})};
  }

  auto w = std::make_shared<const WronskianPotential>(phi, a, lo, hi, z0);
  auto value = [a, w](double z) { return a(z) * (*w)(z); };
  auto jet = [a, phi, w](double z, int order) {
    const Jet aj = a.jet(z, order);
    Jet wj = Jet::constant((*w)(z), order);
    if (order > 0) {
      const Jet inv = reciprocal(a.jet(z, order - 1));
      wj = integrate(-(phi.jet(z, order - 1) * inv * inv), (*w)(z));
    }
    return aj * wj;
  };
  return {a, Shape("wronskian(" + phi.name() + "," + a.name() + ")", value, jet)};
}

std::array<Shape, 3> make_triple_family(const Shape& phi2, const Shape& a, Interval zdomain,
                                        double z0) {
  auto [g1, g2] = make_wronskian_pair(phi2, a, zdomain, z0);
  return {g1, g2, -phi2};
}

std::array<Shape, 4> make_quadruple_family(const Shape& phi3, const Shape& a, Interval zdomain,
                                           double z0) {
  const int n = 512;
  for (int i = 0; i <= n; ++i) {
    const double z = zdomain.lo + zdomain.width() * i / n;
    require(phi3(z) >= 0.0, ErrorKind::invalid_parameter,
            "quadruple family: phi3 must be nonnegative");
  }
  auto t = make_triple_family(phi3.sqrt(), a, zdomain, z0);
  std::array<Shape, 4> out{t[0], t[1], t[2], -phi3};

  const double zm = 0.5 * (zdomain.lo + zdomain.hi);
  const CostFunction test = calibration_cost(zm);
  double b = 0.0;
  try {
    b = iterated_bracket(test, {out[0], out[1], out[2], out[3]}, {1, 2, 3, 4}, 0.0);
  } catch (const Error& e) {
    fail(ErrorKind::calibration, std::string("quadruple family: ") + e.what());
  }
  const double p = phi3(zm);
  const double target = -p * p * derivative(test, 3, 0.0);
  if (std::abs(b - target) > 1e-6 * std::max(std::abs(target), 1e-12))
    fail(ErrorKind::calibration, "quadruple family does not reproduce -phi3^2 J'''");
  return out;
}

}  // namespace liees
