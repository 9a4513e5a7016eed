#include <cmath>
#include <sstream>

#include "liees/lie.hpp"

namespace liees {

namespace {

double inv_factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return 1.0 / f;
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Shape::Shape() : Shape(Shape::constant(0.0)) {}

Shape::Shape(std::string name, ValueFn value, JetFn jet, std::optional<double> constant)
    : impl_(std::make_shared<const Impl>(
          Impl{std::move(name), std::move(value), std::move(jet), constant})) {}

Shape Shape::constant(double c) {
  return Shape(
      num(c), [c](double) { return c; },
      [c](double, int order) { return Jet::constant(c, order); }, c);
}

Shape Shape::linear(double gain) {
  return Shape(
      gain == 1.0 ? "z" : num(gain) + "*z", [gain](double z) { return gain * z; },
      [gain](double z, int order) { return gain * Jet::variable(z, order); });
}

Shape Shape::neg_linear(double gain) {
  Shape s = linear(-gain);
  return Shape(gain == 1.0 ? "-z" : "-" + num(gain) + "*z", s.impl_->value, s.impl_->jet);
}

Shape Shape::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  std::ostringstream name;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) name << " + ";
    name << coeffs[i];
    if (i) name << "*z^" << i;
  }
  auto value = [coeffs](double z) {
    double v = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * z + coeffs[i];
    return v;
  };
  // Taylor coefficients at z: sum_i c_i binom(i,k) z^(i-k).
  auto jet = [coeffs](double z, int order) {
    Jet j;
    j.order = order;
    for (int k = 0; k <= order; ++k) {
      double s = 0.0;
      for (std::size_t i = k; i < coeffs.size(); ++i) {
        double binom = 1.0;
        for (int r = 0; r < k; ++r) binom = binom * double(i - r) / double(r + 1);
        s += coeffs[i] * binom * std::pow(z, double(i - k));
      }
      j.c[k] = s;
    }
    return j;
  };
  std::optional<double> constant;
  bool all_zero = true;
  for (std::size_t i = 1; i < coeffs.size(); ++i) all_zero = all_zero && coeffs[i] == 0.0;
  if (all_zero) constant = coeffs[0];
  return Shape(name.str(), value, jet, constant);
}

Shape Shape::sine(double gain) {
  return Shape(
      gain == 1.0 ? "sin" : num(gain) + "*sin", [gain](double z) { return gain * std::sin(z); },
      [gain](double z, int order) {
        const double d[4] = {std::sin(z), std::cos(z), -std::sin(z), -std::cos(z)};
        Jet j;
        j.order = order;
        for (int k = 0; k <= order; ++k) j.c[k] = gain * d[k % 4] * inv_factorial(k);
        return j;
      });
}

Shape Shape::cosine(double gain) {
  return Shape(
      gain == 1.0 ? "cos" : num(gain) + "*cos", [gain](double z) { return gain * std::cos(z); },
      [gain](double z, int order) {
        const double d[4] = {std::cos(z), -std::sin(z), -std::cos(z), std::sin(z)};
        Jet j;
        j.order = order;
        for (int k = 0; k <= order; ++k) j.c[k] = gain * d[k % 4] * inv_factorial(k);
        return j;
      });
}

Shape Shape::from_function(std::string name, ValueFn f) {
  require(static_cast<bool>(f), ErrorKind::invalid_parameter, "shape: empty function");
  auto jet = [f](double z, int order) {
    Jet j;
    j.order = order;
    j.c[0] = f(z);
    for (int k = 1; k <= order; ++k) j.c[k] = finite_difference(f, k, z) * inv_factorial(k);
    return j;
  };
  return Shape(std::move(name), f, jet);
}

Shape Shape::by_name(const std::string& name, double gain) {
  if (name == "linear") return linear(gain);
  if (name == "constant") return constant(gain);
  if (name == "sin") return sine(gain);
  if (name == "cos") return cosine(gain);
  if (name == "neg-linear") return neg_linear(gain);
  fail(ErrorKind::invalid_parameter, "unknown shape '" + name + "'");
}

Shape Shape::operator-() const {
  auto self = impl_;
  std::optional<double> c;
  if (self->constant) c = -*self->constant;
  return Shape(
      "-(" + self->name + ")", [self](double z) { return -self->value(z); },
      [self](double z, int order) { return -self->jet(z, order); }, c);
}

Shape Shape::scaled(double k) const {
  auto self = impl_;
  std::optional<double> c;
  if (self->constant) c = k * *self->constant;
  return Shape(
      num(k) + "*(" + self->name + ")", [self, k](double z) { return k * self->value(z); },
      [self, k](double z, int order) { return k * self->jet(z, order); }, c);
}

Shape Shape::sqrt() const {
  auto self = impl_;
  if (self->constant) {
    require(*self->constant >= 0.0, ErrorKind::invalid_parameter,
            "shape sqrt: negative constant");
    Shape s = constant(std::sqrt(*self->constant));
    return s;
  }
  return Shape(
      "sqrt(" + self->name + ")", [self](double z) { return std::sqrt(self->value(z)); },
      [self](double z, int order) { return liees::sqrt(self->jet(z, order)); });
}

}  // namespace liees
