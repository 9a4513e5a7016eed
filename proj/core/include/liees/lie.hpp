#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liees/costs.hpp"
#include "liees/jet.hpp"

namespace liees {

/// Scalar map g acting on the cost value z = J(x), with Taylor jets.
class Shape {
 public:
  using ValueFn = std::function<double(double)>;
  using JetFn = std::function<Jet(double, int)>;

  Shape();  // constant zero
  Shape(std::string name, ValueFn value, JetFn jet,
        std::optional<double> constant = std::nullopt);

  static Shape constant(double c = 1.0);
  static Shape linear(double gain = 1.0);
  static Shape neg_linear(double gain = 1.0);
  /// c0 + c1 z + ... (coefficients in increasing degree).
  static Shape polynomial(std::vector<double> coeffs);
  static Shape sine(double gain = 1.0);
  static Shape cosine(double gain = 1.0);
  /// Jets by finite differences of f.
  static Shape from_function(std::string name, ValueFn f);
  /// "linear", "constant", "sin", "cos", "neg-linear"; gain multiplies.
  static Shape by_name(const std::string& name, double gain = 1.0);

  double operator()(double z) const { return impl_->value(z); }
  Jet jet(double z, int order) const { return impl_->jet(z, order); }
  const std::string& name() const { return impl_->name; }
  /// Set when the shape is known to be constant.
  std::optional<double> constant_value() const { return impl_->constant; }

  Shape operator-() const;
  Shape scaled(double k) const;
  /// Elementwise square root; values must be nonnegative.
  Shape sqrt() const;

 private:
  struct Impl {
    std::string name;
    ValueFn value;
    JetFn jet;
    std::optional<double> constant;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Field value at x is shape(J(x)).
struct ScalarField {
  Shape shape;
  CostFunction cost;

  double operator()(double x) const { return shape(cost.eval(x)); }
};

/// Jet of J at x up to the given order.
Jet cost_jet(const CostFunction& cost, double x, int order);
/// Jet of shape o J at x.
Jet field_jet(const Shape& shape, const CostFunction& cost, double x, int order);
inline Jet field_jet(const ScalarField& f, double x, int order) {
  return field_jet(f.shape, f.cost, x, order);
}

/// Right-iterated multi-index (1-based), read as [[..[g_i1,g_i2],..],g_il].
struct BracketIndex {
  std::vector<int> idx;

  BracketIndex() = default;
  BracketIndex(std::initializer_list<int> l) : idx(l) {}
  explicit BracketIndex(std::vector<int> v) : idx(std::move(v)) {}

  int length() const { return static_cast<int>(idx.size()); }
  std::string str() const;  // "1.2.2"
  static BracketIndex parse(const std::string& s);
  bool operator==(const BracketIndex&) const = default;
  auto operator<=>(const BracketIndex&) const = default;
};

/// (dg/dx) f - (df/dx) g at x.
double bracket2(const ScalarField& f, const ScalarField& g, double x);

double iterated_bracket(const std::vector<ScalarField>& fields, const BracketIndex& idx,
                        double x);
/// Shapes share one cost.
double iterated_bracket(const CostFunction& cost, const std::vector<Shape>& shapes,
                        const BracketIndex& idx, double x);
/// Jet of the bracket field at x, to the given order.
Jet iterated_bracket_jet(const CostFunction& cost, const std::vector<Shape>& shapes,
                         const BracketIndex& idx, double x, int order);

/// (s c z, 1) with s fixed so that the length-N bracket (1,2,..,2) is -c J^(N-1).
std::pair<Shape, Shape> make_generating_pair(int N, double gain);

/// (a, b) with a b' - a' b = -phi, b = a (C - int_{z0}^z phi / a^2), C = 0.
/// zdomain is the range of cost values on which a must not vanish.
std::pair<Shape, Shape> make_wronskian_pair(const Shape& phi, const Shape& a, Interval zdomain,
                                            double z0 = 0.0);

/// Wronskian pair for phi2 and g3 = -phi2; the triple bracket is -phi2(J)^2 J''.
std::array<Shape, 3> make_triple_family(const Shape& phi2, const Shape& a, Interval zdomain,
                                        double z0 = 0.0);

/// Triple family with phi2 = sqrt(phi3) and g4 = -phi3; the length-4
/// bracket is -phi3(J)^2 J'''.
std::array<Shape, 4> make_quadruple_family(const Shape& phi3, const Shape& a, Interval zdomain,
                                           double z0 = 0.0);

}  // namespace liees
