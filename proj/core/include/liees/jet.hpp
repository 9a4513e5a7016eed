#pragma once

// Truncated Taylor series in one variable. c[k] holds f^(k)(x0)/k!.
// Arithmetic is exact up to the tracked order, which lets nested Lie
// brackets be evaluated without stacking finite differences.

#include <algorithm>
#include <array>
#include <cmath>

namespace liees {

inline constexpr int kMaxJetOrder = 4;

struct Jet {
  std::array<double, kMaxJetOrder + 1> c{};
  int order = 0;

  static Jet constant(double v, int order) {
    Jet j;
    j.order = order;
    j.c[0] = v;
    return j;
  }

  /// Jet of the identity map at x0.
  static Jet variable(double x0, int order) {
    Jet j = constant(x0, order);
    if (order >= 1) j.c[1] = 1.0;
    return j;
  }

  /// Build from derivative values d[k] = f^(k)(x0), k = 0..order.
  static Jet from_derivatives(const double* d, int order) {
    Jet j;
    j.order = order;
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      j.c[k] = d[k] / fact;
    }
    return j;
  }

  double value() const { return c[0]; }

  double derivative(int k) const {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c[k] * fact;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.order = std::min(a.order, b.order);
  for (int k = 0; k <= r.order; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.order = std::min(a.order, b.order);
  for (int k = 0; k <= r.order; ++k) r.c[k] = a.c[k] - b.c[k];
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r = a;
  for (int k = 0; k <= r.order; ++k) r.c[k] = -r.c[k];
  return r;
}

inline Jet operator*(double s, const Jet& a) {
  Jet r = a;
  for (int k = 0; k <= r.order; ++k) r.c[k] *= s;
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.order = std::min(a.order, b.order);
  for (int k = 0; k <= r.order; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
    r.c[k] = s;
  }
  return r;
}

/// d/dx; loses one order.
inline Jet differentiate(const Jet& a) {
  Jet r;
  r.order = std::max(a.order - 1, 0);
  if (a.order == 0) return r;
  for (int k = 0; k <= r.order; ++k) r.c[k] = (k + 1) * a.c[k + 1];
  return r;
}

/// Antiderivative with value c0 at the expansion point; gains one order.
inline Jet integrate(const Jet& a, double c0) {
  Jet r;
  r.order = std::min(a.order + 1, kMaxJetOrder);
  r.c[0] = c0;
  for (int k = 1; k <= r.order; ++k) r.c[k] = a.c[k - 1] / k;
  return r;
}

/// outer o inner, where outer is expanded at inner.value().
inline Jet compose(const Jet& outer, const Jet& inner) {
  const int order = std::min(outer.order, inner.order);
  Jet delta = inner;
  delta.order = order;
  delta.c[0] = 0.0;
  Jet r = Jet::constant(outer.c[0], order);
  Jet power = Jet::constant(1.0, order);
  for (int j = 1; j <= order; ++j) {
    power = power * delta;
    r = r + outer.c[j] * power;
  }
  return r;
}

inline Jet reciprocal(const Jet& a) {
  Jet r;
  r.order = a.order;
  r.c[0] = 1.0 / a.c[0];
  for (int k = 1; k <= a.order; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += a.c[i] * r.c[k - i];
    r.c[k] = -s / a.c[0];
  }
  return r;
}

inline Jet sqrt(const Jet& a) {
  Jet r;
  r.order = a.order;
  r.c[0] = std::sqrt(a.c[0]);
  for (int k = 1; k <= a.order; ++k) {
    double s = a.c[k];
    for (int i = 1; i < k; ++i) s -= r.c[i] * r.c[k - i];
    r.c[k] = s / (2.0 * r.c[0]);
  }
  return r;
}

/// Scalar Lie bracket [f,g] = g' f - f' g.
inline Jet bracket(const Jet& f, const Jet& g) {
  return differentiate(g) * f - differentiate(f) * g;
}

inline bool is_finite(const Jet& a) {
  for (int k = 0; k <= a.order; ++k)
    if (!std::isfinite(a.c[k])) return false;
  return true;
}

}  // namespace liees
