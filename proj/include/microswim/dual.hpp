#pragma once

// Forward-mode dual numbers carrying N directional derivatives.

#include <array>
#include <cmath>

namespace microswim {

inline constexpr double value_of(double x) { return x; }

template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit like a scalar

  /// Independent variable number `index`.
  static constexpr Dual seed(double value, int index) {
    Dual r(value);
    r.d[index] = 1.0;
    return r;
  }

  constexpr double value() const { return v; }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator-(Dual a) {
    a.v = -a.v;
    for (auto& x : a.d) x = -x;
    return a;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const double inv = 1.0 / b.v;
    Dual r(a.v * inv);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
    return r;
  }
};

template <int N>
Dual<N> sin(const Dual<N>& x) {
  Dual<N> r(std::sin(x.v));
  const double c = std::cos(x.v);
  for (int i = 0; i < N; ++i) r.d[i] = c * x.d[i];
  return r;
}

template <int N>
Dual<N> cos(const Dual<N>& x) {
  Dual<N> r(std::cos(x.v));
  const double s = -std::sin(x.v);
  for (int i = 0; i < N; ++i) r.d[i] = s * x.d[i];
  return r;
}

template <int N>
constexpr double value_of(const Dual<N>& x) {
  return x.v;
}

}  // namespace microswim
