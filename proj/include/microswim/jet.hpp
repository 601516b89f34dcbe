#pragma once

// Truncated Taylor series in one variable. A Jet<N> holds the coefficients
// c[0..N] of a polynomial in a small parameter h; arithmetic is exact modulo
// h^(N+1). Evaluating a function at Jet<N>::variable(x0) yields its Taylor
// coefficients at x0 up to order N.

#include <array>
#include <cmath>
#include <cstddef>

namespace microswim {

template <int N>
struct Jet {
  static_assert(N >= 0);
  std::array<double, N + 1> c{};

  constexpr Jet() = default;
  constexpr Jet(double constant) { c[0] = constant; }  // NOLINT: implicit by design of scalar code

  static constexpr Jet variable(double x0) {
    Jet j(x0);
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  constexpr double value() const { return c[0]; }
  constexpr double operator[](std::size_t k) const { return c[k]; }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& v : a.c) v = -v;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= N; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
      r.c[k] = s;
    }
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    for (int k = 0; k <= N; ++k) {
      double s = a.c[k];
      for (int i = 1; i <= k; ++i) s -= b.c[i] * q.c[k - i];
      q.c[k] = s / b.c[0];
    }
    return q;
  }
};

template <int N>
Jet<N> sin(const Jet<N>& x);
template <int N>
Jet<N> cos(const Jet<N>& x);

namespace detail {
// sin and cos of a series, from s' = c x', c' = -s x'.
template <int N>
void sincos(const Jet<N>& x, Jet<N>& s, Jet<N>& co) {
  s.c[0] = std::sin(x.c[0]);
  co.c[0] = std::cos(x.c[0]);
  for (int k = 1; k <= N; ++k) {
    double ss = 0.0, cc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * x.c[j] * co.c[k - j];
      cc -= j * x.c[j] * s.c[k - j];
    }
    s.c[k] = ss / k;
    co.c[k] = cc / k;
  }
}
}  // namespace detail

template <int N>
Jet<N> sin(const Jet<N>& x) {
  Jet<N> s, c;
  detail::sincos(x, s, c);
  return s;
}

template <int N>
Jet<N> cos(const Jet<N>& x) {
  Jet<N> s, c;
  detail::sincos(x, s, c);
  return c;
}

template <int N>
constexpr double value_of(const Jet<N>& x) {
  return x.value();
}

}  // namespace microswim
