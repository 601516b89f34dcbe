#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "microswim/model.hpp"
#include "microswim/params.hpp"

namespace microswim::test {

/// Random valid parameter sets with xi != eta, m1 != m2 and m1 + m2 != 0
/// bounded away from equality.
inline std::vector<PhysParams> random_params(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<PhysParams> out;
  while (static_cast<int>(out.size()) < n) {
    PhysParams p;
    p.ell = 0.7 + 0.8 * U(rng);
    p.xi = 0.5 + U(rng);
    const double ratio = U(rng) < 0.75 ? 1.3 + 1.2 * U(rng) : 0.4 + 0.4 * U(rng);
    p.eta = p.xi * ratio;
    p.kappa = 0.5 + 1.5 * U(rng);
    p.m1 = (U(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * U(rng));
    p.m2 = (U(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * U(rng));
    if (std::abs(p.m1 - p.m2) < 0.2 || std::abs(p.m1 + p.m2) < 0.2) continue;
    out.push_back(validate_params(p));
  }
  return out;
}

/// Cholesky succeeds and the matrix is symmetric.
inline bool is_spd(const Mat<double, 4, 4>& a) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (std::abs(a[i][j] - a[j][i]) > 1e-14 * (std::abs(a[i][j]) + 1.0)) return false;
  Mat<double, 4, 4> l{};
  for (int j = 0; j < 4; ++j) {
    double d = a[j][j];
    for (int k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > 0.0)) return false;
    l[j][j] = std::sqrt(d);
    for (int i = j + 1; i < 4; ++i) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return true;
}

template <std::size_t N>
double max_abs(const std::array<double, N>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diff(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace microswim::test
