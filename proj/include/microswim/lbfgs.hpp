#pragma once

// Limited-memory BFGS with backtracking Armijo line search.

#include <cmath>
#include <deque>
#include <functional>
#include <vector>

namespace microswim {

struct LbfgsOptions {
  int memory = 8;
  int max_iterations = 200;
  double gradient_tol = 1e-9;  ///< stop when ||g||_inf <= tol * max(1, |f|)
  double relative_decrease_tol = 1e-13;
  int stall_iterations = 5;  ///< consecutive small decreases before stopping
  double armijo = 1e-4;
  int max_backtracks = 40;
};

struct LbfgsResult {
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Objective callback: returns f(x) and writes the gradient into g.
using ObjectiveFn = std::function<double(const std::vector<double>& x, std::vector<double>& g)>;

inline LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, std::vector<double>& x, const LbfgsOptions& opt = {}) {
  const std::size_t n = x.size();
  const auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  };
  const auto inf_norm = [](const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  };

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> hist;

  LbfgsResult res;
  int stalls = 0;
  std::vector<double> g(n), gn(n), xn(n), d(n);
  double f = fn(x, g);
  ++res.evaluations;

  for (; res.iterations < opt.max_iterations; ++res.iterations) {
    if (!std::isfinite(f)) break;
    if (inf_norm(g) <= opt.gradient_tol * std::max(1.0, std::abs(f))) {
      res.converged = true;
      break;
    }

    // Two-loop recursion.
    d = g;
    std::vector<double> alpha(hist.size());
    for (std::size_t k = hist.size(); k-- > 0;) {
      alpha[k] = hist[k].rho * dot(hist[k].s, d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * hist[k].y[i];
    }
    if (!hist.empty()) {
      const Pair& last = hist.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : d) v *= gamma;
    } else {
      const double gn0 = inf_norm(g);
      for (double& v : d) v /= gn0;
    }
    for (std::size_t k = 0; k < hist.size(); ++k) {
      const double beta = hist[k].rho * dot(hist[k].y, d);
      for (std::size_t i = 0; i < n; ++i) d[i] += hist[k].s[i] * (alpha[k] - beta);
    }
    for (double& v : d) v = -v;

    double slope = dot(g, d);
    if (slope >= 0.0) {
      // Not a descent direction: reset memory and fall back to steepest descent.
      hist.clear();
      const double gn0 = inf_norm(g);
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] / gn0;
      slope = dot(g, d);
    }

    double step = 1.0;
    double fnew = 0.0;
    bool accepted = false;
    for (int b = 0; b < opt.max_backtracks; ++b, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
      fnew = fn(xn, gn);
      ++res.evaluations;
      if (std::isfinite(fnew) && fnew <= f + opt.armijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    Pair pr{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pr.s[i] = xn[i] - x[i];
      pr.y[i] = gn[i] - g[i];
    }
    const double sy = dot(pr.s, pr.y);
    if (sy > 1e-16 * std::sqrt(dot(pr.s, pr.s) * dot(pr.y, pr.y))) {
      pr.rho = 1.0 / sy;
      hist.push_back(std::move(pr));
      if (static_cast<int>(hist.size()) > opt.memory) hist.pop_front();
    }

    const double decrease = f - fnew;
    x = xn;
    g = gn;
    f = fnew;
    stalls = decrease <= opt.relative_decrease_tol * std::max(1.0, std::abs(f)) ? stalls + 1 : 0;
    if (stalls >= opt.stall_iterations) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  res.value = f;
  return res;
}

}  // namespace microswim
