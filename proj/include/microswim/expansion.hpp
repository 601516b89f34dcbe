#pragma once

// Taylor coefficients of one-variable functions at 0, computed twice: by
// central finite differences with Richardson extrapolation and by truncated
// power-series arithmetic. The two must agree.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "microswim/errors.hpp"
#include "microswim/jet.hpp"
#include "microswim/model.hpp"
#include "microswim/params.hpp"

namespace microswim {

inline constexpr int kMaxTaylorOrder = 4;

struct TaylorOptions {
  double base_step = 1e-3;  ///< step for orders <= 2; larger orders use coarser steps
  int richardson_levels = 3;
  double consistency_tol = 1e-6;  ///< relative agreement required between methods
  double absolute_floor = 0.0;    ///< absolute agreement always accepted (vanishing coefficients)
};

struct TaylorEstimate {
  double value = 0.0;          ///< series-arithmetic coefficient
  double error = 0.0;          ///< |fd - series| + Richardson residual
  double finite_difference = 0.0;
  double richardson_residual = 0.0;
  double roundoff = 0.0;  ///< rounding-error bound of the finest stencil
};

namespace detail {

double factorial(int k);
double stencil_step(int order, const TaylorOptions& opt);

/// Central-difference approximation of the order-th derivative at 0.
template <class F>
std::pair<double, double> central_difference(F& f, int order, double h) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto fd = [&](double x) { return static_cast<double>(f(x)); };
  switch (order) {
    case 0: {
      const double v = fd(0.0);
      return {v, eps * std::abs(v)};
    }
    case 1: {
      const double a = fd(h), b = fd(-h);
      return {(a - b) / (2 * h), eps * (std::abs(a) + std::abs(b)) / (2 * h)};
    }
    case 2: {
      const double a = fd(h), m = fd(0.0), b = fd(-h);
      return {(a - 2 * m + b) / (h * h), eps * (std::abs(a) + 2 * std::abs(m) + std::abs(b)) / (h * h)};
    }
    case 3: {
      const double a2 = fd(2 * h), a1 = fd(h), b1 = fd(-h), b2 = fd(-2 * h);
      return {(a2 - 2 * a1 + 2 * b1 - b2) / (2 * h * h * h),
              eps * (std::abs(a2) + 2 * std::abs(a1) + 2 * std::abs(b1) + std::abs(b2)) / (2 * h * h * h)};
    }
    default: {
      const double a2 = fd(2 * h), a1 = fd(h), m = fd(0.0), b1 = fd(-h), b2 = fd(-2 * h);
      const double h4 = h * h * h * h;
      return {(a2 - 4 * a1 + 6 * m - 4 * b1 + b2) / h4,
              eps * (std::abs(a2) + 4 * std::abs(a1) + 6 * std::abs(m) + 4 * std::abs(b1) + std::abs(b2)) / h4};
    }
  }
}

}  // namespace detail

/// order-th Taylor coefficient of f at 0. `f` must be callable with double
/// and with Jet<kMaxTaylorOrder>. Throws InconsistentMethods when the two
/// routes disagree beyond `consistency_tol` (relative, with floors at the
/// stencil's rounding error and at `absolute_floor`).
template <class F>
TaylorEstimate taylor_coeff(F&& f, int order, const TaylorOptions& opt = {}) {
  if (order < 0 || order > kMaxTaylorOrder)
    throw InvalidArgument("taylor order must be in [0, " + std::to_string(kMaxTaylorOrder) + "]");

  const auto series = f(Jet<kMaxTaylorOrder>::variable(0.0));
  const double exact = series[static_cast<std::size_t>(order)];

  // Richardson table over h, h/2, h/4, ...; error expansion in even powers of h.
  const double fact = detail::factorial(order);
  const int levels = std::max(1, opt.richardson_levels);
  std::vector<std::vector<double>> table(levels);
  double roundoff = 0.0;
  double h = detail::stencil_step(order, opt);
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    const auto [d, r] = detail::central_difference(f, order, h);
    table[i].push_back(d / fact);
    roundoff = r / fact;
    double pow4 = 4.0;
    for (int j = 1; j <= i; ++j, pow4 *= 4.0)
      table[i].push_back((pow4 * table[i][j - 1] - table[i - 1][j - 1]) / (pow4 - 1.0));
  }
  const double extrapolated = table.back().back();
  const double residual =
      levels > 1 ? std::abs(extrapolated - table[levels - 2].back()) : std::abs(extrapolated);

  TaylorEstimate est;
  est.value = exact;
  est.finite_difference = extrapolated;
  est.richardson_residual = residual;
  est.roundoff = roundoff;
  const double gap = std::abs(extrapolated - exact);
  est.error = gap + residual;
  const double allowed = std::max({opt.consistency_tol * std::abs(exact), 64.0 * roundoff, opt.absolute_floor});
  if (gap > allowed)
    throw InconsistentMethods("taylor order " + std::to_string(order) + ": finite differences give " +
                              std::to_string(extrapolated) + ", series arithmetic " + std::to_string(exact));
  return est;
}

/// Closed-form expansion constants of the f-table around alpha = 0.
struct ExpansionConstants {
  double a1, a2, b1, b2, b3, b4;
};
ExpansionConstants closed_form_constants(const PhysParams& p);

enum class CheckStatus { pass, fail, inconclusive };
const char* to_string(CheckStatus s);

/// One coefficient claim: f_{channel, component}(alpha) has the given Taylor
/// coefficient of the given order.
struct CoefficientCheck {
  int channel = 0;
  int component = 0;  ///< 1-based, matching f_{i,j}
  int order = 0;
  std::string symbol;  ///< closed-form symbol ("0", "a1", "a2/2", ...)
  double computed = 0.0;
  double closed_form = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double error_estimate = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::pass;
  std::string id() const;
};

/// Remainder claim f(alpha) - truncation = O(alpha^(k+1)), checked by a
/// log-log fit over alpha in [1e-4, 1e-1].
struct RemainderCheck {
  int channel = 0;
  int component = 0;
  int truncation_order = 0;  ///< k: terms up to alpha^k are subtracted
  double fitted_slope = 0.0;
  double fitted_constant = 0.0;
  bool identically_zero = false;
  CheckStatus status = CheckStatus::pass;
  std::string id() const;
};

struct ConstantCheck {
  std::string name;
  double computed = 0.0;
  double closed_form = 0.0;
  double rel_error = 0.0;
  CheckStatus status = CheckStatus::pass;
};

struct TaylorReport {
  PhysParams params;
  std::vector<CoefficientCheck> coefficients;
  std::vector<RemainderCheck> remainders;  ///< one per f_{i,j}: 12 entries
  std::vector<ConstantCheck> constants;    ///< a1, a2, b1, b2, b3, b4
  std::vector<std::string> notices;        ///< e.g. "degenerate: b4=0"
  bool all_pass() const;
  /// First failing or inconclusive check id, empty when all pass.
  std::string first_failure() const;
};

struct ExpansionOptions {
  TaylorOptions taylor{};
  double match_rel_tol = 1e-6;    ///< closed-form match, relative
  double zero_abs_tol = 1e-10;    ///< vanishing claims, times the coefficient scale
  double slope_margin = 0.9;      ///< required slope >= k + margin
  ReferencePoint reference = kDefaultReference;
};

/// Verifies every expansion claim for the model's f-table at alpha = 0.
TaylorReport expansion_report(const PhysParams& p, const ExpansionOptions& opt = {});

/// Throws OracleMismatch naming the first failing check.
void require_expansion_match(const TaylorReport& report);

}  // namespace microswim
