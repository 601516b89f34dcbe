#pragma once

// Normal coordinates (z3, z4) around the straight equilibrium, the functional
// zeta = x - c1 z3 z4 - c2 z4^2 / 2, and the obstruction constant c0.
//
//   z4 = alpha / b4
//   z3 = s (b4 theta - b3 alpha),   s = 8 (m1 - m2) / (a2 (m1 + m2) b4^2)
//
// The 1 / b4^2 factor normalizes z3 so that z3' = z4 (1 + ...) and
// z4' = h_perp - a2 z4 + ...; in these coordinates the coefficient of z4^2 in
// zeta' is c0 = c3 + a2 c2 - c1.

#include <optional>
#include <string>

#include "microswim/expansion.hpp"
#include "microswim/params.hpp"
#include "microswim/simulator.hpp"

namespace microswim {

/// Closed-form obstruction constant 108 kappa (m2^2 - m1^2)(eta - xi) / (ell^8 eta^3 xi).
double c0_closed_form(const PhysParams& p);

/// STLC(q) threshold 2 kappa |m1 + m2| / |m1 m2|.
double stlc_threshold(const PhysParams& p);

struct NormalState {
  double x = 0.0;
  double y = 0.0;
  double z3 = 0.0;
  double z4 = 0.0;
};

/// Linear change of coordinates (theta, alpha) -> (z3, z4). Throws
/// DegenerateParams when m1 == m2 or m1 + m2 == 0.
class NormalCoordinates {
 public:
  explicit NormalCoordinates(const PhysParams& p);

  NormalState to_normal(const SwimmerState& z) const;
  SwimmerState from_normal(const NormalState& n) const;
  double z3(double theta, double alpha) const { return scale_ * (b4_ * theta - b3_ * alpha); }
  double z4(double alpha) const { return alpha / b4_; }
  /// z3' = z4 u along any solution; returns u at a state and control.
  double z3_rate_factor(const SwimmerState& z, const ControlInput& c) const;
  /// Determinant of d(z3, z4)/d(theta, alpha).
  double determinant() const { return scale_; }

  double b3() const { return b3_; }
  double b4() const { return b4_; }
  double scale() const { return scale_; }
  const PhysParams& params() const { return p_; }

 private:
  PhysParams p_;
  double a2_ = 0.0;
  double b3_ = 0.0;
  double b4_ = 0.0;
  double scale_ = 0.0;
};

NormalState to_normal(const SwimmerState& z, const PhysParams& p);
SwimmerState from_normal(const NormalState& n, const PhysParams& p);

struct C123Options {
  double amplitude = 1e-3;       ///< base amplitude h of the sampling grid
  double max_residual = 1e-3;    ///< PoorFit threshold on the relative residual
};

struct C123Fit {
  double c1 = 0.0;  ///< coefficient of z3 h_perp in x'
  double c2 = 0.0;  ///< coefficient of z4 h_perp
  double c3 = 0.0;  ///< coefficient of z4^2
  double residual = 0.0;  ///< worst relative residual (even part of x) over the two amplitudes
  double richardson_change = 0.0;  ///< max |extrapolated - finest| over c1..c3
};

/// Identifies c1, c2, c3 by least squares of x' on {z4^2, z3 h_perp, z4 h_perp}
/// over the grid z3, z4 in {0, +-h/2, +-h} (each axis rescaled so theta and
/// alpha stay within +-h), controls in {0, +-h}^2, at
/// amplitudes h and h/2 with Richardson elimination of the O(h^2) bias.
/// Throws DegenerateParams, PoorFit.
C123Fit identify_c123(const PhysParams& p, const C123Options& opt = {});

struct DerivedConstants {
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
  /// Unavailable when the coordinate change is undefined.
  std::optional<double> c1, c2, c3;
  std::optional<double> c0_regression;  ///< c3 + a2 c2 - c1
  std::optional<double> fit_residual;
  double c0 = 0.0;  ///< closed form
  double q = 0.0;
  bool normal_coordinates_defined = false;
  std::string degeneracy;  ///< empty, "M1_eq_M2" or "M1_plus_M2_eq_0"
};

DerivedConstants derived_constants(const PhysParams& p, const C123Options& opt = {});

/// zeta = x - c1 z3 z4 - c2 z4^2 / 2 with regression-identified c1, c2.
class ZetaFunctional {
 public:
  explicit ZetaFunctional(const PhysParams& p, const C123Options& opt = {});
  ZetaFunctional(const NormalCoordinates& coords, double c1, double c2);

  double operator()(const SwimmerState& z) const;
  const NormalCoordinates& coordinates() const { return coords_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

 private:
  NormalCoordinates coords_;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

/// One-shot zeta; identifies c1, c2 on every call.
double zeta(const SwimmerState& z, const PhysParams& p);

struct ObstructionRatio {
  double delta_zeta = 0.0;
  double z4_energy = 0.0;         ///< integral of z4^2 dt
  std::optional<double> ratio;    ///< absent when z4_energy < energy_floor
};

inline constexpr double kDefaultEnergyFloor = 1e-14;

/// Delta zeta over the trajectory against the integral of z4^2, by composite
/// Simpson on the dense output (10 panels per step).
ObstructionRatio obstruction_ratio(const Trajectory& traj, const ZetaFunctional& zeta,
                                   double energy_floor = kDefaultEnergyFloor, int subdivisions = 10);

}  // namespace microswim
