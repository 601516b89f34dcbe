#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace microswim {

/// Physical constants of a two-link swimmer whose links share length and
/// drag coefficients.
struct PhysParams {
  double ell = 1.0;    ///< link length
  double xi = 1.0;     ///< longitudinal drag per unit length
  double eta = 2.0;    ///< transversal drag per unit length
  double kappa = 1.0;  ///< elastic joint stiffness
  double m1 = 1.0;     ///< signed magnetization of the tail link
  double m2 = 2.0;     ///< signed magnetization of the head link

  friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

/// Checks the sign constraints and returns the parameter set unchanged.
/// Throws NonPositiveParameter or ZeroMagnetization naming the first
/// offending field (in declaration order).
PhysParams validate_params(double ell, double xi, double eta, double kappa, double m1, double m2);
PhysParams validate_params(const PhysParams& p);

/// Configuration (x, y, theta, alpha). Angles are unwrapped.
struct SwimmerState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double alpha = 0.0;

  std::array<double, 4> to_array() const { return {x, y, theta, alpha}; }
  static SwimmerState from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
  friend bool operator==(const SwimmerState&, const SwimmerState&) = default;
};

/// Magnetic field coordinates in the frame of the head link.
struct ControlInput {
  double h_perp = 0.0;
  double h_par = 0.0;

  /// Sup-norm, the norm used for all control bounds.
  double norm() const { return std::max(std::abs(h_perp), std::abs(h_par)); }
  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

/// Reference parameter set used throughout tests and examples:
/// (ell, xi, eta, kappa, m1, m2) = (1, 1, 2, 1, 1, 2).
inline constexpr PhysParams kReferenceParams{1.0, 1.0, 2.0, 1.0, 1.0, 2.0};

}  // namespace microswim
