#include "microswim/transform.hpp"

#include <array>
#include <cmath>

#include "microswim/errors.hpp"
#include "microswim/model.hpp"

namespace microswim {

double c0_closed_form(const PhysParams& p) {
  const double l8 = std::pow(p.ell, 8);
  return 108.0 * p.kappa / (l8 * p.eta * p.eta * p.eta * p.xi) * (p.m2 * p.m2 - p.m1 * p.m1) * (p.eta - p.xi);
}

double stlc_threshold(const PhysParams& p) {
  return 2.0 * p.kappa * std::abs(p.m1 + p.m2) / std::abs(p.m1 * p.m2);
}

NormalCoordinates::NormalCoordinates(const PhysParams& params) : p_(validate_params(params)) {
  if (p_.m1 == p_.m2) throw DegenerateParams("M1_eq_M2: b4 = 0, normal coordinates undefined");
  if (p_.m1 + p_.m2 == 0.0) throw DegenerateParams("M1_plus_M2_eq_0: normal coordinates undefined");
  const ExpansionConstants c = closed_form_constants(p_);
  a2_ = c.a2;
  b3_ = c.b3;
  b4_ = c.b4;
  scale_ = 8.0 * (p_.m1 - p_.m2) / (a2_ * (p_.m1 + p_.m2)) / (b4_ * b4_);
}

NormalState NormalCoordinates::to_normal(const SwimmerState& z) const {
  return {z.x, z.y, z3(z.theta, z.alpha), z4(z.alpha)};
}

SwimmerState NormalCoordinates::from_normal(const NormalState& n) const {
  const double alpha = b4_ * n.z4;
  const double theta = n.z3 / (scale_ * b4_) + b3_ * n.z4;
  return {n.x, n.y, theta, alpha};
}

double NormalCoordinates::z3_rate_factor(const SwimmerState& z, const ControlInput& c) const {
  // z3' vanishes with alpha and does not depend on theta, so z3' / z4 extends
  // smoothly through alpha = 0 as b4 d(z3')/d(alpha).
  if (std::abs(z.alpha) > 1e-6) {
    const auto r = dynamics(z, c, p_);
    return scale_ * (b4_ * r[2] - b3_ * r[3]) / z4(z.alpha);
  }
  const DynamicsJacobian j = dynamics_jacobian(z.to_array(), c, p_);
  return b4_ * scale_ * (b4_ * j.d_state[2][3] - b3_ * j.d_state[3][3]);
}

NormalState to_normal(const SwimmerState& z, const PhysParams& p) { return NormalCoordinates(p).to_normal(z); }

SwimmerState from_normal(const NormalState& n, const PhysParams& p) { return NormalCoordinates(p).from_normal(n); }

namespace {

struct RawFit {
  std::array<double, 3> c{};  // c1, c2, c3
  double residual = 0.0;
};

RawFit fit_at(const NormalCoordinates& nc, const PhysParams& p, double h) {
  // Axes scaled so that the angles stay within +-h: z3 and z4 carry the units
  // of the coordinate change and can be far from O(1) in theta and alpha.
  const double s3 = std::abs(nc.scale() * nc.b4());
  const double s4 = 1.0 / std::abs(nc.b4());
  const std::array<double, 5> grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const std::array<double, 3> us = {-h, 0.0, h};
  // Normal equations for x' ~ c1 z3 Hp + c2 z4 Hp + c3 z4^2, fitted to the
  // even part of x'. On this symmetric grid the odd part is orthogonal to the
  // basis anyway; dropping it keeps the residual a test for missing quadratic terms.
  double ata[3][3] = {};
  double aty[3] = {};
  std::vector<std::pair<std::array<double, 3>, double>> rows;
  rows.reserve(grid.size() * grid.size() * us.size() * us.size());
  for (double g3 : grid)
    for (double g4 : grid)
      for (double hp : us)
        for (double hq : us) {
          const double z3 = g3 * h * s3;
          const double z4 = g4 * h * s4;
          const SwimmerState s = nc.from_normal({0.0, 0.0, z3, z4});
          const SwimmerState m = nc.from_normal({0.0, 0.0, -z3, -z4});
          const double xdot = 0.5 * (dynamics(s, {hp, hq}, p)[0] + dynamics(m, {-hp, -hq}, p)[0]);
          const std::array<double, 3> a = {z3 * hp, z4 * hp, z4 * z4};
          for (int i = 0; i < 3; ++i) {
            aty[i] += a[i] * xdot;
            for (int j = 0; j < 3; ++j) ata[i][j] += a[i] * a[j];
          }
          rows.emplace_back(a, xdot);
        }

  // 3x3 solve by Cramer's rule.
  const auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det3(ata);
  RawFit out;
  for (int k = 0; k < 3; ++k) {
    double m[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = j == k ? aty[i] : ata[i][j];
    out.c[k] = det3(m) / d;
  }

  double rss = 0.0, yy = 0.0;
  for (const auto& [a, y] : rows) {
    const double r = y - (out.c[0] * a[0] + out.c[1] * a[1] + out.c[2] * a[2]);
    rss += r * r;
    yy += y * y;
  }
  out.residual = yy > 0.0 ? std::sqrt(rss / yy) : 0.0;
  return out;
}

}  // namespace

C123Fit identify_c123(const PhysParams& params, const C123Options& opt) {
  const PhysParams p = validate_params(params);
  const NormalCoordinates nc(p);
  if (!(opt.amplitude > 0.0)) throw InvalidArgument("regression amplitude must be positive");

  const RawFit coarse = fit_at(nc, p, opt.amplitude);
  const RawFit fine = fit_at(nc, p, opt.amplitude / 2);
  C123Fit out;
  out.residual = std::max(coarse.residual, fine.residual);
  std::array<double, 3> ext{};
  for (int k = 0; k < 3; ++k) {
    ext[k] = (4.0 * fine.c[k] - coarse.c[k]) / 3.0;
    out.richardson_change = std::max(out.richardson_change, std::abs(ext[k] - fine.c[k]));
  }
  out.c1 = ext[0];
  out.c2 = ext[1];
  out.c3 = ext[2];
  if (out.residual > opt.max_residual)
    throw PoorFit("c1..c3 regression residual " + std::to_string(out.residual) + " exceeds " +
                  std::to_string(opt.max_residual));
  return out;
}

DerivedConstants derived_constants(const PhysParams& params, const C123Options& opt) {
  const PhysParams p = validate_params(params);
  const ExpansionConstants cf = closed_form_constants(p);
  DerivedConstants d;
  d.a1 = cf.a1;
  d.a2 = cf.a2;
  d.b1 = cf.b1;
  d.b2 = cf.b2;
  d.b3 = cf.b3;
  d.b4 = cf.b4;
  d.c0 = c0_closed_form(p);
  d.q = stlc_threshold(p);
  if (p.m1 == p.m2) {
    d.degeneracy = "M1_eq_M2";
    return d;
  }
  if (p.m1 + p.m2 == 0.0) {
    d.degeneracy = "M1_plus_M2_eq_0";
    return d;
  }
  const C123Fit fit = identify_c123(p, opt);
  d.normal_coordinates_defined = true;
  d.c1 = fit.c1;
  d.c2 = fit.c2;
  d.c3 = fit.c3;
  d.c0_regression = fit.c3 + cf.a2 * fit.c2 - fit.c1;
  d.fit_residual = fit.residual;
  return d;
}

ZetaFunctional::ZetaFunctional(const PhysParams& p, const C123Options& opt) : coords_(p) {
  const C123Fit fit = identify_c123(p, opt);
  c1_ = fit.c1;
  c2_ = fit.c2;
}

ZetaFunctional::ZetaFunctional(const NormalCoordinates& coords, double c1, double c2)
    : coords_(coords), c1_(c1), c2_(c2) {}

double ZetaFunctional::operator()(const SwimmerState& z) const {
  const NormalState n = coords_.to_normal(z);
  return n.x - c1_ * n.z3 * n.z4 - 0.5 * c2_ * n.z4 * n.z4;
}

double zeta(const SwimmerState& z, const PhysParams& p) { return ZetaFunctional(p)(z); }

ObstructionRatio obstruction_ratio(const Trajectory& traj, const ZetaFunctional& zeta, double energy_floor,
                                   int subdivisions) {
  ObstructionRatio r;
  r.delta_zeta = zeta(SwimmerState::from_array(traj.final_state())) -
                 zeta(SwimmerState::from_array(traj.initial_state()));
  const NormalCoordinates& nc = zeta.coordinates();
  r.z4_energy = integrate_along(
      traj,
      [&nc](double, const State4& s) {
        const double z4 = nc.z4(s[3]);
        return z4 * z4;
      },
      subdivisions);
  if (r.z4_energy >= energy_floor) r.ratio = r.delta_zeta / r.z4_energy;
  return r;
}

}  // namespace microswim
