#include "microswim/model.hpp"

namespace microswim {

double reference_offset(ReferencePoint ref, double ell) {
  switch (ref) {
    case ReferencePoint::joint:
      return 0.0;
    case ReferencePoint::head_end:
      return ell;
    case ReferencePoint::head_midpoint:
      return 0.5 * ell;
  }
  throw InvalidArgument("unknown reference point");
}

double reciprocal_condition(const Mat<double, 4, 4>& a) {
  std::array<double, 4> scale{};
  Mat<double, 4, 4> scaled = a;
  for (int i = 0; i < 4; ++i) scale[i] = 1.0 / std::sqrt(a[i][i]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) scaled[i][j] = a[i][j] * scale[i] * scale[j];
  return 1.0 / (detail::one_norm(scaled) * detail::one_norm(detail::invert4(scaled)));
}

std::array<double, 4> dynamics(const SwimmerState& z, const ControlInput& u, const PhysParams& p,
                               ReferencePoint ref) {
  return dynamics_t<double>(z.to_array(), u.h_perp, u.h_par, p, ref);
}

DynamicsJacobian dynamics_jacobian(const std::array<double, 4>& z, const ControlInput& u,
                                   const PhysParams& p, ReferencePoint ref) {
  using D = Dual<4>;
  // Only theta and alpha enter the right-hand side; x and y columns stay zero.
  const Vec4<D> zd{D(z[0]), D(z[1]), D::seed(z[2], 0), D::seed(z[3], 1)};
  const Vec4<D> r = dynamics_t<D>(zd, D::seed(u.h_perp, 2), D::seed(u.h_par, 3), p, ref);
  DynamicsJacobian out{};
  for (int i = 0; i < 4; ++i) {
    out.rate[i] = r[i].v;
    out.d_state[i] = {0.0, 0.0, r[i].d[0], r[i].d[1]};
    out.d_control[i] = {r[i].d[2], r[i].d[3]};
  }
  return out;
}

}  // namespace microswim
