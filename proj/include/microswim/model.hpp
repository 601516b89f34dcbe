#pragma once

// Resistive-force-theory dynamics of the two-link magneto-elastic swimmer.
//
// Geometry (body frame, head link along +x):
//   head link: orientation theta, carries m2, occupies joint + s e_theta, s in [0, ell]
//   tail link: orientation theta + alpha, carries m1, occupies joint + s e_{theta+alpha},
//              s in [-ell, 0]
// The field is H = h_par e_theta + h_perp e_theta^perp. The torque on link i is
// m_i e_i x H; the elastic torque on the tail is -kappa alpha.
//
// Generalized velocities are p = (vx, vy, theta_dot, alpha_dot), with (vx, vy)
// the body-frame velocity of the reference point. Balancing drag against the
// generalized forces gives A(alpha) p = B(alpha) (h_perp, h_par) + k(alpha),
// with A the symmetric positive definite grand resistance matrix.
//
// All assembly routines are templates over the scalar type so that the same
// code yields values (double), Taylor coefficients (Jet) and Jacobians (Dual).

#include <array>
#include <cmath>
#include <stdexcept>

#include "microswim/dual.hpp"
#include "microswim/errors.hpp"
#include "microswim/jet.hpp"
#include "microswim/params.hpp"

namespace microswim {

/// Point of the body whose position is (x, y).
enum class ReferencePoint { joint, head_end, head_midpoint };

/// Convention that reproduces the closed-form expansions at alpha = 0.
inline constexpr ReferencePoint kDefaultReference = ReferencePoint::head_midpoint;

/// Rows of the f-table: input channel. F1 pairs with h_perp (the channel that
/// exerts torque on a straight swimmer), F2 with h_par.
enum Channel : int { kDrift = 0, kPerp = 1, kPar = 2 };

template <class S, int R, int C>
using Mat = std::array<std::array<S, C>, R>;
template <class S>
using Vec4 = std::array<S, 4>;
template <class S>
using FTable = Mat<S, 3, 4>;

template <class S>
struct ResistanceSystem {
  Mat<S, 4, 4> a;  ///< grand resistance matrix
  Mat<S, 4, 2> b;  ///< columns: h_perp, h_par
  Vec4<S> k;       ///< elastic generalized force
};

/// Threshold on the reciprocal 1-norm condition number of the Jacobi-scaled
/// resistance matrix.
inline constexpr double kMinReciprocalCondition = 1e-10;

double reference_offset(ReferencePoint ref, double ell);

template <class S>
ResistanceSystem<S> resistance_system(const S& alpha, const PhysParams& p,
                                      ReferencePoint ref = kDefaultReference) {
  using std::cos;
  using std::sin;
  const S ca = cos(alpha);
  const S sa = sin(alpha);
  const double ell = p.ell;
  const double first_moment = 0.5 * ell * ell;  // |int s ds| over a link
  const double second_moment = ell * ell * ell / 3.0;
  const double off = reference_offset(ref, ell);

  // Per-link resistance in (Vx, Vy, omega) about the joint:
  //   [[ell D, eta S1 n], [eta S1 n^T, eta S2]],  D = xi t t^T + eta n n^T.
  const auto link = [&](const S& tx, const S& ty, double s1) {
    const S nx = -ty;
    const S ny = tx;
    Mat<S, 3, 3> r{};
    r[0][0] = ell * (p.xi * tx * tx + p.eta * nx * nx);
    r[0][1] = ell * (p.xi * tx * ty + p.eta * nx * ny);
    r[1][0] = r[0][1];
    r[1][1] = ell * (p.xi * ty * ty + p.eta * ny * ny);
    r[0][2] = p.eta * s1 * nx;
    r[1][2] = p.eta * s1 * ny;
    r[2][0] = r[0][2];
    r[2][1] = r[1][2];
    r[2][2] = S(p.eta * second_moment);
    return r;
  };
  const Mat<S, 3, 3> head = link(S(1.0), S(0.0), first_moment);
  const Mat<S, 3, 3> tail = link(ca, sa, -first_moment);

  // Map p -> (Vx, Vy, omega_link). Joint velocity V = v_ref - theta_dot * (0, off).
  // Head: omega = theta_dot. Tail: omega = theta_dot + alpha_dot.
  const auto project = [&](const Mat<S, 3, 3>& r, bool is_tail, Mat<S, 4, 4>& acc) {
    Mat<double, 3, 4> g{};
    g[0][0] = 1.0;
    g[1][1] = 1.0;
    g[1][2] = -off;
    g[2][2] = 1.0;
    g[2][3] = is_tail ? 1.0 : 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        S s(0.0);
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n) {
            if (g[m][i] == 0.0 || g[n][j] == 0.0) continue;
            s += g[m][i] * r[m][n] * g[n][j];
          }
        acc[i][j] += s;
      }
  };

  ResistanceSystem<S> sys{};
  for (auto& row : sys.a) row.fill(S(0.0));
  project(head, false, sys.a);
  project(tail, true, sys.a);

  // Magnetic torques: head m2 h_perp; tail m1 (cos(alpha) h_perp - sin(alpha) h_par).
  for (auto& row : sys.b) row.fill(S(0.0));
  sys.b[2][0] = p.m2 + p.m1 * ca;
  sys.b[2][1] = -p.m1 * sa;
  sys.b[3][0] = p.m1 * ca;
  sys.b[3][1] = -p.m1 * sa;

  sys.k.fill(S(0.0));
  sys.k[3] = -p.kappa * alpha;
  return sys;
}

namespace detail {

/// Inverse of a 4x4 matrix by Gauss-Jordan elimination with partial pivoting
/// on the value part.
template <class S>
Mat<S, 4, 4> invert4(Mat<S, 4, 4> m) {
  Mat<S, 4, 4> inv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv[i][j] = S(i == j ? 1.0 : 0.0);
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(value_of(m[r][col])) > std::abs(value_of(m[piv][col]))) piv = r;
    if (value_of(m[piv][col]) == 0.0) throw SingularResistance("resistance matrix has a zero pivot");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    const S d = S(1.0) / m[col][col];
    for (int j = 0; j < 4; ++j) {
      m[col][j] *= d;
      inv[col][j] *= d;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const S f = m[r][col];
      for (int j = 0; j < 4; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

template <class S>
double one_norm(const Mat<S, 4, 4>& m) {
  double best = 0.0;
  for (int j = 0; j < 4; ++j) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::abs(value_of(m[i][j]));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace detail

/// Reciprocal condition number of the Jacobi-scaled resistance matrix.
double reciprocal_condition(const Mat<double, 4, 4>& a);

/// f_{i,j}(alpha): row i = channel (drift, h_perp, h_par), column j = component
/// (vx, vy, theta_dot, alpha_dot) in the body frame. Throws SingularResistance.
template <class S>
FTable<S> f_table(const S& alpha, const PhysParams& p, ReferencePoint ref = kDefaultReference) {
  const ResistanceSystem<S> sys = resistance_system(alpha, p, ref);

  // Jacobi scaling keeps the conditioning test independent of units.
  std::array<double, 4> scale{};
  Mat<S, 4, 4> scaled = sys.a;
  for (int i = 0; i < 4; ++i) scale[i] = 1.0 / std::sqrt(value_of(sys.a[i][i]));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) scaled[i][j] = sys.a[i][j] * (scale[i] * scale[j]);
  const Mat<S, 4, 4> inv_scaled = detail::invert4(scaled);
  const double rcond = 1.0 / (detail::one_norm(scaled) * detail::one_norm(inv_scaled));
  if (!(rcond >= kMinReciprocalCondition))
    throw SingularResistance("resistance matrix reciprocal condition " + std::to_string(rcond) +
                             " below threshold");

  FTable<S> f{};
  for (int ch = 0; ch < 3; ++ch) {
    Vec4<S> rhs{};
    for (int i = 0; i < 4; ++i) rhs[i] = ch == kDrift ? sys.k[i] : sys.b[i][ch - 1];
    for (int i = 0; i < 4; ++i) {
      S s(0.0);
      for (int j = 0; j < 4; ++j) s += inv_scaled[i][j] * (rhs[j] * scale[j]);
      f[ch][i] = s * scale[i];
    }
  }
  return f;
}

/// Combines an f-table with a control and rotates the planar part by theta:
/// returns F0 + h_perp F1 + h_par F2.
template <class S>
Vec4<S> assemble_rates(const FTable<S>& f, const S& theta, const S& h_perp, const S& h_par) {
  using std::cos;
  using std::sin;
  Vec4<S> body{};
  for (int j = 0; j < 4; ++j) body[j] = f[kDrift][j] + h_perp * f[kPerp][j] + h_par * f[kPar][j];
  const S c = cos(theta);
  const S s = sin(theta);
  return {c * body[0] - s * body[1], s * body[0] + c * body[1], body[2], body[3]};
}

/// State derivative for a generic scalar. State order (x, y, theta, alpha).
template <class S>
Vec4<S> dynamics_t(const Vec4<S>& z, const S& h_perp, const S& h_par, const PhysParams& p,
                   ReferencePoint ref = kDefaultReference) {
  return assemble_rates(f_table(z[3], p, ref), z[2], h_perp, h_par);
}

/// State derivative z' = F0(z) + h_perp F1(z) + h_par F2(z).
std::array<double, 4> dynamics(const SwimmerState& z, const ControlInput& u, const PhysParams& p,
                               ReferencePoint ref = kDefaultReference);

/// Jacobians of the state derivative with respect to state (4x4) and
/// control (4x2, columns h_perp, h_par).
struct DynamicsJacobian {
  std::array<double, 4> rate;
  Mat<double, 4, 4> d_state;
  Mat<double, 4, 2> d_control;
};
DynamicsJacobian dynamics_jacobian(const std::array<double, 4>& z, const ControlInput& u,
                                   const PhysParams& p, ReferencePoint ref = kDefaultReference);

}  // namespace microswim
