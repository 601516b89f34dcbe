#include "microswim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "microswim/errors.hpp"

namespace microswim {

// ---------------------------------------------------------------------------
// ControlSignal

ControlSignal ControlSignal::zero() { return ControlSignal{}; }

ControlSignal ControlSignal::piecewise_constant(double horizon, std::vector<ControlInput> values) {
  if (!(horizon > 0.0)) throw InvalidArgument("piecewise signal horizon must be > 0");
  if (values.empty()) throw InvalidArgument("piecewise signal needs at least one interval");
  ControlSignal s;
  s.kind_ = Kind::piecewise_constant;
  s.horizon_ = horizon;
  s.values_ = std::move(values);
  return s;
}

ControlSignal ControlSignal::sinusoidal(const Sinusoid& sin_spec) {
  ControlSignal s;
  s.kind_ = Kind::sinusoidal;
  s.sinusoid_ = sin_spec;
  return s;
}

std::size_t ControlSignal::interval_index(double t) const {
  if (values_.empty()) return 0;
  const double n = static_cast<double>(values_.size());
  const double idx = std::floor(t / horizon_ * n);
  if (idx < 0.0) return 0;
  return std::min(values_.size() - 1, static_cast<std::size_t>(idx));
}

ControlInput ControlSignal::at(double t) const {
  switch (kind_) {
    case Kind::zero:
      return {};
    case Kind::piecewise_constant:
      return values_[interval_index(t)];
    case Kind::sinusoidal:
      return {sinusoid_.amp_perp * std::sin(sinusoid_.omega * t + sinusoid_.phase_perp),
              sinusoid_.amp_par * std::sin(sinusoid_.omega * t + sinusoid_.phase_par)};
  }
  return {};
}

double ControlSignal::declared_bound() const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::piecewise_constant: {
      double b = 0.0;
      for (const auto& v : values_) b = std::max(b, v.norm());
      return b;
    }
    case Kind::sinusoidal:
      return std::max(std::abs(sinusoid_.amp_perp), std::abs(sinusoid_.amp_par));
  }
  return 0.0;
}

std::vector<double> ControlSignal::breakpoints(double T) const {
  std::vector<double> out;
  if (kind_ != Kind::piecewise_constant) return out;
  const double dt = horizon_ / static_cast<double>(values_.size());
  for (std::size_t i = 1; i < values_.size(); ++i) {
    const double t = dt * static_cast<double>(i);
    if (t < T) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory

State4 Trajectory::Step::at(double th) const {
  State4 z{};
  const double th1 = 1.0 - th;
  for (int i = 0; i < 4; ++i)
    z[i] = coeff[0][i] + th * (coeff[1][i] + th1 * (coeff[2][i] + th * (coeff[3][i] + th1 * coeff[4][i])));
  return z;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<State4> states, std::vector<Step> steps,
                       ControlSignal signal, ReferencePoint reference, IntegratorStats stats)
    : times_(std::move(times)),
      states_(std::move(states)),
      steps_(std::move(steps)),
      signal_(std::move(signal)),
      reference_(reference),
      stats_(stats) {}

State4 Trajectory::state_at(double t) const {
  if (steps_.empty() || t <= times_.front()) return states_.front();
  if (t >= times_.back()) return states_.back();
  // times_[k] is the start of steps_[k].
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
  const Step& s = steps_[std::min(k, steps_.size() - 1)];
  return s.at((t - s.t0) / s.h);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

using Rhs = std::function<State4(double, const State4&)>;

State4 axpy(const State4& y, double h, std::initializer_list<std::pair<double, const State4*>> terms) {
  State4 r = y;
  for (const auto& [a, k] : terms)
    for (int i = 0; i < 4; ++i) r[i] += h * a * (*k)[i];
  return r;
}

struct StageSet {
  State4 k1, k2, k3, k4, k5, k6, k7, y5;
};

/// One DOPRI5 step; k1 is supplied (FSAL), k7 = f(t + h, y5).
void dopri_step(const Rhs& f, double t, const State4& y, double h, StageSet& s) {
  s.k2 = f(t + c2 * h, axpy(y, h, {{a21, &s.k1}}));
  s.k3 = f(t + c3 * h, axpy(y, h, {{a31, &s.k1}, {a32, &s.k2}}));
  s.k4 = f(t + c4 * h, axpy(y, h, {{a41, &s.k1}, {a42, &s.k2}, {a43, &s.k3}}));
  s.k5 = f(t + c5 * h, axpy(y, h, {{a51, &s.k1}, {a52, &s.k2}, {a53, &s.k3}, {a54, &s.k4}}));
  s.k6 = f(t + h, axpy(y, h, {{a61, &s.k1}, {a62, &s.k2}, {a63, &s.k3}, {a64, &s.k4}, {a65, &s.k5}}));
  s.y5 = axpy(y, h, {{a71, &s.k1}, {a73, &s.k3}, {a74, &s.k4}, {a75, &s.k5}, {a76, &s.k6}});
  s.k7 = f(t + h, s.y5);
}

void check_finite(const State4& z, double t) {
  for (double v : z)
    if (!std::isfinite(v)) throw NonFiniteState("non-finite state at t = " + std::to_string(t));
}

/// Rigid-motion-invariant weighted RMS of an error vector.
double error_norm(const State4& err, const State4& y, const State4& ynew, const State4& y0, const Tolerance& tol) {
  const double disp_old = std::hypot(y[0] - y0[0], y[1] - y0[1]);
  const double disp_new = std::hypot(ynew[0] - y0[0], ynew[1] - y0[1]);
  const double sc_pos = tol.atol + tol.rtol * std::max(disp_old, disp_new);
  const double sc_th = tol.atol + tol.rtol * std::max(std::abs(y[2] - y0[2]), std::abs(ynew[2] - y0[2]));
  const double sc_al = tol.atol + tol.rtol * std::max(std::abs(y[3]), std::abs(ynew[3]));
  const auto ratio = [](double e, double sc) { return e == 0.0 ? 0.0 : e / sc; };
  const double ex = ratio(err[0], sc_pos), ey = ratio(err[1], sc_pos), et = ratio(err[2], sc_th),
               ea = ratio(err[3], sc_al);
  return std::sqrt((ex * ex + ey * ey + et * et + ea * ea) / 4.0);
}

}  // namespace

Trajectory integrate(const PhysParams& params, const SwimmerState& z0, const ControlSignal& u, double T,
                     Tolerance tol, ReferencePoint ref) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("integration horizon must be > 0");
  if (!(tol.rtol >= 1e-12 && tol.rtol <= 1e-4)) throw InvalidArgument("rtol must lie in [1e-12, 1e-4]");
  if (!(tol.atol >= 0.0) || (tol.atol == 0.0 && tol.rtol == 0.0)) throw InvalidArgument("atol must be >= 0");
  const PhysParams p = validate_params(params);

  IntegratorStats stats;
  stats.tolerance = tol;

  std::vector<double> bounds{0.0};
  for (double b : u.breakpoints(T)) bounds.push_back(b);
  bounds.push_back(T);

  const State4 y0 = z0.to_array();
  check_finite(y0, 0.0);
  std::vector<double> times{0.0};
  std::vector<State4> states{y0};
  std::vector<Trajectory::Step> steps;

  State4 y = y0;
  double t = 0.0;
  double h = 0.0;
  constexpr long kMaxSteps = 2'000'000;

  for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
    const double a = bounds[seg];
    const double b = bounds[seg + 1];
    const bool frozen = u.kind() == ControlSignal::Kind::piecewise_constant;
    const ControlInput held = frozen ? u.values()[u.interval_index(0.5 * (a + b))] : ControlInput{};
    const Rhs f = [&](double tt, const State4& z) {
      ++stats.evaluations;
      const ControlInput c = frozen ? held : u.at(tt);
      return dynamics_t<double>(z, c.h_perp, c.h_par, p, ref);
    };

    t = a;
    StageSet s;
    s.k1 = f(t, y);
    check_finite(s.k1, t);

    // The controller grows the step by up to 10x per accepted step.
    if (h <= 0.0) h = 1e-2 * (b - a);
    bool last_rejected = false;
    while (t < b) {
      const double remaining = b - t;
      // Absorb a leftover shorter than 1% of the step into the final step.
      const bool final_step = h >= 0.99 * remaining;
      const double hh = final_step ? remaining : h;
      if (!final_step && hh < 1e-14 * std::max(std::abs(t), T))
        throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t));
      if (stats.steps + stats.rejected > kMaxSteps) throw StepSizeUnderflow("step budget exhausted");

      dopri_step(f, t, y, hh, s);
      State4 err{};
      for (int i = 0; i < 4; ++i)
        err[i] = hh * (e1 * s.k1[i] + e3 * s.k3[i] + e4 * s.k4[i] + e5 * s.k5[i] + e6 * s.k6[i] + e7 * s.k7[i]);
      const double en = error_norm(err, y, s.y5, y0, tol);
      if (!std::isfinite(en)) throw NonFiniteState("non-finite error estimate at t = " + std::to_string(t));

      double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 10.0;
      if (en <= 1.0) {
        Trajectory::Step st;
        st.t0 = t;
        st.h = hh;
        for (int i = 0; i < 4; ++i) {
          const double ydiff = s.y5[i] - y[i];
          const double bspl = hh * s.k1[i] - ydiff;
          st.coeff[0][i] = y[i];
          st.coeff[1][i] = ydiff;
          st.coeff[2][i] = bspl;
          st.coeff[3][i] = ydiff - hh * s.k7[i] - bspl;
          st.coeff[4][i] = hh * (d1 * s.k1[i] + d3 * s.k3[i] + d4 * s.k4[i] + d5 * s.k5[i] + d6 * s.k6[i] +
                                 d7 * s.k7[i]);
        }
        steps.push_back(st);
        t = final_step ? b : t + hh;
        y = s.y5;
        check_finite(y, t);
        times.push_back(t);
        states.push_back(y);
        s.k1 = s.k7;
        ++stats.steps;
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
        if (!final_step || fac < 1.0) h = hh * fac;
        last_rejected = false;
      } else {
        ++stats.rejected;
        h = hh * std::clamp(fac, 0.1, 0.9);
        last_rejected = true;
      }
    }
  }
  return Trajectory(std::move(times), std::move(states), std::move(steps), u, ref, stats);
}

State4 rk4_step(const PhysParams& p, const State4& z, const ControlInput& u, double h, ReferencePoint ref) {
  const auto f = [&](const State4& y) { return dynamics_t<double>(y, u.h_perp, u.h_par, p, ref); };
  const State4 k1 = f(z);
  const State4 k2 = f(axpy(z, 0.5 * h, {{1.0, &k1}}));
  const State4 k3 = f(axpy(z, 0.5 * h, {{1.0, &k2}}));
  const State4 k4 = f(axpy(z, h, {{1.0, &k3}}));
  State4 r{};
  for (int i = 0; i < 4; ++i) r[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return r;
}

State4 integrate_fixed(const PhysParams& params, const SwimmerState& z0, const ControlSignal& u, double T, int n,
                       FixedMethod method, ReferencePoint ref) {
  if (!(T > 0.0)) throw InvalidArgument("integration horizon must be > 0");
  if (n < 1) throw InvalidArgument("step count must be >= 1");
  const PhysParams p = validate_params(params);
  const double h = T / n;
  State4 y = z0.to_array();
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    // Piecewise signals are sampled at the step midpoint; callers align steps with intervals.
    if (method == FixedMethod::rk4 && u.kind() != ControlSignal::Kind::sinusoidal) {
      y = rk4_step(p, y, u.at(t + 0.5 * h), h, ref);
      continue;
    }
    const bool frozen = u.kind() == ControlSignal::Kind::piecewise_constant;
    const ControlInput held = u.at(t + 0.5 * h);
    const Rhs f = [&](double tt, const State4& z) {
      const ControlInput c = frozen ? held : u.at(tt);
      return dynamics_t<double>(z, c.h_perp, c.h_par, p, ref);
    };
    if (method == FixedMethod::rk4) {
      const State4 k1 = f(t, y);
      const State4 k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, {{1.0, &k1}}));
      const State4 k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, {{1.0, &k2}}));
      const State4 k4 = f(t + h, axpy(y, h, {{1.0, &k3}}));
      for (int k = 0; k < 4; ++k) y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    } else {
      StageSet s;
      s.k1 = f(t, y);
      dopri_step(f, t, y, h, s);
      y = s.y5;
    }
    check_finite(y, t + h);
  }
  return y;
}

double integrate_along(const Trajectory& traj, const std::function<double(double, const State4&)>& g,
                       int subdivisions) {
  if (subdivisions < 2 || subdivisions % 2 != 0) throw InvalidArgument("Simpson needs an even panel count");
  double total = 0.0;
  for (const auto& st : traj.steps()) {
    const double dt = st.h / subdivisions;
    double acc = 0.0;
    for (int i = 0; i <= subdivisions; ++i) {
      const double th = static_cast<double>(i) / subdivisions;
      const double w = (i == 0 || i == subdivisions) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * g(st.t0 + th * st.h, st.at(th));
    }
    total += acc * dt / 3.0;
  }
  return total;
}

SwimmerState RigidMotion::apply(const SwimmerState& z) const {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c * z.x - s * z.y + dx, s * z.x + c * z.y + dy, z.theta + phi, z.alpha};
}

double equivariance_check(const PhysParams& p, const SwimmerState& z0, const ControlSignal& u, double T,
                          const RigidMotion& g, Tolerance tol, ReferencePoint ref) {
  const Trajectory base = integrate(p, z0, u, T, tol, ref);
  const Trajectory moved = integrate(p, g.apply(z0), u, T, tol, ref);
  std::vector<double> grid = base.times();
  grid.insert(grid.end(), moved.times().begin(), moved.times().end());
  double worst = 0.0;
  for (double t : grid) {
    const State4 a = g.apply(SwimmerState::from_array(base.state_at(t))).to_array();
    const State4 b = moved.state_at(t);
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace microswim
