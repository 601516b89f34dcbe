#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "microswim/model.hpp"
#include "microswim/params.hpp"

namespace microswim {

using State4 = std::array<double, 4>;

/// Open-loop control t -> (h_perp, h_par) on [0, horizon].
class ControlSignal {
 public:
  enum class Kind { zero, piecewise_constant, sinusoidal };

  struct Sinusoid {
    double amp_perp = 0.0;
    double amp_par = 0.0;
    double omega = 1.0;
    double phase_perp = 0.0;
    double phase_par = 0.0;
  };

  static ControlSignal zero();
  /// Equal-length intervals covering [0, horizon].
  static ControlSignal piecewise_constant(double horizon, std::vector<ControlInput> values);
  static ControlSignal sinusoidal(const Sinusoid& s);

  Kind kind() const { return kind_; }
  ControlInput at(double t) const;
  /// Sup-norm bound stated by the signal's construction.
  double declared_bound() const;
  /// Times in (0, T) where the signal may jump.
  std::vector<double> breakpoints(double T) const;
  /// Index of the piecewise interval containing t (clamped).
  std::size_t interval_index(double t) const;

  const std::vector<ControlInput>& values() const { return values_; }
  double horizon() const { return horizon_; }
  const Sinusoid& sinusoid() const { return sinusoid_; }

 private:
  Kind kind_ = Kind::zero;
  double horizon_ = 0.0;
  std::vector<ControlInput> values_;
  Sinusoid sinusoid_{};
};

struct Tolerance {
  double rtol = 1e-10;
  double atol = 1e-10;
};

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  long evaluations = 0;
  Tolerance tolerance{};
};

/// Output of the adaptive integrator: accepted steps with their
/// continuous extension.
class Trajectory {
 public:
  struct Step {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State4, 5> coeff{};  ///< dense-output coefficients
    State4 at(double theta) const;  ///< theta in [0, 1]
  };

  Trajectory(std::vector<double> times, std::vector<State4> states, std::vector<Step> steps,
             ControlSignal signal, ReferencePoint reference, IntegratorStats stats);

  const std::vector<double>& times() const { return times_; }
  const std::vector<State4>& states() const { return states_; }
  const std::vector<Step>& steps() const { return steps_; }
  const ControlSignal& signal() const { return signal_; }
  ReferencePoint reference() const { return reference_; }
  const IntegratorStats& stats() const { return stats_; }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }
  const State4& initial_state() const { return states_.front(); }
  const State4& final_state() const { return states_.back(); }

  State4 state_at(double t) const;
  ControlInput control_at(double t) const { return signal_.at(t); }

 private:
  std::vector<double> times_;
  std::vector<State4> states_;
  std::vector<Step> steps_;
  ControlSignal signal_;
  ReferencePoint reference_;
  IntegratorStats stats_;
};

/// Adaptive Dormand-Prince 5(4) integration of the swimmer on [0, T].
/// Piecewise-constant signals are integrated interval by interval so that no
/// step straddles a jump. Error weights are invariant under rigid motions:
/// position and orientation are weighted by their displacement from z0.
/// Throws InvalidArgument, StepSizeUnderflow, NonFiniteState.
Trajectory integrate(const PhysParams& p, const SwimmerState& z0, const ControlSignal& u, double T,
                     Tolerance tol = {}, ReferencePoint ref = kDefaultReference);

enum class FixedMethod { rk4, dopri5 };

/// Fixed-step integration, returning the final state.
State4 integrate_fixed(const PhysParams& p, const SwimmerState& z0, const ControlSignal& u, double T, int steps,
                       FixedMethod method = FixedMethod::rk4, ReferencePoint ref = kDefaultReference);

/// One classical RK4 step with frozen control.
State4 rk4_step(const PhysParams& p, const State4& z, const ControlInput& u, double h, ReferencePoint ref);

/// Composite Simpson quadrature of g(t, z(t)) over the trajectory, with
/// `subdivisions` (even) panels per integrator step.
double integrate_along(const Trajectory& traj, const std::function<double(double, const State4&)>& g,
                       int subdivisions = 10);

/// Planar rigid motion: rotate by phi about the origin, then translate.
struct RigidMotion {
  double phi = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  SwimmerState apply(const SwimmerState& z) const;
};

/// Max over the time grid of |g z(t) - z_g(t)|, where z_g starts at g z0.
double equivariance_check(const PhysParams& p, const SwimmerState& z0, const ControlSignal& u, double T,
                          const RigidMotion& g, Tolerance tol = {}, ReferencePoint ref = kDefaultReference);

}  // namespace microswim
