#pragma once

// Controllability regime of a parameter set, loop-trajectory search under a
// control bound, and the integral inequalities that bound the remainder terms
// of zeta' along a trajectory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "microswim/params.hpp"
#include "microswim/simulator.hpp"
#include "microswim/transform.hpp"

namespace microswim {

enum class Regime { NOT_STLC_Q_ANY, STLC_Q_NOT_STLC, STLC };
const char* to_string(Regime r);

struct ControllabilityClass {
  Regime regime = Regime::NOT_STLC_Q_ANY;
  double q = 0.0;
  double c0 = 0.0;
};

ControllabilityClass classify(const PhysParams& p);

struct LoopSearchOptions {
  int intervals = 40;            ///< piecewise-constant control intervals
  int steps = 400;               ///< fixed RK4 steps over the horizon (multiple of intervals)
  int starts = 8;                ///< multi-start count
  int penalty_stages = 4;
  double penalty_initial = 1.0;
  double penalty_growth = 10.0;
  int smooth_power = 8;          ///< p of the smooth max surrogate
  int inner_iterations = 300;
  int restoration_iterations = 40;
  double feasibility_tol = 1e-9;       ///< defect <= tol * objective
  double component_closure_tol = 1e-6; ///< each |z_i(T)| <= tol * max_t |z_i(t)|
  double nontrivial_threshold = 1e-6;  ///< objective above which a loop is nontrivial
  Tolerance validation{1e-12, 1e-16};
};

enum class LoopStatus { feasible, no_feasible_loop };
const char* to_string(LoopStatus s);

/// One multi-start run: the penalty-stage candidate and the outcome of
/// restoring exact periodicity from it.
struct LoopCandidate {
  std::uint64_t seed = 0;
  std::vector<ControlInput> controls;
  Trajectory trajectory;         ///< adaptive re-integration of the candidate
  double objective = 0.0;        ///< max_t |z(t)| on the dense output
  double defect = 0.0;           ///< max component gap between end and start
  double closure = 0.0;          ///< max over components of gap / excursion
  bool feasible = false;
};

struct LoopResult {
  LoopStatus status = LoopStatus::feasible;
  double eps = 0.0;
  double horizon = 0.0;
  std::vector<ControlInput> controls;
  std::optional<Trajectory> trajectory;
  double defect = 0.0;
  double objective = 0.0;
  bool nontrivial = false;
  std::uint64_t seed = 0;
  /// Penalty-stage candidates of every start, before restoration.
  std::vector<LoopCandidate> candidates;
  /// Restored loops of every start.
  std::vector<LoopCandidate> restored;
};

/// Searches for a loop z(0) = z(T) = O of maximal size under |u|_inf <= eps.
/// Returns the best feasible loop; when no start reaches feasibility the
/// trivial loop is returned with status no_feasible_loop.
/// Throws InvalidArgument for eps < 0, T <= 0, intervals < 2.
LoopResult loop_search(const PhysParams& p, double eps, double T, std::uint64_t seed,
                       const LoopSearchOptions& opt = {});

/// Objective and gradient of the penalized loop problem, exposed for testing.
/// Variables w (2 * intervals entries, interleaved h_perp, h_par) map to
/// controls eps * sin(w).
struct LoopObjective {
  LoopObjective(const PhysParams& p, double eps, double T, int intervals, int steps, int power);
  double operator()(const std::vector<double>& w, std::vector<double>& grad) const;
  /// Smooth loop size and defect at w (no penalty weighting).
  double smooth_size(const std::vector<double>& w) const;
  State4 end_state(const std::vector<double>& w) const;
  std::vector<ControlInput> controls(const std::vector<double>& w) const;

  double penalty = 1.0;
  double scale = 1.0;  ///< typical state size under a constant control

 private:
  PhysParams p_;
  double eps_;
  double T_;
  int intervals_;
  int steps_;
  int power_;
};

struct InequalityReport {
  double int_abs_z3z4 = 0.0;
  double int_z3_sq = 0.0;
  double int_z4_sq = 0.0;
  double K = 0.0;   ///< sup |u| with z3' = z4 u along the trajectory
  double horizon = 0.0;
  double K1 = 0.0;  ///< int |z3 z4| / (T int z4^2)
  double K2 = 0.0;  ///< sqrt(int z3^2 / (T^2 int z4^2))
  bool cross_bound_holds = false;   ///< int |z3 z4| <= K T int z4^2
  bool square_bound_holds = false;  ///< int z3^2 <= K^2 T^2 int z4^2
  bool undefined_ratio = false;     ///< int z4^2 below the energy floor
  double refinement_change = 0.0;   ///< max relative change of the integrals under 2x refinement
};

InequalityReport lemma_bounds_check(const Trajectory& traj, const PhysParams& p,
                                    double energy_floor = kDefaultEnergyFloor);

struct SweepRow {
  double eps = 0.0;
  double horizon = 0.0;
  LoopResult loop;
  std::optional<double> ratio;  ///< delta zeta / int z4^2 on the largest candidate
  std::vector<InequalityReport> inequalities;  ///< one per candidate trajectory
};

struct SweepResult {
  ControllabilityClass cls;
  std::vector<SweepRow> rows;
  int monotone_violations = 0;  ///< adjacent increases of the objective as eps decreases
  double kendall_tau = 0.0;     ///< rank correlation between eps and objective
  std::string verdict;
};

inline constexpr const char* kVerdictObstruction = "OBSTRUCTION OBSERVED";
inline constexpr const char* kVerdictNoObstruction = "NO OBSTRUCTION OBSERVED";
inline constexpr const char* kVerdictNotApplicable = "NOT APPLICABLE";
inline constexpr const char* kVerdictNoTrend = "NO TREND";

/// horizon_factor > 0 sets T = horizon_factor * eps; fixed_horizon > 0 overrides.
struct SweepOptions {
  double horizon_factor = 1.0;
  double fixed_horizon = 0.0;
  double monotone_noise = 1e-8;
  LoopSearchOptions loop{};
};

/// Random-control convergence study of delta zeta / int z4^2 towards c0.
struct ObstructionStudyOptions {
  int samples = 50;
  int intervals = 8;            ///< piecewise-constant intervals per random signal
  double horizon_factor = 1.0;  ///< T = horizon_factor * eps
  /// int z4^2 scales like eps^2 T^3; the undefined-ratio floor is this factor
  /// times eps^2 T^3.
  double relative_energy_floor = 1e-14;
  Tolerance tol{1e-12, 1e-30};
};

struct ObstructionLevel {
  double eps = 0.0;
  double horizon = 0.0;
  std::vector<double> ratios;  ///< defined ratios, in sample order
  int undefined = 0;
  double median_abs_deviation = 0.0;  ///< median |ratio - c0|; NaN when no ratio is defined
};

std::vector<ObstructionLevel> obstruction_study(const PhysParams& p, const std::vector<double>& eps_list,
                                                std::uint64_t seed, const ObstructionStudyOptions& opt = {});

SweepResult epsilon_sweep(const PhysParams& p, const std::vector<double>& eps_list, std::uint64_t seed,
                          const SweepOptions& opt = {});

}  // namespace microswim
