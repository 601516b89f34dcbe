#include "microswim/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "microswim/errors.hpp"
#include "microswim/lbfgs.hpp"
#include "microswim/model.hpp"

namespace microswim {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::NOT_STLC_Q_ANY:
      return "NOT_STLC_Q_ANY";
    case Regime::STLC_Q_NOT_STLC:
      return "STLC_Q_NOT_STLC";
    case Regime::STLC:
      return "STLC";
  }
  return "?";
}

const char* to_string(LoopStatus s) { return s == LoopStatus::feasible ? "feasible" : "NoFeasibleLoop"; }

ControllabilityClass classify(const PhysParams& params) {
  const PhysParams p = validate_params(params);
  ControllabilityClass c;
  c.q = stlc_threshold(p);
  c.c0 = c0_closed_form(p);
  if (p.xi == p.eta || p.m1 == p.m2)
    c.regime = Regime::NOT_STLC_Q_ANY;
  else if (p.m1 + p.m2 == 0.0)
    c.regime = Regime::STLC;
  else
    c.regime = Regime::STLC_Q_NOT_STLC;
  return c;
}

// ---------------------------------------------------------------------------
// Penalized loop objective with a discrete adjoint through fixed-step RK4.

namespace {

using M44 = Mat<double, 4, 4>;
using M42 = Mat<double, 4, 2>;

struct StageJac {
  M44 a;
  M42 b;
};

struct StepTape {
  std::array<StageJac, 4> stage;
};

struct Forward {
  std::vector<State4> nodes;  // N + 1 states
  std::vector<StepTape> tape;
};

State4 add_scaled(const State4& z, double s, const State4& k) {
  return {z[0] + s * k[0], z[1] + s * k[1], z[2] + s * k[2], z[3] + s * k[3]};
}

Forward run_forward(const PhysParams& p, const std::vector<ControlInput>& u, double T, int steps, bool record) {
  Forward fw;
  fw.nodes.reserve(steps + 1);
  if (record) fw.tape.resize(steps);
  const int per = steps / static_cast<int>(u.size());
  const double h = T / steps;
  State4 z{};
  fw.nodes.push_back(z);
  for (int j = 0; j < steps; ++j) {
    const ControlInput& c = u[j / per];
    std::array<State4, 4> k;
    std::array<State4, 4> y;
    y[0] = z;
    for (int s = 0; s < 4; ++s) {
      if (s > 0) y[s] = add_scaled(z, s == 3 ? h : 0.5 * h, k[s - 1]);
      if (record) {
        const DynamicsJacobian jac = dynamics_jacobian(y[s], c, p);
        k[s] = jac.rate;
        fw.tape[j].stage[s] = {jac.d_state, jac.d_control};
      } else {
        k[s] = dynamics_t<double>(y[s], c.h_perp, c.h_par, p, kDefaultReference);
      }
    }
    for (int i = 0; i < 4; ++i) z[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    fw.nodes.push_back(z);
  }
  return fw;
}

/// Reverse sweep: given dL/dz_j (node_grad, modified in place), returns dL/du
/// per interval.
std::vector<std::array<double, 2>> run_adjoint(const Forward& fw, std::vector<State4>& node_grad, int intervals,
                                               double T) {
  const int steps = static_cast<int>(fw.tape.size());
  const int per = steps / intervals;
  const double h = T / steps;
  std::vector<std::array<double, 2>> gu(intervals, {0.0, 0.0});
  State4 lam = node_grad[steps];
  for (int j = steps - 1; j >= 0; --j) {
    const StepTape& tp = fw.tape[j];
    std::array<State4, 4> gk;
    const double wts[4] = {h / 6.0, h / 3.0, h / 3.0, h / 6.0};
    for (int s = 0; s < 4; ++s)
      for (int i = 0; i < 4; ++i) gk[s][i] = wts[s] * lam[i];
    State4 lz = lam;
    std::array<double, 2>& g = gu[j / per];
    for (int s = 3; s >= 0; --s) {
      const StageJac& sj = tp.stage[s];
      State4 a{};
      for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) a[c] += sj.a[r][c] * gk[s][r];
      for (int c = 0; c < 2; ++c)
        for (int r = 0; r < 4; ++r) g[c] += sj.b[r][c] * gk[s][r];
      for (int i = 0; i < 4; ++i) lz[i] += a[i];
      if (s > 0) {
        const double coef = s == 3 ? h : 0.5 * h;
        for (int i = 0; i < 4; ++i) gk[s - 1][i] += coef * a[i];
      }
    }
    for (int i = 0; i < 4; ++i) lam[i] = lz[i] + node_grad[j][i];
  }
  return gu;
}

double norm4(const State4& z) { return std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3]); }

double max_abs4(const State4& z) {
  return std::max({std::abs(z[0]), std::abs(z[1]), std::abs(z[2]), std::abs(z[3])});
}

}  // namespace

LoopObjective::LoopObjective(const PhysParams& p, double eps, double T, int intervals, int steps, int power)
    : p_(validate_params(p)), eps_(eps), T_(T), intervals_(intervals), steps_(steps), power_(power) {
  if (!(eps >= 0.0)) throw InvalidArgument("control bound must be >= 0");
  if (!(T > 0.0)) throw InvalidArgument("loop horizon must be > 0");
  if (intervals < 2) throw InvalidArgument("loop search needs at least 2 control intervals");
  if (steps % intervals != 0) throw InvalidArgument("fixed steps must be a multiple of the interval count");
  if (power < 2) throw InvalidArgument("smooth max power must be >= 2");
  std::vector<ControlInput> c(intervals, ControlInput{eps, eps});
  const Forward fw = run_forward(p_, c, T, steps, false);
  double s = 0.0;
  for (const State4& z : fw.nodes) s = std::max(s, norm4(z));
  if (s > 0.0) scale = s;
}

std::vector<ControlInput> LoopObjective::controls(const std::vector<double>& w) const {
  std::vector<ControlInput> u(intervals_);
  for (int k = 0; k < intervals_; ++k) u[k] = {eps_ * std::sin(w[2 * k]), eps_ * std::sin(w[2 * k + 1])};
  return u;
}

State4 LoopObjective::end_state(const std::vector<double>& w) const {
  return run_forward(p_, controls(w), T_, steps_, false).nodes.back();
}

double LoopObjective::smooth_size(const std::vector<double>& w) const {
  const Forward fw = run_forward(p_, controls(w), T_, steps_, false);
  double acc = 0.0;
  for (const State4& z : fw.nodes) acc += std::pow(norm4(z) / scale, power_);
  return scale * std::pow(acc / static_cast<double>(fw.nodes.size()), 1.0 / power_);
}

double LoopObjective::operator()(const std::vector<double>& w, std::vector<double>& grad) const {
  const std::vector<ControlInput> u = controls(w);
  const Forward fw = run_forward(p_, u, T_, steps_, true);
  const std::size_t m = fw.nodes.size();

  // Smooth max of |z_j| / scale.
  double acc = 0.0;
  for (const State4& z : fw.nodes) acc += std::pow(norm4(z) / scale, power_);
  const double size = std::pow(acc / static_cast<double>(m), 1.0 / power_);

  const State4& end = fw.nodes.back();
  double d2 = 0.0;
  for (double v : end) d2 += (v / scale) * (v / scale);
  const double value = -size + penalty * d2;

  std::vector<State4> ng(m, State4{});
  if (size > 0.0) {
    const double pre = std::pow(size, 1.0 - power_) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double r = norm4(fw.nodes[j]) / scale;
      if (r == 0.0) continue;
      const double f = -pre * std::pow(r, power_ - 2) / scale;
      for (int i = 0; i < 4; ++i) ng[j][i] = f * fw.nodes[j][i] / scale;
    }
  }
  for (int i = 0; i < 4; ++i) ng[m - 1][i] += 2.0 * penalty * end[i] / (scale * scale);

  const auto gu = run_adjoint(fw, ng, intervals_, T_);
  grad.assign(w.size(), 0.0);
  for (int k = 0; k < intervals_; ++k)
    for (int c = 0; c < 2; ++c) {
      grad[2 * k + c] = gu[k][c] * eps_ * std::cos(w[2 * k + c]);
    }
  return value;
}

// ---------------------------------------------------------------------------
// Loop search.

namespace {

struct Evaluated {
  Trajectory traj;
  double objective;
  double defect;
  double closure;  ///< max over components of |gap| / excursion
};

Evaluated evaluate_adaptive(const PhysParams& p, const std::vector<ControlInput>& u, double T, Tolerance tol) {
  Trajectory traj = integrate(p, {}, ControlSignal::piecewise_constant(T, u), T, tol);
  double obj = 0.0;
  State4 excursion{};
  for (const auto& st : traj.steps())
    for (int i = 0; i <= 10; ++i) {
      const State4 z = st.at(i / 10.0);
      obj = std::max(obj, norm4(z));
      for (int c = 0; c < 4; ++c) excursion[c] = std::max(excursion[c], std::abs(z[c]));
    }
  const State4& end = traj.final_state();
  double closure = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (end[c] == 0.0) continue;
    closure = std::max(closure, excursion[c] > 0.0 ? std::abs(end[c]) / excursion[c]
                                                   : std::numeric_limits<double>::infinity());
  }
  return {std::move(traj), obj, max_abs4(end), closure};
}

/// Jacobian of the RK4 end state with respect to the normalized controls
/// v = u / eps, stored transposed (2n x 4).
std::vector<std::array<double, 4>> end_state_jacobian(const PhysParams& p, const std::vector<ControlInput>& u,
                                                      double eps, double T, int steps) {
  const Forward fw = run_forward(p, u, T, steps, true);
  const int n = static_cast<int>(u.size());
  std::vector<std::array<double, 4>> jt(2 * n);
  for (int row = 0; row < 4; ++row) {
    std::vector<State4> ng(fw.nodes.size(), State4{});
    ng.back()[row] = 1.0;
    const auto gu = run_adjoint(fw, ng, n, T);
    for (int k = 0; k < n; ++k)
      for (int c = 0; c < 2; ++c) jt[2 * k + c][row] = gu[k][c] * eps;
  }
  return jt;
}

/// Solves the symmetric 4x4 system a x = b by Gaussian elimination with
/// partial pivoting; returns false when singular.
bool solve4(Mat<double, 4, 4> a, State4& b) {
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 4; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int c = 3; c >= 0; --c) {
    for (int k = c + 1; k < 4; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
  return true;
}

// The size-relative test alone accepts small near-loops: x moves at second
// order in the loop size, so its gap can sit below tol * size while x itself
// does not close at all.
bool is_feasible(const Evaluated& ev, const LoopSearchOptions& opt) {
  return (ev.defect <= opt.feasibility_tol * ev.objective || ev.defect == 0.0) &&
         ev.closure <= opt.component_closure_tol;
}

/// Levenberg-Marquardt on the periodicity defect in the normalized controls
/// v = u / eps in [-1, 1]^2n, with Jacobian rows scaled to unit norm (the
/// defect components vanish at very different rates). The residual comes from
/// the adaptive integrator and the Jacobian from the RK4 adjoint. Variables at
/// a bound whose step points outward are frozen for that trial.
std::vector<ControlInput> restore(const PhysParams& p, std::vector<ControlInput> u, double eps, double T,
                                  const LoopSearchOptions& opt) {
  const std::size_t nv = 2 * u.size();
  std::vector<double> v(nv);
  for (std::size_t k = 0; k < u.size(); ++k) {
    v[2 * k] = std::clamp(u[k].h_perp / eps, -1.0, 1.0);
    v[2 * k + 1] = std::clamp(u[k].h_par / eps, -1.0, 1.0);
  }
  const auto to_controls = [&](const std::vector<double>& x) {
    std::vector<ControlInput> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = {eps * x[2 * k], eps * x[2 * k + 1]};
    return out;
  };
  u = to_controls(v);
  Evaluated cur = evaluate_adaptive(p, u, T, opt.validation);
  double lambda = 1e-6;

  for (int it = 0; it < opt.restoration_iterations; ++it) {
    if (is_feasible(cur, opt)) break;
    const State4 d = cur.traj.final_state();
    const auto jt = end_state_jacobian(p, u, eps, T, opt.steps);
    State4 rn{};
    for (std::size_t i = 0; i < nv; ++i)
      for (int r = 0; r < 4; ++r) rn[r] += jt[i][r] * jt[i][r];
    for (double& x : rn) x = x > 0.0 ? 1.0 / std::sqrt(x) : 0.0;
    // Acceptance uses the scaled norm that the damped step decreases.
    const auto merit = [&rn](const State4& e) {
      double m = 0.0;
      for (int r = 0; r < 4; ++r) m += (rn[r] * e[r]) * (rn[r] * e[r]);
      return m;
    };
    const double m0 = merit(d);

    bool improved = false;
    for (int trial = 0; trial < 30 && !improved && lambda < 1e8; ++trial) {
      std::vector<char> active(nv, 0);
      std::vector<double> dv(nv, 0.0);
      bool solved = false;
      for (std::size_t pass = 0; pass < nv; ++pass) {
        Mat<double, 4, 4> jjt{};
        for (std::size_t i = 0; i < nv; ++i)
          if (!active[i])
            for (int r = 0; r < 4; ++r)
              for (int c = 0; c < 4; ++c) jjt[r][c] += rn[r] * jt[i][r] * rn[c] * jt[i][c];
        State4 y;
        for (int r = 0; r < 4; ++r) {
          y[r] = rn[r] * d[r];
          jjt[r][r] += lambda;
        }
        if (!solve4(jjt, y)) break;
        solved = true;
        bool changed = false;
        for (std::size_t i = 0; i < nv; ++i) {
          if (active[i]) continue;
          double s = 0.0;
          for (int r = 0; r < 4; ++r) s += rn[r] * jt[i][r] * y[r];
          dv[i] = -s;
          if ((v[i] >= 1.0 && dv[i] > 0.0) || (v[i] <= -1.0 && dv[i] < 0.0)) {
            active[i] = 1;
            dv[i] = 0.0;
            changed = true;
          }
        }
        if (!changed) break;
      }
      if (!solved) break;
      std::vector<double> vn(v);
      for (std::size_t i = 0; i < nv; ++i) vn[i] = std::clamp(v[i] + dv[i], -1.0, 1.0);
      std::vector<ControlInput> un = to_controls(vn);
      Evaluated ev = evaluate_adaptive(p, un, T, opt.validation);
      if (merit(ev.traj.final_state()) < m0) {
        v = std::move(vn);
        u = std::move(un);
        cur = std::move(ev);
        improved = true;
        lambda = std::max(lambda / 10.0, 1e-14);
      } else {
        lambda *= 8.0;
      }
    }
    if (!improved) break;
  }
  return u;
}

}  // namespace

LoopResult loop_search(const PhysParams& params, double eps, double T, std::uint64_t seed,
                       const LoopSearchOptions& opt) {
  const PhysParams p = validate_params(params);
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("control bound must be >= 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("loop horizon must be > 0");
  if (opt.intervals < 2) throw InvalidArgument("loop search needs at least 2 control intervals");

  LoopResult res;
  res.eps = eps;
  res.horizon = T;
  res.seed = seed;
  const std::vector<ControlInput> zero(opt.intervals, ControlInput{});
  res.controls = zero;
  if (eps == 0.0) {
    res.trajectory = integrate(p, {}, ControlSignal::piecewise_constant(T, zero), T, opt.validation);
    return res;
  }

  LoopObjective obj(p, eps, T, opt.intervals, opt.steps, opt.smooth_power);
  LbfgsOptions lo;
  lo.max_iterations = opt.inner_iterations;

  bool found = false;
  for (int k = 0; k < opt.starts; ++k) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(sq);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> w(2 * opt.intervals);
    for (double& v : w) v = nd(rng);

    obj.penalty = opt.penalty_initial;
    for (int s = 0; s < opt.penalty_stages; ++s, obj.penalty *= opt.penalty_growth) lbfgs_minimize(obj, w, lo);

    const std::uint64_t start_id = seed + static_cast<std::uint64_t>(k);
    {
      std::vector<ControlInput> u = obj.controls(w);
      Evaluated ev = evaluate_adaptive(p, u, T, opt.validation);
      const bool feas = is_feasible(ev, opt);
      res.candidates.push_back({start_id, std::move(u), std::move(ev.traj), ev.objective, ev.defect, ev.closure, feas});
    }

    std::vector<ControlInput> u = restore(p, obj.controls(w), eps, T, opt);
    Evaluated ev = evaluate_adaptive(p, u, T, opt.validation);
    const bool feas = is_feasible(ev, opt);
    if (feas && (!found || ev.objective > res.objective)) {
      found = true;
      res.controls = u;
      res.trajectory = ev.traj;
      res.objective = ev.objective;
      res.defect = ev.defect;
      res.seed = start_id;
    }
    res.restored.push_back({start_id, std::move(u), std::move(ev.traj), ev.objective, ev.defect, ev.closure, feas});
  }

  if (found) {
    res.status = LoopStatus::feasible;
    res.nontrivial = res.objective > opt.nontrivial_threshold;
  } else {
    res.status = LoopStatus::no_feasible_loop;
    res.controls = zero;
    res.trajectory = integrate(p, {}, ControlSignal::piecewise_constant(T, zero), T, opt.validation);
    res.objective = 0.0;
    res.defect = 0.0;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Integral inequalities.

namespace {

struct Integrals {
  double abs_z3z4 = 0.0;
  double z3_sq = 0.0;
  double z4_sq = 0.0;
  double k_sup = 0.0;
};

Integrals integrals_on(const Trajectory& traj, const NormalCoordinates& nc, int sub) {
  Integrals out;
  const ControlSignal& sig = traj.signal();
  for (const auto& st : traj.steps()) {
    // Steps never straddle a jump; the step midpoint identifies its control.
    const ControlInput c = sig.at(st.t0 + 0.5 * st.h);
    const double dt = st.h / sub;
    double a = 0.0, b = 0.0, e = 0.0;
    for (int i = 0; i <= sub; ++i) {
      const double th = static_cast<double>(i) / sub;
      const SwimmerState z = SwimmerState::from_array(st.at(th));
      const double z3 = nc.z3(z.theta, z.alpha);
      const double z4 = nc.z4(z.alpha);
      const double w = (i == 0 || i == sub) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      a += w * std::abs(z3 * z4);
      b += w * z3 * z3;
      e += w * z4 * z4;
      const ControlInput ci = sig.kind() == ControlSignal::Kind::piecewise_constant ? c : sig.at(st.t0 + th * st.h);
      out.k_sup = std::max(out.k_sup, std::abs(nc.z3_rate_factor(z, ci)));
    }
    out.abs_z3z4 += a * dt / 3.0;
    out.z3_sq += b * dt / 3.0;
    out.z4_sq += e * dt / 3.0;
  }
  return out;
}

double rel_change(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m > 0.0 ? std::abs(a - b) / m : 0.0;
}

}  // namespace

InequalityReport lemma_bounds_check(const Trajectory& traj, const PhysParams& p, double energy_floor) {
  const NormalCoordinates nc(p);
  const Integrals base = integrals_on(traj, nc, 10);
  const Integrals fine = integrals_on(traj, nc, 20);

  InequalityReport r;
  r.int_abs_z3z4 = fine.abs_z3z4;
  r.int_z3_sq = fine.z3_sq;
  r.int_z4_sq = fine.z4_sq;
  r.K = std::max(base.k_sup, fine.k_sup);
  r.horizon = traj.end_time() - traj.start_time();
  r.refinement_change = std::max({rel_change(base.abs_z3z4, fine.abs_z3z4), rel_change(base.z3_sq, fine.z3_sq),
                                   rel_change(base.z4_sq, fine.z4_sq)});
  if (r.int_z4_sq < energy_floor) {
    r.undefined_ratio = true;
    return r;
  }
  const double T = r.horizon;
  r.K1 = r.int_abs_z3z4 / (T * r.int_z4_sq);
  r.K2 = std::sqrt(r.int_z3_sq / (T * T * r.int_z4_sq));
  r.cross_bound_holds = r.int_abs_z3z4 <= r.K * T * r.int_z4_sq;
  r.square_bound_holds = r.int_z3_sq <= r.K * r.K * T * T * r.int_z4_sq;
  return r;
}

// ---------------------------------------------------------------------------
// Epsilon sweep.

SweepResult epsilon_sweep(const PhysParams& params, const std::vector<double>& eps_list, std::uint64_t seed,
                          const SweepOptions& opt) {
  const PhysParams p = validate_params(params);
  SweepResult out;
  out.cls = classify(p);
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1])))
      throw InvalidArgument("eps list must be positive and strictly decreasing");

  const bool coords = p.m1 != p.m2 && p.m1 + p.m2 != 0.0;
  std::optional<ZetaFunctional> zf;
  if (coords) zf.emplace(p);

  for (double eps : eps_list) {
    SweepRow row;
    row.eps = eps;
    row.horizon = opt.fixed_horizon > 0.0 ? opt.fixed_horizon : opt.horizon_factor * eps;
    row.loop = loop_search(p, eps, row.horizon, seed, opt.loop);
    if (zf) {
      // Obstruction ratio on the candidate carrying the most z4 energy.
      double best_energy = -1.0;
      for (const LoopCandidate& c : row.loop.candidates) {
        const ObstructionRatio r = obstruction_ratio(c.trajectory, *zf);
        if (r.ratio && r.z4_energy > best_energy) {
          best_energy = r.z4_energy;
          row.ratio = r.ratio;
        }
        row.inequalities.push_back(lemma_bounds_check(c.trajectory, p));
      }
    }
    out.rows.push_back(std::move(row));
  }

  const std::size_t n = out.rows.size();
  for (std::size_t i = 1; i < n; ++i)
    if (out.rows[i].loop.objective > out.rows[i - 1].loop.objective + opt.monotone_noise) ++out.monotone_violations;
  if (n >= 2) {
    long conc = 0, disc = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double de = out.rows[i].eps - out.rows[j].eps;
        const double dob = out.rows[i].loop.objective - out.rows[j].loop.objective;
        if (std::abs(dob) <= opt.monotone_noise) continue;
        (de * dob > 0 ? conc : disc) += 1;
      }
    const double pairs = static_cast<double>(n * (n - 1) / 2);
    out.kendall_tau = static_cast<double>(conc - disc) / pairs;
  }

  if (out.cls.regime == Regime::STLC)
    out.verdict = kVerdictNotApplicable;
  else if (n < 2)
    out.verdict = kVerdictNoTrend;
  else if (out.monotone_violations == 0 && out.rows.back().loop.objective < opt.loop.nontrivial_threshold)
    out.verdict = kVerdictObstruction;
  else
    out.verdict = kVerdictNoObstruction;
  return out;
}

// ---------------------------------------------------------------------------
// Random-control obstruction study.

std::vector<ObstructionLevel> obstruction_study(const PhysParams& params, const std::vector<double>& eps_list,
                                                std::uint64_t seed, const ObstructionStudyOptions& opt) {
  const PhysParams p = validate_params(params);
  if (opt.samples < 1 || opt.intervals < 1) throw InvalidArgument("obstruction study needs samples and intervals");
  const ZetaFunctional zf(p);
  const double c0 = c0_closed_form(p);
  std::vector<ObstructionLevel> out;
  for (std::size_t li = 0; li < eps_list.size(); ++li) {
    const double eps = eps_list[li];
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    ObstructionLevel lvl;
    lvl.eps = eps;
    lvl.horizon = opt.horizon_factor * eps;
    const double floor = opt.relative_energy_floor * eps * eps * std::pow(lvl.horizon, 3);
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(li)};
    std::mt19937_64 rng(sq);
    std::uniform_real_distribution<double> unif(-eps, eps);
    std::vector<double> dev;
    for (int s = 0; s < opt.samples; ++s) {
      std::vector<ControlInput> v(opt.intervals);
      for (auto& c : v) {
        c.h_perp = unif(rng);
        c.h_par = unif(rng);
      }
      const Trajectory traj =
          integrate(p, {}, ControlSignal::piecewise_constant(lvl.horizon, v), lvl.horizon, opt.tol);
      const ObstructionRatio r = obstruction_ratio(traj, zf, floor);
      if (!r.ratio) {
        ++lvl.undefined;
        continue;
      }
      lvl.ratios.push_back(*r.ratio);
      dev.push_back(std::abs(*r.ratio - c0));
    }
    if (!dev.empty()) {
      std::sort(dev.begin(), dev.end());
      const std::size_t m = dev.size();
      lvl.median_abs_deviation = m % 2 ? dev[m / 2] : 0.5 * (dev[m / 2 - 1] + dev[m / 2]);
    } else {
      lvl.median_abs_deviation = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(lvl));
  }
  return out;
}

}  // namespace microswim
