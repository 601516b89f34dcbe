// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "microswim/controllability.hpp"
#include "microswim/expansion.hpp"
#include "microswim/simulator.hpp"
#include "microswim/transform.hpp"
#include "support.hpp"

using namespace microswim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && dt > budget_s) {
    r.pass = false;
    r.detail += " (over time budget)";
  }
  if (!r.pass) ++failures;
  std::printf("%s criterion %d: %s [%.1f s] %s\n", r.pass ? "PASS" : "FAIL", id, title, dt, r.detail.c_str());
  std::fflush(stdout);
}

std::vector<PhysParams> sample_with_reference() {
  std::vector<PhysParams> s = test::random_params(20, 2024);
  s.push_back(kReferenceParams);
  return s;
}

double constant_of(const TaylorReport& r, const char* name) {
  for (const auto& c : r.constants)
    if (c.name == name) return c.computed;
  return std::nan("");
}

// Criterion 6 result, reused by criterion 7.
std::optional<SweepResult> sweep;

}  // namespace

int main() {
  const PhysParams ref = kReferenceParams;

  criterion(1, "expansion oracle on 20 random sets and the reference set", 30, [] {
    int bad = 0;
    std::string first;
    double worst = 0.0;
    for (const PhysParams& p : sample_with_reference()) {
      const TaylorReport r = expansion_report(p);
      for (const auto& c : r.constants) worst = std::max(worst, c.rel_error);
      if (!r.all_pass()) {
        ++bad;
        if (first.empty()) first = r.first_failure();
      }
    }
    std::ostringstream d;
    d << "failing sets " << bad << ", worst constant rel error " << worst;
    if (!first.empty()) d << ", first failure " << first;
    return Outcome{bad == 0 && worst <= 1e-6, d.str()};
  });

  criterion(2, "magnetization ratio identity", 0, [] {
    double worst = 0.0;
    for (const PhysParams& p : sample_with_reference()) {
      if (p.m1 == p.m2 || p.m1 + p.m2 == 0.0) continue;
      const TaylorReport r = expansion_report(p);
      const double lhs = 8 * (p.m1 - p.m2) / (p.m1 + p.m2);
      const double rhs = 1.0 / (0.5 + constant_of(r, "b3") / constant_of(r, "b4"));
      worst = std::max(worst, test::rel_diff(rhs, lhs));
    }
    return Outcome{worst <= 1e-12, "worst rel error " + std::to_string(worst)};
  });

  criterion(3, "regression composite vs closed-form obstruction constant", 120, [] {
    double worst = 0.0;
    for (const PhysParams& p : test::random_params(10, 77)) {
      const DerivedConstants d = derived_constants(p);
      worst = std::max(worst, test::rel_diff(*d.c0_regression, d.c0));
    }
    const DerivedConstants d = derived_constants(kReferenceParams);
    const bool ref_ok = d.c0 == 40.5 && std::abs(*d.c0_regression - 40.5) <= 0.004;
    std::ostringstream s;
    s << "worst rel error " << worst << ", reference closed form " << d.c0 << ", regression " << *d.c0_regression;
    return Outcome{worst <= 1e-4 && ref_ok, s.str()};
  });

  criterion(4, "equal drag coefficients give c0 = 0", 0, [] {
    const PhysParams p{1, 1, 1, 1, 1, 2};
    const DerivedConstants d = derived_constants(p);
    std::ostringstream s;
    s << "closed form " << d.c0 << ", regression " << *d.c0_regression;
    return Outcome{std::abs(d.c0) <= 1e-10 && std::abs(*d.c0_regression) <= 1e-6, s.str()};
  });

  criterion(5, "obstruction ratio converges to c0", 120, [&] {
    const auto levels = obstruction_study(ref, {1e-1, 1e-2, 1e-3}, 5);
    std::ostringstream s;
    bool ok = levels.size() == 3;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      s << "eps " << levels[i].eps << ": median |ratio - c0| " << levels[i].median_abs_deviation << " ("
        << levels[i].ratios.size() << " defined); ";
      ok = ok && std::isfinite(levels[i].median_abs_deviation) && levels[i].ratios.size() == 50;
      if (i > 0) ok = ok && levels[i].median_abs_deviation < levels[i - 1].median_abs_deviation;
    }
    ok = ok && levels.back().median_abs_deviation < 1.0;
    return Outcome{ok, s.str()};
  });

  criterion(6, "loop sweep shows the obstruction", 300, [&] {
    const double q = stlc_threshold(ref);
    sweep = epsilon_sweep(ref, {0.3 * q, 0.03 * q, 0.003 * q}, 1);
    std::ostringstream s;
    bool ok = true;
    for (std::size_t i = 0; i < sweep->rows.size(); ++i) {
      const SweepRow& r = sweep->rows[i];
      double best_candidate = 0.0;
      for (const auto& c : r.loop.candidates) best_candidate = std::max(best_candidate, c.objective);
      s << "eps " << r.eps << ": " << to_string(r.loop.status) << " objective " << r.loop.objective
        << " (largest penalty-stage candidate " << best_candidate << "); ";
      if (i > 0) ok = ok && r.loop.objective <= sweep->rows[i - 1].loop.objective;
      ok = ok && r.loop.candidates.size() == 8;
    }
    ok = ok && sweep->rows.back().loop.objective < 1e-6 && sweep->verdict == kVerdictObstruction;
    s << "verdict " << sweep->verdict;
    return Outcome{ok, s.str()};
  });

  criterion(7, "integral inequalities on every loop candidate", 0, [&] {
    if (!sweep) return Outcome{false, "no sweep result"};
    int checked = 0, violated = 0, skipped = 0;
    double k1 = 0.0, k2 = 0.0;
    for (const SweepRow& r : sweep->rows) {
      std::vector<const Trajectory*> trajs;
      for (const auto& c : r.loop.candidates) trajs.push_back(&c.trajectory);
      for (const auto& c : r.loop.restored) trajs.push_back(&c.trajectory);
      for (const Trajectory* t : trajs) {
        const InequalityReport ir = lemma_bounds_check(*t, ref, 1e-14);
        if (ir.undefined_ratio) {
          ++skipped;
          continue;
        }
        ++checked;
        if (!ir.cross_bound_holds || !ir.square_bound_holds) ++violated;
        k1 = std::max(k1, ir.K1 / ir.K);
        k2 = std::max(k2, ir.K2 / ir.K);
      }
    }
    std::ostringstream s;
    s << checked << " trajectories checked, " << skipped << " below the energy floor, " << violated
      << " violations, max K1/K " << k1 << ", max K2/K " << k2;
    return Outcome{checked > 0 && violated == 0, s.str()};
  });

  criterion(8, "threshold and classification", 0, [&] {
    const ControllabilityClass a = classify(ref);
    PhysParams same_drag = ref;
    same_drag.eta = same_drag.xi;
    PhysParams balanced = ref;
    balanced.m1 = -1;
    balanced.m2 = 1;
    const bool ok = stlc_threshold(ref) == 3.0 && a.q == 3.0 && a.regime == Regime::STLC_Q_NOT_STLC &&
                    classify(same_drag).regime == Regime::NOT_STLC_Q_ANY &&
                    classify(balanced).regime == Regime::STLC;
    std::ostringstream s;
    s << "q " << a.q << ", " << to_string(a.regime) << ", eta=xi " << to_string(classify(same_drag).regime)
      << ", m=(-1,1) " << to_string(classify(balanced).regime);
    return Outcome{ok, s.str()};
  });

  criterion(9, "rigid-motion equivariance and integrator order", 30, [&] {
    ControlSignal::Sinusoid sn;
    sn.amp_perp = 0.8;
    sn.amp_par = 0.5;
    sn.omega = 3.0;
    sn.phase_perp = 0.3;
    sn.phase_par = 1.1;
    const ControlSignal u = ControlSignal::sinusoidal(sn);
    const SwimmerState z0{0.1, 0.2, 0.3, 0.05};
    const double id = equivariance_check(ref, z0, u, 3.0, {});
    const double rot = equivariance_check(ref, z0, u, 3.0, {std::numbers::pi / 2, 0, 0});
    const double tr = equivariance_check(ref, z0, u, 3.0, {0, 5, -3});
    double slopes[2];
    int k = 0;
    for (auto [method, kappa, ns] : {std::tuple{FixedMethod::rk4, 1.0, std::vector<int>{32, 64, 128, 256}},
                                     std::tuple{FixedMethod::dopri5, 0.2, std::vector<int>{32, 64, 128}}}) {
      const PhysParams p{1, 1, 2, kappa, 1, 2};
      const State4 exact = integrate_fixed(p, {0, 0, 0, 0.1}, u, 1.0, 16384, FixedMethod::dopri5);
      std::vector<double> hs, errs;
      for (int n : ns) {
        hs.push_back(1.0 / n);
        errs.push_back(test::max_diff(integrate_fixed(p, {0, 0, 0, 0.1}, u, 1.0, n, method), exact));
      }
      slopes[k++] = test::loglog_slope(hs, errs);
    }
    std::ostringstream s;
    s << "identity " << id << ", rotation " << rot << ", translation " << tr << ", rk4 slope " << slopes[0]
      << ", dopri5 slope " << slopes[1];
    const bool ok = id == 0.0 && rot < 1e-8 && tr < 1e-12 && std::abs(slopes[0] - 4) <= 0.3 &&
                    std::abs(slopes[1] - 5) <= 0.3;
    return Outcome{ok, s.str()};
  });

  return failures == 0 ? 0 : 1;
}
