#include <doctest.h>

#include <cmath>
#include <random>

#include "microswim/controllability.hpp"
#include "microswim/errors.hpp"
#include "microswim/lbfgs.hpp"
#include "support.hpp"

using namespace microswim;

namespace {

Trajectory random_trajectory(const PhysParams& p, double eps, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-eps, eps);
  std::vector<ControlInput> v;
  for (int i = 0; i < n; ++i) v.push_back({U(rng), U(rng)});
  return integrate(p, {}, ControlSignal::piecewise_constant(eps, v), eps, {1e-12, 1e-30});
}

LoopSearchOptions quick(int starts) {
  LoopSearchOptions o;
  o.starts = starts;
  return o;
}

}  // namespace

TEST_SUITE("controllability") {
  TEST_CASE("classification examples") {
    const ControllabilityClass a = classify(kReferenceParams);
    CHECK(a.regime == Regime::STLC_Q_NOT_STLC);
    CHECK(a.q == doctest::Approx(3.0));
    CHECK(a.c0 == doctest::Approx(40.5));
    CHECK(classify({1, 1, 1, 1, 1, 2}).regime == Regime::NOT_STLC_Q_ANY);
    CHECK(classify({1, 1, 2, 1, 1.5, 1.5}).regime == Regime::NOT_STLC_Q_ANY);
    const ControllabilityClass s = classify({1, 1, 2, 1, -1, 1});
    CHECK(s.regime == Regime::STLC);
    CHECK(s.q == 0.0);
    CHECK(std::string(to_string(Regime::STLC_Q_NOT_STLC)) == "STLC_Q_NOT_STLC");
  }

  TEST_CASE("regime invariants on random sets") {
    for (const PhysParams& p : test::random_params(20, 61)) {
      const ControllabilityClass c = classify(p);
      CHECK(c.regime == Regime::STLC_Q_NOT_STLC);
      CHECK(c.q > 0.0);
      CHECK(c.c0 != 0.0);
    }
  }

  TEST_CASE("swapping the magnetizations keeps |q| and |c0| and flips the sign of c0") {
    for (const PhysParams& p : test::random_params(10, 62)) {
      PhysParams s = p;
      std::swap(s.m1, s.m2);
      const ControllabilityClass a = classify(p), b = classify(s);
      CHECK(a.regime == b.regime);
      CHECK(std::abs(a.q) == doctest::Approx(std::abs(b.q)).epsilon(1e-15));
      CHECK(b.c0 == doctest::Approx(-a.c0).epsilon(1e-14));
    }
  }

  TEST_CASE("objective gradient matches central differences") {
    const PhysParams p = kReferenceParams;
    const int n = 6;
    LoopObjective obj(p, 0.5, 0.5, n, 60, 8);
    obj.penalty = 3.0;
    std::mt19937_64 rng(63);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> w(2 * n), g;
      for (double& v : w) v = N(rng);
      obj(w, g);
      double gmax = 0.0, worst = 0.0;
      for (double v : g) gmax = std::max(gmax, std::abs(v));
      for (int i = 0; i < 2 * n; ++i) {
        const double h = 1e-5;
        std::vector<double> wp = w, wm = w, dummy;
        wp[i] += h;
        wm[i] -= h;
        const double fd = (obj(wp, dummy) - obj(wm, dummy)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g[i]));
      }
      CHECK(worst <= 1e-5 * gmax);
    }
  }

  TEST_CASE("L-BFGS minimizes a Rosenbrock valley") {
    std::vector<double> x{-1.2, 1.0};
    LbfgsOptions o;
    o.max_iterations = 500;
    const LbfgsResult r = lbfgs_minimize(
        [](const std::vector<double>& v, std::vector<double>& g) {
          const double a = 1 - v[0], b = v[1] - v[0] * v[0];
          g = {-2 * a - 400 * v[0] * b, 200 * b};
          return a * a + 100 * b * b;
        },
        x, o);
    CHECK(r.value < 1e-12);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("loop search argument checks and the zero bound") {
    CHECK_THROWS_AS(loop_search(kReferenceParams, -1.0, 1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(loop_search(kReferenceParams, 0.1, 0.0, 0), InvalidArgument);
    LoopSearchOptions o;
    o.intervals = 1;
    CHECK_THROWS_AS(loop_search(kReferenceParams, 0.1, 1.0, 0, o), InvalidArgument);
    const LoopResult r = loop_search(kReferenceParams, 0.0, 1.0, 0);
    CHECK(r.status == LoopStatus::feasible);
    CHECK(r.objective == 0.0);
    CHECK(r.defect == 0.0);
    CHECK_FALSE(r.nontrivial);
  }

  TEST_CASE("large bound admits a nontrivial loop") {
    const double q = stlc_threshold(kReferenceParams);
    const LoopResult r = loop_search(kReferenceParams, 10 * q, 1.0, 7, quick(1));
    CHECK(r.status == LoopStatus::feasible);
    CHECK(r.objective > 1e-3);
    CHECK(r.defect <= 1e-9 * r.objective);
    CHECK(r.nontrivial);
  }

  TEST_CASE("small bound: every start collapses") {
    const double eps = 1e-3 * stlc_threshold(kReferenceParams);
    const LoopResult r = loop_search(kReferenceParams, eps, eps, 7, quick(2));
    CHECK(r.objective < 1e-6);
    CHECK_FALSE(r.nontrivial);
  }

  TEST_CASE("balanced magnetizations admit small loops") {
    const LoopResult r = loop_search({1, 1, 2, 1, -1, 1}, 0.1, 0.1, 3, quick(1));
    CHECK(r.status == LoopStatus::feasible);
    CHECK(r.nontrivial);
    CHECK(r.defect <= 1e-9 * r.objective);
  }

  TEST_CASE("loop search is deterministic given the seed") {
    const LoopResult a = loop_search(kReferenceParams, 0.3, 0.3, 11, quick(1));
    const LoopResult b = loop_search(kReferenceParams, 0.3, 0.3, 11, quick(1));
    REQUIRE(a.candidates.size() == b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
      CHECK(a.candidates[i].objective == b.candidates[i].objective);
      CHECK(a.candidates[i].defect == b.candidates[i].defect);
    }
    CHECK(a.objective == b.objective);
  }

  TEST_CASE("integral inequalities on the equilibrium") {
    const Trajectory tr = integrate(kReferenceParams, {}, ControlSignal::zero(), 0.1);
    const InequalityReport r = lemma_bounds_check(tr, kReferenceParams);
    CHECK(r.undefined_ratio);
    CHECK(r.int_abs_z3z4 == 0.0);
    CHECK(r.int_z3_sq == 0.0);
    CHECK(r.int_z4_sq == 0.0);
  }

  TEST_CASE("integral inequalities on random trajectories from the origin") {
    for (const PhysParams& p : {kReferenceParams, PhysParams{1.3, 0.7, 1.9, 1.1, 0.8, -1.7}}) {
      for (double eps : {0.1, 0.01}) {
        for (std::uint64_t s = 0; s < 5; ++s) {
          const Trajectory tr = random_trajectory(p, eps, 8, 100 + s);
          const InequalityReport r = lemma_bounds_check(tr, p, 1e-14 * std::pow(eps, 5));
          CHECK_FALSE(r.undefined_ratio);
          CHECK(r.cross_bound_holds);
          CHECK(r.square_bound_holds);
          CHECK(r.K1 <= r.K);
          CHECK(r.K2 <= r.K);
          CHECK(std::isfinite(r.K));
          CHECK(r.refinement_change < 0.005);
        }
      }
    }
  }

  TEST_CASE("sweep verdicts") {
    SweepOptions o;
    o.loop = quick(1);
    o.loop.intervals = 10;
    o.loop.steps = 100;
    const SweepResult one = epsilon_sweep(kReferenceParams, {0.01}, 5, o);
    CHECK(one.rows.size() == 1);
    CHECK(one.verdict == kVerdictNoTrend);
    const SweepResult stlc = epsilon_sweep({1, 1, 2, 1, -1, 1}, {0.1, 0.01}, 5, o);
    CHECK(stlc.cls.regime == Regime::STLC);
    CHECK(stlc.verdict == kVerdictNotApplicable);
    CHECK_THROWS_AS(epsilon_sweep(kReferenceParams, {0.01, 0.1}, 5, o), InvalidArgument);
    CHECK_THROWS_AS(epsilon_sweep(kReferenceParams, {0.1, -0.01}, 5, o), InvalidArgument);
  }

  TEST_CASE("equal drag coefficients: sweep runs, ratios shrink with the bound") {
    const PhysParams p{1, 1, 1, 1, 1, 2};
    SweepOptions o;
    o.loop = quick(1);
    o.loop.intervals = 10;
    o.loop.steps = 100;
    const SweepResult r = epsilon_sweep(p, {0.01, 0.001}, 5, o);
    CHECK(r.cls.regime == Regime::NOT_STLC_Q_ANY);
    CHECK(r.cls.c0 == 0.0);
    CHECK(r.rows.size() == 2);

    ObstructionStudyOptions so;
    so.samples = 20;
    const auto levels = obstruction_study(p, {0.1, 0.01, 0.001}, 3, so);
    CHECK(levels[1].median_abs_deviation < levels[0].median_abs_deviation);
    CHECK(levels[2].median_abs_deviation < levels[1].median_abs_deviation);
  }

  TEST_CASE("obstruction study is reproducible and converges") {
    ObstructionStudyOptions o;
    o.samples = 10;
    const auto a = obstruction_study(kReferenceParams, {0.1, 0.01, 0.001}, 9, o);
    const auto b = obstruction_study(kReferenceParams, {0.1, 0.01, 0.001}, 9, o);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].ratios == b[i].ratios);
    CHECK(a[2].median_abs_deviation < a[0].median_abs_deviation);
    CHECK(a[2].median_abs_deviation < 1.0);
  }
}
