#include <doctest.h>

#include <cmath>

#include "microswim/errors.hpp"
#include "microswim/expansion.hpp"
#include "support.hpp"

using namespace microswim;

namespace {

double computed_constant(const TaylorReport& r, const std::string& name) {
  for (const auto& c : r.constants)
    if (c.name == name) return c.computed;
  FAIL("missing constant " << name);
  return 0.0;
}

bool has_notice(const TaylorReport& r, const std::string& prefix) {
  for (const auto& n : r.notices)
    if (n.rfind(prefix, 0) == 0) return true;
  return false;
}

}  // namespace

TEST_SUITE("expansion") {
  TEST_CASE("taylor coefficients of elementary functions") {
    const auto sq = taylor_coeff([](const auto& a) { return a * a; }, 2);
    CHECK(std::abs(sq.value - 1.0) < 1e-10);
    CHECK(sq.error < 1e-10);
    const auto s = taylor_coeff(
        [](const auto& a) {
          using std::sin;
          return sin(a);
        },
        1);
    CHECK(std::abs(s.value - 1.0) < 1e-10);
    CHECK(s.error < 1e-10);
    const auto s3 = taylor_coeff(
        [](const auto& a) {
          using std::sin;
          return sin(a);
        },
        3);
    CHECK(std::abs(s3.value + 1.0 / 6.0) < 1e-12);
  }

  TEST_CASE("order outside [0, 4] is rejected") {
    const auto f = [](const auto& a) { return a; };
    CHECK_THROWS_AS(taylor_coeff(f, -1), InvalidArgument);
    CHECK_THROWS_AS(taylor_coeff(f, 5), InvalidArgument);
  }

  TEST_CASE("disagreeing routes raise InconsistentMethods") {
    // The double path sees an extra cubic term the series path does not.
    struct Split {
      double operator()(double a) const { return a + 0.5 * a * a * a; }
      Jet<kMaxTaylorOrder> operator()(const Jet<kMaxTaylorOrder>& a) const { return a; }
    };
    CHECK_THROWS_AS(taylor_coeff(Split{}, 3), InconsistentMethods);
  }

  TEST_CASE("drift rotation rate slope at the reference parameters") {
    const PhysParams p = kReferenceParams;
    const auto est = taylor_coeff([&](const auto& a) { return f_table(a, p)[kDrift][2]; }, 1);
    CHECK(est.value == doctest::Approx(6.0).epsilon(1e-10));
  }

  TEST_CASE("closed-form constants at the reference parameters") {
    // a1 = 1.5, a2 = 12, b1 = -3/8, b2 = 9/8, b3 = 21/4, b4 = -6 evaluated by hand.
    const ExpansionConstants c = closed_form_constants(kReferenceParams);
    CHECK(c.a1 == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(c.a2 == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(c.b1 == doctest::Approx(-0.375).epsilon(1e-15));
    CHECK(c.b2 == doctest::Approx(1.125).epsilon(1e-15));
    CHECK(c.b3 == doctest::Approx(5.25).epsilon(1e-15));
    CHECK(c.b4 == doctest::Approx(-6.0).epsilon(1e-15));
  }

  TEST_CASE("reference report passes every check") {
    const TaylorReport r = expansion_report(kReferenceParams);
    CHECK(r.all_pass());
    CHECK(r.first_failure().empty());
    CHECK(r.coefficients.size() == 18);
    CHECK(r.remainders.size() == 12);
    CHECK(r.constants.size() == 6);
    CHECK(r.notices.empty());
    for (const auto& c : r.coefficients) CHECK(c.error_estimate < c.tolerance);
    CHECK(computed_constant(r, "a1") == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(computed_constant(r, "a2") == doctest::Approx(12.0).epsilon(1e-6));
    CHECK(computed_constant(r, "b1") == doctest::Approx(-0.375).epsilon(1e-6));
    CHECK(computed_constant(r, "b2") == doctest::Approx(1.125).epsilon(1e-6));
    CHECK(computed_constant(r, "b3") == doctest::Approx(5.25).epsilon(1e-6));
    CHECK(computed_constant(r, "b4") == doctest::Approx(-6.0).epsilon(1e-6));
    CHECK_NOTHROW(require_expansion_match(r));
  }

  TEST_CASE("random parameter sets pass and the h_par channel vanishes on the straight shape") {
    for (const PhysParams& p : test::random_params(5, 21)) {
      const TaylorReport r = expansion_report(p);
      CHECK_MESSAGE(r.all_pass(), r.first_failure());
      for (int j = 0; j < 4; ++j) {
        CHECK(std::abs(f_table(0.0, p)[kPar][j]) < 1e-10);
        CHECK(std::abs(f_table(0.0, p)[kDrift][j]) < 1e-10);
      }
    }
  }

  TEST_CASE("equal magnetizations: b4 = 0 is reported and flagged") {
    const TaylorReport r = expansion_report({1, 1, 2, 1, 1.5, 1.5});
    CHECK(r.all_pass());
    CHECK(std::abs(computed_constant(r, "b4")) < 1e-10);
    CHECK(has_notice(r, "degenerate: b4=0"));
  }

  TEST_CASE("equal drag coefficients are flagged") {
    const TaylorReport r = expansion_report({1, 1, 1, 1, 1, 2});
    CHECK(r.all_pass());
    CHECK(has_notice(r, "degenerate: xi=eta"));
  }

  TEST_CASE("wrong reference point is caught by the oracle") {
    ExpansionOptions opt;
    opt.reference = ReferencePoint::joint;
    const TaylorReport r = expansion_report(kReferenceParams, opt);
    CHECK_FALSE(r.all_pass());
    CHECK_THROWS_AS(require_expansion_match(r), OracleMismatch);
  }

  TEST_CASE("magnetization ratio identity") {
    for (const PhysParams& p : test::random_params(20, 22)) {
      const ExpansionConstants c = closed_form_constants(p);
      const double lhs = 8 * (p.m1 - p.m2) / (p.m1 + p.m2);
      const double rhs = 1.0 / (0.5 + c.b3 / c.b4);
      CHECK(test::rel_diff(lhs, rhs) < 1e-12);
      // Same identity on the model's own coefficients.
      const auto f = f_table(0.0, p);
      CHECK(test::rel_diff(lhs, 1.0 / (0.5 + f[kPerp][2] / f[kPerp][3])) < 1e-10);
    }
  }

  TEST_CASE("scaling both magnetizations scales b and leaves a") {
    for (const PhysParams& p : test::random_params(3, 23)) {
      for (double s : {2.0, -0.5}) {
        PhysParams q = p;
        q.m1 *= s;
        q.m2 *= s;
        const TaylorReport r0 = expansion_report(p);
        const TaylorReport r1 = expansion_report(q);
        for (const char* name : {"a1", "a2"})
          CHECK(computed_constant(r1, name) == doctest::Approx(computed_constant(r0, name)).epsilon(1e-9));
        for (const char* name : {"b1", "b2", "b3", "b4"})
          CHECK(computed_constant(r1, name) == doctest::Approx(s * computed_constant(r0, name)).epsilon(1e-9));
      }
    }
  }
}
