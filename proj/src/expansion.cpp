#include "microswim/expansion.hpp"

#include <algorithm>

namespace microswim {

namespace detail {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double stencil_step(int order, const TaylorOptions& opt) {
  // Higher derivatives divide by h^order; coarser steps keep rounding in check.
  switch (order) {
    case 3:
      return 20.0 * opt.base_step;
    case 4:
      return 50.0 * opt.base_step;
    default:
      return opt.base_step;
  }
}

}  // namespace detail

ExpansionConstants closed_form_constants(const PhysParams& p) {
  const double l2 = p.ell * p.ell;
  const double l3 = l2 * p.ell;
  ExpansionConstants c{};
  c.a1 = 3.0 * p.kappa / (l2 * p.eta);
  c.a2 = 24.0 * p.kappa / (l3 * p.eta);
  c.b1 = 1.5 * (p.m2 - p.m1) / (l2 * p.eta) - 0.375 * (p.m1 + p.m2) / (l2 * p.xi);
  c.b2 = 0.75 * (p.m1 + p.m2) / (l2 * p.eta);
  c.b3 = 3.0 * (5.0 * p.m2 - 3.0 * p.m1) / (2.0 * l3 * p.eta);
  c.b4 = 12.0 * (p.m1 - p.m2) / (l3 * p.eta);
  return c;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::string CoefficientCheck::id() const {
  return "f" + std::to_string(channel) + "," + std::to_string(component) + "[" + std::to_string(order) + "]";
}

std::string RemainderCheck::id() const {
  return "f" + std::to_string(channel) + "," + std::to_string(component) + " remainder O(alpha^" +
         std::to_string(truncation_order + 1) + ")";
}

bool TaylorReport::all_pass() const { return first_failure().empty(); }

std::string TaylorReport::first_failure() const {
  for (const auto& c : coefficients)
    if (c.status != CheckStatus::pass) return c.id();
  for (const auto& r : remainders)
    if (r.status != CheckStatus::pass) return r.id();
  for (const auto& c : constants)
    if (c.status != CheckStatus::pass) return c.name;
  return {};
}

namespace {

struct Claim {
  int channel;
  int component;
  int order;
  const char* symbol;
  double closed;
};

/// Truncation order k of the O(alpha^(k+1)) remainder for each f_{i,j}.
constexpr int kTruncation[3][4] = {
    {2, 1, 1, 1},  // f0,1 = a1 a^2 + O(a^3); f0,2 = O(a^2); f0,3, f0,4 linear + O(a^2)
    {1, 0, 0, 0},  // f1,1 = b1 a + O(a^2); f1,j = b_j + O(a)
    {0, 0, 0, 0},  // f2,j = O(a)
};

}  // namespace

TaylorReport expansion_report(const PhysParams& params, const ExpansionOptions& opt) {
  const PhysParams p = validate_params(params);
  const ExpansionConstants cf = closed_form_constants(p);
  TaylorReport report;
  report.params = p;

  const double scale =
      std::max({std::abs(cf.a1), std::abs(cf.a2), std::abs(cf.b1), std::abs(cf.b2), std::abs(cf.b3), std::abs(cf.b4)});

  TaylorOptions topt = opt.taylor;
  topt.absolute_floor = std::max(topt.absolute_floor, opt.zero_abs_tol * scale);

  const auto fn = [&](int ch, int comp) {
    return [&p, ch, comp, ref = opt.reference](const auto& a) { return f_table(a, p, ref)[ch][comp - 1]; };
  };

  const std::vector<Claim> claims = {
      {2, 1, 0, "0", 0.0},        {2, 2, 0, "0", 0.0},       {2, 3, 0, "0", 0.0},
      {2, 4, 0, "0", 0.0},        {0, 1, 0, "0", 0.0},       {0, 1, 1, "0", 0.0},
      {0, 1, 2, "a1", cf.a1},     {0, 2, 0, "0", 0.0},       {0, 2, 1, "0", 0.0},
      {0, 3, 0, "0", 0.0},        {0, 3, 1, "a2/2", cf.a2 / 2}, {0, 4, 0, "0", 0.0},
      {0, 4, 1, "-a2", -cf.a2},   {1, 1, 0, "0", 0.0},       {1, 1, 1, "b1", cf.b1},
      {1, 2, 0, "b2", cf.b2},     {1, 3, 0, "b3", cf.b3},    {1, 4, 0, "b4", cf.b4},
  };

  // Series coefficients, kept for the constants table and remainder fits.
  double coef[3][4][3] = {};

  for (const Claim& cl : claims) {
    CoefficientCheck c;
    c.channel = cl.channel;
    c.component = cl.component;
    c.order = cl.order;
    c.symbol = cl.symbol;
    c.closed_form = cl.closed;
    c.tolerance = cl.closed != 0.0 ? opt.match_rel_tol * std::abs(cl.closed) : opt.zero_abs_tol * scale;
    try {
      const TaylorEstimate est = taylor_coeff(fn(cl.channel, cl.component), cl.order, topt);
      c.computed = est.value;
      c.error_estimate = est.error;
      c.abs_error = std::abs(est.value - cl.closed);
      c.rel_error = cl.closed != 0.0 ? c.abs_error / std::abs(cl.closed) : c.abs_error / scale;
      if (c.error_estimate >= c.tolerance)
        c.status = CheckStatus::inconclusive;
      else
        c.status = c.abs_error <= c.tolerance ? CheckStatus::pass : CheckStatus::fail;
    } catch (const InconsistentMethods& e) {
      c.status = CheckStatus::inconclusive;
      report.notices.push_back(c.id() + ": " + e.what());
    }
    coef[cl.channel][cl.component - 1][cl.order] = c.computed;
    report.coefficients.push_back(c);
  }

  // Remainder structure: fit log|f - truncation| against log|alpha|.
  constexpr int kPoints = 13;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int ch = 0; ch < 3; ++ch)
    for (int comp = 1; comp <= 4; ++comp) {
      RemainderCheck r;
      r.channel = ch;
      r.component = comp;
      r.truncation_order = kTruncation[ch][comp - 1];
      const auto f = fn(ch, comp);
      const auto truncation = [&](double a) {
        double s = 0.0, pw = 1.0;
        for (int k = 0; k <= r.truncation_order; ++k, pw *= a) s += coef[ch][comp - 1][k] * pw;
        return s;
      };
      std::vector<double> lx, ly;
      for (int i = 0; i < kPoints; ++i) {
        const double a = std::pow(10.0, -4.0 + 3.0 * i / (kPoints - 1));
        double worst = 0.0, floor = 0.0;
        for (double s : {a, -a}) {
          const double v = f(s);
          const double t = truncation(s);
          worst = std::max(worst, std::abs(v - t));
          floor = std::max(floor, 64.0 * eps * (std::abs(v) + std::abs(t) + scale * std::pow(a, r.truncation_order)));
        }
        if (worst > floor) {
          lx.push_back(std::log(a));
          ly.push_back(std::log(worst));
        }
      }
      if (lx.size() < 3) {
        r.identically_zero = true;
        r.status = CheckStatus::pass;
      } else {
        const double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
          sx += lx[i];
          sy += ly[i];
          sxx += lx[i] * lx[i];
          sxy += lx[i] * ly[i];
        }
        r.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        r.fitted_constant = std::exp((sy - r.fitted_slope * sx) / n);
        r.status = r.fitted_slope >= r.truncation_order + opt.slope_margin ? CheckStatus::pass : CheckStatus::fail;
      }
      report.remainders.push_back(r);
    }

  // Constants read off the series; a2 from f0,3 (the f0,4 claim is a separate check above).
  const std::array<std::pair<const char*, std::pair<double, double>>, 6> consts = {{
      {"a1", {coef[0][0][2], cf.a1}},
      {"a2", {2.0 * coef[0][2][1], cf.a2}},
      {"b1", {coef[1][0][1], cf.b1}},
      {"b2", {coef[1][1][0], cf.b2}},
      {"b3", {coef[1][2][0], cf.b3}},
      {"b4", {coef[1][3][0], cf.b4}},
  }};
  for (const auto& [name, vals] : consts) {
    ConstantCheck c;
    c.name = name;
    c.computed = vals.first;
    c.closed_form = vals.second;
    const double err = std::abs(vals.first - vals.second);
    c.rel_error = vals.second != 0.0 ? err / std::abs(vals.second) : err / scale;
    const double tol = vals.second != 0.0 ? opt.match_rel_tol : opt.zero_abs_tol;
    c.status = c.rel_error <= tol ? CheckStatus::pass : CheckStatus::fail;
    report.constants.push_back(c);
  }

  if (p.m1 == p.m2) report.notices.emplace_back("degenerate: b4=0 (normal coordinates undefined)");
  if (p.m1 + p.m2 == 0.0) report.notices.emplace_back("degenerate: m1+m2=0 (normal coordinates undefined)");
  if (p.xi == p.eta) report.notices.emplace_back("degenerate: xi=eta (obstruction constant vanishes)");
  return report;
}

void require_expansion_match(const TaylorReport& report) {
  for (const auto& c : report.coefficients)
    if (c.status != CheckStatus::pass) throw OracleMismatch(c.id(), c.computed, c.closed_form);
  for (const auto& r : report.remainders)
    if (r.status != CheckStatus::pass) throw OracleMismatch(r.id(), r.fitted_slope, r.truncation_order + 1);
  for (const auto& c : report.constants)
    if (c.status != CheckStatus::pass) throw OracleMismatch(c.name, c.computed, c.closed_form);
}

}  // namespace microswim
