#include "microswim/params.hpp"

#include "microswim/errors.hpp"

namespace microswim {

PhysParams validate_params(double ell, double xi, double eta, double kappa, double m1, double m2) {
  // NaN fails every comparison below, so it is rejected too.
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NonPositiveParameter(name);
  };
  positive(ell, "ell");
  positive(xi, "xi");
  positive(eta, "eta");
  positive(kappa, "kappa");
  if (!(m1 != 0.0) || !std::isfinite(m1)) throw ZeroMagnetization("m1");
  if (!(m2 != 0.0) || !std::isfinite(m2)) throw ZeroMagnetization("m2");
  return PhysParams{ell, xi, eta, kappa, m1, m2};
}

PhysParams validate_params(const PhysParams& p) {
  return validate_params(p.ell, p.xi, p.eta, p.kappa, p.m1, p.m2);
}

}  // namespace microswim
