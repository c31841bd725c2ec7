#include "bose/source_model.hpp"

#include <cmath>
#include <cstdint>

#include <boost/math/tools/roots.hpp>

#include "bose/errors.hpp"

namespace bose {

ShiftParameters shift_parameters(double mu, double nu, double phi, double volume) {
  require_negative_mu(mu, "shift_parameters");
  require_positive(volume, "volume", "shift_parameters");
  if (nu < 0.0) throw DomainError("shift_parameters: nu must be >= 0");
  const double amplitude = -(nu / mu) * std::sqrt(volume);
  return {std::polar(amplitude, phi), nu * nu * volume / mu};
}

PressureBreakdown pressure_source(const ThermoPoint& point, double tail_tol) {
  require_negative_mu(point.mu, "pressure_source");
  const PressureBreakdown primed = pressure_ideal_primed(point, tail_tol);
  const double v = point.volume();
  const double zero = -std::log1p(-std::exp(point.beta * point.mu)) / (point.beta * v);
  const double constant = -point.nu * point.nu / point.mu;
  return make_breakdown(zero, primed.primed, constant, primed.truncation_bound);
}

QuasiAverage quasiaverage(const ThermoPoint& point) {
  require_negative_mu(point.mu, "quasiaverage");
  const double amplitude = -point.nu / point.mu;
  return {std::polar(amplitude, point.phi), amplitude * amplitude};
}

double condensate_density_source(double mu, double nu) {
  require_negative_mu(mu, "condensate_density_source");
  return (nu * nu) / (mu * mu);
}

double zero_mode_depletion(double beta, double mu, double volume) {
  require_negative_mu(mu, "zero_mode_depletion");
  require_positive(volume, "volume", "zero_mode_depletion");
  return 1.0 / (volume * std::expm1(-beta * mu));
}

double solve_mu_finite(double beta, double volume, double rho0, double nu) {
  require_positive(beta, "beta", "solve_mu_finite");
  require_positive(volume, "volume", "solve_mu_finite");
  require_positive(rho0, "rho0", "solve_mu_finite");
  if (nu < 0.0) throw DomainError("solve_mu_finite: nu must be >= 0");
  const double bv = beta * volume;
  const double q = 2.0 * bv * nu;
  return -(1.0 + std::sqrt(1.0 + q * q * rho0)) / (2.0 * bv * rho0);
}

double solve_mu_exact(double beta, double volume, double rho0, double nu) {
  require_positive(beta, "beta", "solve_mu_exact");
  require_positive(volume, "volume", "solve_mu_exact");
  require_positive(rho0, "rho0", "solve_mu_exact");
  // rho(mu) decreases from +inf (mu -> 0-) to 0 (mu -> -inf): bracket by
  // doubling the lower end.
  auto excess = [&](double mu) {
    return (nu * nu) / (mu * mu) + 1.0 / (volume * std::expm1(-beta * mu)) - rho0;
  };
  double lo = -1.0;
  double hi = -1.0;
  if (excess(lo) > 0.0) {
    while (excess(lo) > 0.0) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e300) throw ConvergenceError("solve_mu_exact: no bracket");
    }
  } else {
    while (excess(hi) <= 0.0) {
      lo = hi;
      hi *= 0.5;
      if (hi > -1e-300) throw ConvergenceError("solve_mu_exact: no bracket");
    }
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      excess, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

double mu_star(double rho0, double nu) {
  require_positive(rho0, "rho0", "mu_star");
  return -nu / std::sqrt(rho0);
}

}  // namespace bose
