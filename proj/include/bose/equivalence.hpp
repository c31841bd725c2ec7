#pragma once

// Comparison of the linear-source gas and the square-root-source gas:
// pressure gaps along volume ladders, densities by differentiating pressures
// in mu (convexity makes this legitimate in the limit), and power-law fits of
// the approach to the thermodynamic limit.

#include <functional>
#include <optional>
#include <vector>

#include "bose/ideal_gas.hpp"
#include "bose/nonlinear_model.hpp"

namespace bose {

struct ConvergenceLadder {
  int dim = 3;
  std::vector<double> sides;   // strictly increasing
  std::vector<double> values;  // quantity at each side
  double limit_ref = 0.0;
  std::optional<double> fitted_rate;  // r in |value - limit| ~ C V^{-r}
  double fit_residual = 0.0;          // rms residual of the log-log fit

  std::vector<double> volumes() const;
};

struct RateFit {
  double rate = 0.0;
  double residual = 0.0;
};

// Least squares slope of log|value - limit_ref| against log V. Needs >= 3
// points; ConvergenceError if any gap is zero, subnormal or non-finite.
RateFit fit_rate(const ConvergenceLadder& ladder);

// p^id_l - p^app_l on the same lattice. The nonzero-mode parts are the same
// bits in both models and are subtracted first, so they cancel exactly.
double delta_pressure(const ThermoPoint& point, double rel_tol = 1e-17);

// [-(1/(beta V)) ln(1 - e^{beta mu}) - nu^2/mu] - zero-mode series, i.e. the
// same gap recomputed from the zero-mode terms alone.
double delta_pressure_zero_modes(const ThermoPoint& point, double rel_tol = 1e-17);

enum class DensityMethod { analytic, finite_difference };

struct DensityReport {
  double rho_total = 0.0;
  double rho_c = 0.0;
  double rho_0 = 0.0;
  DensityMethod method = DensityMethod::finite_difference;
  double richardson_error = 0.0;  // |D(h) - D(h/2)|, finite differences only
};

struct GriffithsOptions {
  double step = 0.0;  // 0 selects default_fd_step(mu)
  double richardson_tol = 1e-6;
  double convexity_tol = 1e-10;
};

double default_fd_step(double mu);

using PressureFn = std::function<double(double mu)>;

// rho = dp/dmu by a central difference, Richardson-extrapolated from steps h
// and h/2; rho_0 = rho - rho_c. ConvergenceError when the two steps disagree
// by more than richardson_tol (relative, floor 1) or the stencil is not
// convex; DomainError unless mu + h < 0.
DensityReport density_via_griffiths(const PressureFn& pressure, double mu, double rho_c,
                                    const GriffithsOptions& options = {});

// rho^app - rho_c in the thermodynamic limit: nu^2 / mu^2.
double condensate_app_limit(double beta, double mu, double nu, int dim);

struct Theorem2Options {
  double rel_tol = 1e-17;   // zero-mode series
  double tail_tol = 1e-15;  // absolute cutoff tail bound for lattice sums
  double rate_threshold = 0.9;
  GriffithsOptions griffiths;
  std::size_t max_modes = kDefaultMaxModes;
};

struct Theorem2Rung {
  double side = 0.0;
  double volume = 0.0;
  double p_max = 0.0;
  std::size_t modes = 0;
  PressureBreakdown source;
  PressureBreakdown app;
  double delta = 0.0;
};

struct Theorem2Report {
  ConvergenceLadder ladder;  // |delta_pressure| against limit 0
  std::vector<Theorem2Rung> rungs;
  DensityReport density_source;  // at the largest side
  DensityReport density_app;
  double condensate_gap = 0.0;    // |rho_0^id - rho_0^app|
  double condensate_bound = 0.0;  // 2 / (V (e^{-beta mu} - 1)) + Richardson errors
  bool rate_passed = false;
  bool condensate_passed = false;
  bool passed = false;
};

// Runs the ladder. ConvergenceError if |delta_pressure| is not strictly
// decreasing along the sides (for nu > 0). With nu = 0 the gap vanishes and
// the rate fit is skipped.
Theorem2Report verify_theorem2(double beta, double mu, double nu, int dim,
                               const std::vector<double>& sides,
                               const Theorem2Options& options = {});

// Condensate rho^app - rho_c from the limit pressure at each beta; returns
// max - min over the betas. Zero spread means temperature-independent
// condensation.
struct TemperatureScan {
  std::vector<double> betas;
  std::vector<double> rho0;
  double spread = 0.0;
};
TemperatureScan condensate_temperature_scan(double mu, double nu, int dim,
                                            const std::vector<double>& betas,
                                            const GriffithsOptions& options = {});

// Lattice for side l with a cutoff whose tail bounds are <= tail_tol for
// every chemical potential up to mu_max.
std::shared_ptr<const ModeLattice> lattice_for(double beta, double mu_max, int dim, double side,
                                               double tail_tol,
                                               std::size_t max_modes = kDefaultMaxModes);

}  // namespace bose
