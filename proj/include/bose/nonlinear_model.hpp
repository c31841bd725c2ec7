#pragma once

// Free Bose gas with the symmetry-preserving square-root source
//   H = sum_p lambda(p) n_p - c nu sqrt(V) sqrt(n_0 + 1) - mu N,   c = 2 by default.
// Its zero-mode partition sum is a Darboux sum of exp(beta V g(n_0 / V)) with
//   g(x) = (mu - lambda0) x + c nu sqrt(x + 1/V),
// so the Laplace principle sends the zero-mode pressure to sup g.

#include <cstddef>

#include "bose/ideal_gas.hpp"

namespace bose {

inline constexpr double kDefaultSourceCoefficient = 2.0;

struct ExponentFunction {
  double mu = -1.0;
  double nu = 0.0;
  double volume = 1.0;
  double lambda0 = 0.0;
  double coefficient = kDefaultSourceCoefficient;
};

struct LaplaceResult {
  double maximizer = 0.0;        // clamped x*
  double sup_value = 0.0;        // g(x*)
  double numeric_log_sum = 0.0;  // (1/(beta V)) ln sum_n exp(beta V g(n/V))
  double gap = 0.0;              // |numeric_log_sum - sup_value|
  std::size_t terms_used = 0;
  double tail_bound = 0.0;  // bound on the discarded series tail, pressure units
};

double exponent_eval(const ExponentFunction& f, double x);
double exponent_derivative(const ExponentFunction& f, double x);
double exponent_second_derivative(const ExponentFunction& f, double x);

// max(0, (c nu / (2 (lambda0 - mu)))^2 - 1/V).
double exponent_maximizer(const ExponentFunction& f);

// sup_{x >= 0} g(x). DomainError when mu >= lambda0 (g unbounded above).
double laplace_sup(const ExponentFunction& f);

// Zero-mode pressure as a truncated series summed outward from the peak term;
// each side stops once the concavity (tangent-line) bound on its remaining
// terms is below rel_tol/2 times the running sum. ConvergenceError past
// max_terms.
LaplaceResult zero_mode_pressure_series(double beta, double mu, double nu, double volume,
                                        double rel_tol = 1e-17,
                                        double coefficient = kDefaultSourceCoefficient,
                                        std::size_t max_terms = 200'000'000);
LaplaceResult zero_mode_pressure_series(const ThermoPoint& point, double rel_tol = 1e-17,
                                        double coefficient = kDefaultSourceCoefficient);

// (1/(beta V)) ln sum_{n=0}^{n_max} exp(beta V g(n/V)), no tail handling.
double zero_mode_pressure_truncated(double beta, double mu, double nu, double volume,
                                    std::size_t n_max,
                                    double coefficient = kDefaultSourceCoefficient);

// zero_mode from the series, primed from the free gas, constant = 0.
PressureBreakdown pressure_app(const ThermoPoint& point, double rel_tol = 1e-17,
                               double coefficient = kDefaultSourceCoefficient,
                               double tail_tol = std::numeric_limits<double>::infinity());

// -(c nu / 2)^2 / mu + continuum free-gas pressure.
double pressure_app_limit(double beta, double mu, double nu, int dim,
                          double coefficient = kDefaultSourceCoefficient);

}  // namespace bose
