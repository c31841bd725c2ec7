#pragma once

// Finite-volume and continuum thermodynamics of the free Bose gas on a
// ModeLattice. All finite-volume mode sums exclude p = 0 (the zero mode is
// handled by the model modules) and carry a rigorous bound on the modes cut
// off beyond p_max.

#include <limits>
#include <memory>

#include "bose/lattice.hpp"
#include "bose/polylog.hpp"

namespace bose {

struct ThermoPoint {
  double beta = 1.0;
  double mu = -1.0;
  double nu = 0.0;
  double phi = 0.0;
  std::shared_ptr<const ModeLattice> lattice;

  double volume() const { return lattice->volume; }
};

struct PressureBreakdown {
  double zero_mode = 0.0;
  double primed = 0.0;
  double constant = 0.0;
  double total = 0.0;
  double truncation_bound = 0.0;
};

PressureBreakdown make_breakdown(double zero_mode, double primed, double constant,
                                 double truncation_bound);

// Bose factor (exp(beta (lambda - mu)) - 1)^-1. DomainError if mu >= lambda.
double occupation(double beta, double mu, double lambda);

// -(1/(beta V)) sum_{p != 0} ln(1 - exp(beta (mu - lambda(p)))).
// Throws ConvergenceError if the cutoff tail bound exceeds tail_tol.
PressureBreakdown pressure_ideal_primed(const ThermoPoint& point,
                                        double tail_tol = std::numeric_limits<double>::infinity());

// Continuum pressure Li_{d/2+1}(e^{beta mu}) (2 pi beta)^{-d/2} / beta.
double pressure_ideal_limit(double beta, double mu, int dim);

// (1/V) sum_{p != 0} occupation; value plus cutoff tail bound.
SeriesValue critical_density_finite(const ThermoPoint& point,
                                    double tail_tol = std::numeric_limits<double>::infinity());

// (2 pi beta)^{-d/2} Li_{d/2}(e^{beta mu}); mu = 0 allowed only for d >= 3.
double critical_density_limit(double beta, double mu, int dim);

// Upper bounds, per unit volume, on the contribution of all lattice modes
// with |p| > p_max, from comparison with a radially shifted d-dimensional
// integral. Valid for any mu < 0.
double pressure_tail_bound(double beta, double mu, int dim, double side, double p_max);
double density_tail_bound(double beta, double mu, int dim, double side, double p_max);

// Smallest p_max on a grid of quarter lattice spacings whose pressure and
// density tail bounds are both <= abs_tol.
double select_cutoff(double beta, double mu, int dim, double side, double abs_tol);

}  // namespace bose
