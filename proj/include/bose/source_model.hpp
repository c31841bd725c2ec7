#pragma once

// Free Bose gas with the U(1)-breaking linear source
//   H = sum_p lambda(p) n_p - sqrt(V) nu (a_0 e^{-i phi} + a_0^dag e^{i phi}) - mu N.
// The shift a_0 = -(nu/mu) e^{i phi} sqrt(V) + b_0 diagonalises it exactly.

#include <complex>

#include "bose/ideal_gas.hpp"

namespace bose {

struct ShiftParameters {
  std::complex<double> displacement;  // -(nu/mu) e^{i phi} sqrt(V)
  double energy_offset = 0.0;         // nu^2 V / mu
};

struct QuasiAverage {
  std::complex<double> eta;  // <a_0 / sqrt(V)>
  double magnitude_sq = 0.0;
};

ShiftParameters shift_parameters(double mu, double nu, double phi, double volume);

// zero_mode = -(1/(beta V)) ln(1 - e^{beta mu}), constant = -nu^2/mu,
// primed = free-gas nonzero modes.
PressureBreakdown pressure_source(const ThermoPoint& point,
                                  double tail_tol = std::numeric_limits<double>::infinity());

QuasiAverage quasiaverage(const ThermoPoint& point);

double condensate_density_source(double mu, double nu);

// <b_0^dag b_0> / V = (1/V) (e^{-beta mu} - 1)^{-1}.
double zero_mode_depletion(double beta, double mu, double volume);

// Negative root of beta V rho0 mu^2 + mu - beta V nu^2 = 0, the small-|mu|
// form of rho_0 = nu^2/mu^2 + 1/(V (e^{-beta mu} - 1)).
double solve_mu_finite(double beta, double volume, double rho0, double nu);

// Root of nu^2/mu^2 + zero_mode_depletion(beta, mu, V) = rho0 on mu < 0,
// without the small-|mu| expansion. Used to cross-check solve_mu_finite.
double solve_mu_exact(double beta, double volume, double rho0, double nu);

double mu_star(double rho0, double nu);

}  // namespace bose
