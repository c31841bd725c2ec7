#include "bose/ideal_gas.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "bose/errors.hpp"
#include "bose/kernels.hpp"
#include "bose/summation.hpp"

namespace bose {
namespace {

constexpr std::size_t kBlock = 4096;

using TermKernel = void (*)(std::span<const double>, double, double, std::span<double>);

// Sums kernel(energy) over the nonzero modes in canonical order. Energies are
// ascending and both summands decrease with energy, so this is the
// descending-magnitude order.
double mode_sum(std::span<const double> energies, double beta, double mu, TermKernel kernel) {
  std::array<double, kBlock> buf;
  CompensatedSum sum;
  for (std::size_t i = 0; i < energies.size(); i += kBlock) {
    const auto chunk = energies.subspan(i, std::min(kBlock, energies.size() - i));
    kernel(chunk, beta, mu, std::span<double>(buf.data(), chunk.size()));
    sum.add(std::span<const double>(buf.data(), chunk.size()));
  }
  return sum.value();
}

void check_point(const ThermoPoint& point, const char* where) {
  require_positive(point.beta, "beta", where);
  require_negative_mu(point.mu, where);
  if (!point.lattice) throw DomainError(std::string(where) + ": point has no lattice");
}

// Integral of f(s) (s + h)^{d-1} over s >= a, with f(s) <= z(s) / (1 - z(a)),
// z(s) = exp(beta (mu - s^2/2)), plus f(0) times the shell [r0, max(r0, h)]
// where the shifted radius is clamped at zero. Returns the radial integral
// before the S_d / (2 pi)^d prefactor.
double shifted_radial_integral(double beta, double mu, int dim, double side, double p_max,
                               double f0) {
  const double h = std::numbers::pi * std::sqrt(static_cast<double>(dim)) / side;
  const double r0 = std::max(p_max - h, 0.0);
  const double a = std::max(p_max - 2.0 * h, 0.0);

  double shell = 0.0;
  if (r0 < h) shell = f0 * (std::pow(h, dim) - std::pow(r0, dim)) / dim;

  // M_k = int_a^inf s^k exp(-beta s^2 / 2) ds, by the two-step recursion.
  std::vector<double> m(static_cast<std::size_t>(std::max(dim, 2)));
  const double ga = std::exp(-0.5 * beta * a * a);
  m[0] = std::sqrt(std::numbers::pi / (2.0 * beta)) * boost::math::erfc(a * std::sqrt(0.5 * beta));
  m[1] = ga / beta;
  for (int k = 2; k < dim; ++k) m[k] = (std::pow(a, k - 1) * ga + (k - 1) * m[k - 2]) / beta;

  double poly = 0.0;
  for (int k = 0; k < dim; ++k) {
    poly += boost::math::binomial_coefficient<double>(static_cast<unsigned>(dim - 1),
                                                      static_cast<unsigned>(k)) *
            std::pow(h, dim - 1 - k) * m[k];
  }
  const double one_minus_za = -std::expm1(beta * (mu - 0.5 * a * a));
  return shell + std::exp(beta * mu) / one_minus_za * poly;
}

double sphere_prefactor(int dim) {
  // S_d / (2 pi)^d with S_d = 2 pi^{d/2} / Gamma(d/2).
  return 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0) /
         std::pow(2.0 * std::numbers::pi, dim);
}

}  // namespace

PressureBreakdown make_breakdown(double zero_mode, double primed, double constant,
                                 double truncation_bound) {
  if (!(truncation_bound >= 0.0)) throw DomainError("make_breakdown: truncation bound must be >= 0");
  return {zero_mode, primed, constant, zero_mode + primed + constant, truncation_bound};
}

double occupation(double beta, double mu, double lambda) {
  require_positive(beta, "beta", "occupation");
  if (!(mu < lambda)) throw DomainError("occupation: requires mu < lambda");
  return 1.0 / std::expm1(beta * (lambda - mu));
}

double pressure_tail_bound(double beta, double mu, int dim, double side, double p_max) {
  const double f0 = -std::log1p(-std::exp(beta * mu));
  return sphere_prefactor(dim) * shifted_radial_integral(beta, mu, dim, side, p_max, f0) / beta;
}

double density_tail_bound(double beta, double mu, int dim, double side, double p_max) {
  const double f0 = 1.0 / std::expm1(-beta * mu);
  return sphere_prefactor(dim) * shifted_radial_integral(beta, mu, dim, side, p_max, f0);
}

double select_cutoff(double beta, double mu, int dim, double side, double abs_tol) {
  require_positive(beta, "beta", "select_cutoff");
  require_negative_mu(mu, "select_cutoff");
  require_positive(abs_tol, "tolerance", "select_cutoff");
  const double step = 0.5 * std::numbers::pi / side;
  for (int k = 4;; ++k) {
    const double p = step * k;
    if (pressure_tail_bound(beta, mu, dim, side, p) <= abs_tol &&
        density_tail_bound(beta, mu, dim, side, p) <= abs_tol) {
      return p;
    }
    if (k > 1'000'000) throw ConvergenceError("select_cutoff: no cutoff meets the tolerance");
  }
}

PressureBreakdown pressure_ideal_primed(const ThermoPoint& point, double tail_tol) {
  check_point(point, "pressure_ideal_primed");
  const ModeLattice& lat = *point.lattice;
  const double sum =
      mode_sum(lat.nonzero_energies(), point.beta, point.mu, kernels::active().bose_log_terms);
  const double bound = pressure_tail_bound(point.beta, point.mu, lat.dim, lat.side, lat.p_max);
  if (bound > tail_tol) {
    throw ConvergenceError("pressure_ideal_primed: tail bound " + std::to_string(bound) +
                           " exceeds tolerance at p_max = " + std::to_string(lat.p_max));
  }
  return make_breakdown(0.0, sum / (point.beta * lat.volume), 0.0, bound);
}

SeriesValue critical_density_finite(const ThermoPoint& point, double tail_tol) {
  check_point(point, "critical_density_finite");
  const ModeLattice& lat = *point.lattice;
  const auto energies = lat.nonzero_energies();
  const double sum =
      mode_sum(energies, point.beta, point.mu, kernels::active().bose_occupation_terms);
  const double bound = density_tail_bound(point.beta, point.mu, lat.dim, lat.side, lat.p_max);
  if (bound > tail_tol) {
    throw ConvergenceError("critical_density_finite: tail bound " + std::to_string(bound) +
                           " exceeds tolerance at p_max = " + std::to_string(lat.p_max));
  }
  return {sum / lat.volume, bound, energies.size()};
}

double pressure_ideal_limit(double beta, double mu, int dim) {
  require_positive(beta, "beta", "pressure_ideal_limit");
  require_negative_mu(mu, "pressure_ideal_limit");
  if (dim < 1) throw DomainError("pressure_ideal_limit: dimension must be >= 1");
  const double g = polylog(dim / 2.0 + 1.0, std::exp(beta * mu)).value;
  return g * std::pow(2.0 * std::numbers::pi * beta, -dim / 2.0) / beta;
}

double critical_density_limit(double beta, double mu, int dim) {
  require_positive(beta, "beta", "critical_density_limit");
  if (dim < 1) throw DomainError("critical_density_limit: dimension must be >= 1");
  if (mu > 0.0) throw DomainError("critical_density_limit: requires mu <= 0");
  if (mu == 0.0 && dim <= 2) {
    throw DomainError("critical_density_limit: diverges at mu = 0 for d <= 2");
  }
  const double g = polylog(dim / 2.0, mu == 0.0 ? 1.0 : std::exp(beta * mu)).value;
  return g * std::pow(2.0 * std::numbers::pi * beta, -dim / 2.0);
}

}  // namespace bose
