#include <cmath>
#include <memory>
#include <numbers>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "oracles.hpp"

#include "bose/errors.hpp"
#include "bose/ideal_gas.hpp"

using namespace bose;

namespace {

ThermoPoint at(double beta, double mu, int dim, double side, double p_max) {
  return {beta, mu, 0.0, 0.0, std::make_shared<const ModeLattice>(build_lattice(dim, side, p_max))};
}

// Continuum pressure by radial quadrature, independent of the polylog code:
// -(S_d / (2 pi)^d) (1/beta) int_0^inf p^{d-1} ln(1 - e^{beta (mu - p^2/2)}) dp.
double pressure_quadrature(double beta, double mu, int dim) {
  const double sd = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
  auto f = [&](double p) {
    return -std::pow(p, dim - 1) * std::log1p(-std::exp(beta * (mu - 0.5 * p * p)));
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, INFINITY, 15, 1e-14);
  return sd / std::pow(2.0 * std::numbers::pi, dim) * integral / beta;
}

}  // namespace

TEST_CASE("occupation") {
  CHECK(occupation(1.0, -1.0, 0.0) == doctest::Approx(0.5819767068693265).epsilon(1e-15));
  CHECK(occupation(1.0, -0.5, 0.5) == doctest::Approx(0.5819767068693265).epsilon(1e-15));
  CHECK(occupation(2.0, -50.0, 0.0) < 1e-20);
  CHECK(occupation(2.0, -50.0, 0.0) > 0.0);
  CHECK_THROWS_AS(occupation(1.0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(occupation(1.0, 1.0, 0.5), DomainError);
}

TEST_CASE("primed pressure against direct summation") {
  const double l = 2.0 * std::numbers::pi;
  const auto r = pressure_ideal_primed(at(1.0, -1.0, 1, l, 10.0));
  const double ref = static_cast<double>(oracle::pressure_primed(1.0, -1.0, 1, l, 10.0));
  CHECK(r.primed == doctest::Approx(ref).epsilon(1e-15));
  CHECK(r.zero_mode == 0.0);
  CHECK(r.constant == 0.0);
  CHECK(r.total == r.primed);

  const double p3 = select_cutoff(0.7, -0.3, 3, 6.0, 1e-14);
  const auto r3 = pressure_ideal_primed(at(0.7, -0.3, 3, 6.0, p3));
  const double ref3 = static_cast<double>(oracle::pressure_primed(0.7, -0.3, 3, 6.0, p3));
  CHECK(r3.primed == doctest::Approx(ref3).epsilon(1e-14));
}

TEST_CASE("tail bounds dominate the discarded modes") {
  for (auto [beta, mu, dim, side] : {std::tuple{1.0, -0.5, 3, 4.0}, {0.5, -0.01, 3, 8.0},
                                     {2.0, -1.0, 2, 5.0}, {1.0, -0.2, 1, 3.0}}) {
    const double big = select_cutoff(beta, mu, dim, side, 1e-16);
    const auto full = pressure_ideal_primed(at(beta, mu, dim, side, big));
    const auto full_rho = critical_density_finite(at(beta, mu, dim, side, big));
    for (double frac : {0.3, 0.5, 0.7}) {
      CAPTURE(frac);
      const auto cut = pressure_ideal_primed(at(beta, mu, dim, side, frac * big));
      CHECK(full.primed - cut.primed <= cut.truncation_bound + full.truncation_bound);
      CHECK(full.primed - cut.primed >= 0.0);
      const auto cut_rho = critical_density_finite(at(beta, mu, dim, side, frac * big));
      CHECK(full_rho.value - cut_rho.value <= cut_rho.bound + full_rho.bound);
    }
  }
}

TEST_CASE("tail tolerance is enforced") {
  CHECK_THROWS_AS(pressure_ideal_primed(at(1.0, -0.5, 3, 8.0, 1.0), 1e-12), ConvergenceError);
  CHECK_THROWS_AS(critical_density_finite(at(1.0, -0.5, 3, 8.0, 1.0), 1e-12), ConvergenceError);
  const double p = select_cutoff(1.0, -0.5, 3, 8.0, 1e-13);
  CHECK(pressure_tail_bound(1.0, -0.5, 3, 8.0, p) <= 1e-13);
  CHECK(density_tail_bound(1.0, -0.5, 3, 8.0, p) <= 1e-13);
}

TEST_CASE("doubling the cutoff stays within the reported bound") {
  const double p = select_cutoff(1.0, -0.4, 3, 10.0, 1e-10);
  const auto a = pressure_ideal_primed(at(1.0, -0.4, 3, 10.0, p));
  const auto b = pressure_ideal_primed(at(1.0, -0.4, 3, 10.0, 2.0 * p));
  CHECK(std::abs(b.primed - a.primed) < a.truncation_bound);
}

TEST_CASE("far from the stability edge the gas is empty") {
  const double p = select_cutoff(1.0, -50.0, 3, 8.0, 1e-30);
  CHECK(std::abs(pressure_ideal_primed(at(1.0, -50.0, 3, 8.0, p)).primed) < 1e-18);
}

TEST_CASE("continuum pressure: polylog form against quadrature") {
  for (int dim : {1, 2, 3})
    for (double mu : {-0.05, -1.0, -3.0}) {
      CAPTURE(dim);
      CAPTURE(mu);
      CHECK(pressure_ideal_limit(1.3, mu, dim) ==
            doctest::Approx(pressure_quadrature(1.3, mu, dim)).epsilon(1e-12));
    }
  const double li = static_cast<double>(oracle::polylog_series(2.5L, std::exp(-1.0L)));
  CHECK(pressure_ideal_limit(1.0, -1.0, 3) ==
        doctest::Approx(li / std::pow(2.0 * std::numbers::pi, 1.5)).epsilon(1e-14));
  CHECK(pressure_ideal_limit(1.0, -60.0, 3) < 1e-26);
  CHECK_THROWS_AS(pressure_ideal_limit(1.0, 0.0, 3), DomainError);
}

TEST_CASE("critical density") {
  // Tiny cutoff keeps only the six nearest modes.
  const double l = 5.0;
  const double dp = 2.0 * std::numbers::pi / l;
  const auto r = critical_density_finite(at(1.0, -0.5, 3, l, 1.01 * dp));
  CHECK(r.value == doctest::Approx(6.0 * occupation(1.0, -0.5, 0.5 * dp * dp) / (l * l * l)).epsilon(1e-15));

  const double p = select_cutoff(1.0, -0.5, 3, 16.0, 1e-14);
  const auto r16 = critical_density_finite(at(1.0, -0.5, 3, 16.0, p));
  CHECK(r16.value == doctest::Approx(static_cast<double>(oracle::density_primed(1.0, -0.5, 3, 16.0, p)))
                         .epsilon(1e-14));

  const double z0 = critical_density_limit(1.0, 0.0, 3);
  CHECK(z0 == doctest::Approx(0.165869).epsilon(1e-5));
  CHECK(critical_density_limit(4.0, 0.0, 3) == doctest::Approx(z0 / 8.0).epsilon(1e-15));
  const double li = static_cast<double>(oracle::polylog_series(1.5L, std::exp(-0.5L)));
  CHECK(critical_density_limit(1.0, -0.5, 3) ==
        doctest::Approx(li / std::pow(2.0 * std::numbers::pi, 1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(critical_density_limit(1.0, 0.0, 2), DomainError);
  CHECK_THROWS_AS(critical_density_limit(1.0, 0.0, 1), DomainError);
}

TEST_CASE("finite volume approaches the continuum") {
  for (double mu : {-0.5, -0.05}) {
    const double lim_p = pressure_ideal_limit(1.0, mu, 3);
    const double lim_r = critical_density_limit(1.0, mu, 3);
    double gp = INFINITY, gr = INFINITY;
    for (double l : {8.0, 16.0, 32.0, 64.0}) {
      const auto pt = at(1.0, mu, 3, l, select_cutoff(1.0, mu, 3, l, 1e-13));
      const double ep = std::abs(pressure_ideal_primed(pt).primed - lim_p);
      const double er = std::abs(critical_density_finite(pt).value - lim_r);
      CHECK(ep < gp);
      CHECK(er < gr);
      gp = ep;
      gr = er;
    }
  }
}

TEST_CASE("breakdown arithmetic") {
  const auto b = make_breakdown(0.25, 1.5, -0.125, 1e-9);
  CHECK(b.total == 0.25 + 1.5 + -0.125);
  CHECK_THROWS_AS(make_breakdown(0.0, 0.0, 0.0, -1.0), DomainError);
}
