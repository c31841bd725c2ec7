#include "bose/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bose/errors.hpp"
#include "bose/source_model.hpp"

namespace bose {

std::vector<double> ConvergenceLadder::volumes() const {
  std::vector<double> out;
  out.reserve(sides.size());
  for (double l : sides) out.push_back(std::pow(l, dim));
  return out;
}

RateFit fit_rate(const ConvergenceLadder& ladder) {
  const std::size_t n = ladder.sides.size();
  if (n != ladder.values.size()) throw DomainError("fit_rate: sides and values differ in length");
  if (n < 3) throw DomainError("fit_rate: need at least 3 ladder points");

  const auto vols = ladder.volumes();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = std::abs(ladder.values[i] - ladder.limit_ref);
    if (!std::isnormal(gap))
      throw ConvergenceError("fit_rate: degenerate gap at side " + std::to_string(ladder.sides[i]));
    xs[i] = std::log(vols[i]);
    ys[i] = std::log(gap);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw ConvergenceError("fit_rate: all volumes equal");
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (icpt + slope * xs[i]);
    ss += r * r;
  }
  return {-slope, std::sqrt(ss / static_cast<double>(n))};
}

double delta_pressure(const ThermoPoint& point, double rel_tol) {
  const auto id = pressure_source(point);
  const auto app = pressure_app(point, rel_tol);
  // Group so the identical nonzero-mode sums cancel before anything else.
  return (id.zero_mode - app.zero_mode) + id.constant + (id.primed - app.primed);
}

double delta_pressure_zero_modes(const ThermoPoint& point, double rel_tol) {
  require_negative_mu(point.mu, "delta_pressure_zero_modes");
  const double bv = point.beta * point.volume();
  const double zero_id = -std::log(-std::expm1(point.beta * point.mu)) / bv;
  const double constant = -point.nu * point.nu / point.mu;
  const auto series = zero_mode_pressure_series(point, rel_tol);
  return (zero_id + constant) - series.numeric_log_sum;
}

double default_fd_step(double mu) { return std::max(1e-5, std::abs(mu) * 1e-4); }

DensityReport density_via_griffiths(const PressureFn& pressure, double mu, double rho_c,
                                    const GriffithsOptions& options) {
  const double h = options.step > 0.0 ? options.step : default_fd_step(mu);
  if (!(mu + h < 0.0))
    throw DomainError("density_via_griffiths: stencil leaves stability domain (mu + h must be < 0)");

  const double p0 = pressure(mu);
  const double pp = pressure(mu + h);
  const double pm = pressure(mu - h);
  const double pp2 = pressure(mu + 0.5 * h);
  const double pm2 = pressure(mu - 0.5 * h);

  if (pp - 2.0 * p0 + pm < -options.convexity_tol)
    throw ConvergenceError("density_via_griffiths: pressure not convex on the stencil");

  const double d1 = (pp - pm) / (2.0 * h);
  const double d2 = (pp2 - pm2) / h;
  const double err = std::abs(d1 - d2);
  if (err > options.richardson_tol * std::max(1.0, std::abs(d2)))
    throw ConvergenceError("density_via_griffiths: step too large, Richardson estimates disagree by " +
                           std::to_string(err));

  DensityReport out;
  out.rho_total = (4.0 * d2 - d1) / 3.0;
  out.rho_c = rho_c;
  out.rho_0 = out.rho_total - rho_c;
  out.method = DensityMethod::finite_difference;
  out.richardson_error = err;
  return out;
}

double condensate_app_limit(double beta, double mu, double nu, int dim) {
  require_positive(beta, "beta", "condensate_app_limit");
  require_negative_mu(mu, "condensate_app_limit");
  if (dim < 1) throw DomainError("condensate_app_limit: dim must be >= 1");
  return nu * nu / (mu * mu);
}

std::shared_ptr<const ModeLattice> lattice_for(double beta, double mu_max, int dim, double side,
                                               double tail_tol, std::size_t max_modes) {
  const double p_max = select_cutoff(beta, mu_max, dim, side, tail_tol);
  return std::make_shared<const ModeLattice>(build_lattice(dim, side, p_max, max_modes));
}

Theorem2Report verify_theorem2(double beta, double mu, double nu, int dim,
                               const std::vector<double>& sides, const Theorem2Options& options) {
  require_positive(beta, "beta", "verify_theorem2");
  require_negative_mu(mu, "verify_theorem2");
  if (nu < 0.0) throw DomainError("verify_theorem2: nu must be >= 0");
  if (sides.empty()) throw DomainError("verify_theorem2: empty ladder");
  for (std::size_t i = 1; i < sides.size(); ++i)
    if (!(sides[i] > sides[i - 1])) throw DomainError("verify_theorem2: sides must increase");

  const double h = options.griffiths.step > 0.0 ? options.griffiths.step : default_fd_step(mu);
  const double mu_hi = mu + h;
  if (!(mu_hi < 0.0))
    throw DomainError("verify_theorem2: stencil leaves stability domain (mu + h must be < 0)");

  Theorem2Report rep;
  rep.ladder.dim = dim;
  rep.ladder.limit_ref = 0.0;
  std::shared_ptr<const ModeLattice> last;
  for (double l : sides) {
    auto lat = lattice_for(beta, mu_hi, dim, l, options.tail_tol, options.max_modes);
    ThermoPoint pt{beta, mu, nu, 0.0, lat};
    Theorem2Rung r;
    r.side = l;
    r.volume = lat->volume;
    r.p_max = lat->p_max;
    r.modes = lat->size();
    r.source = pressure_source(pt, options.tail_tol);
    r.app = pressure_app(pt, options.rel_tol, kDefaultSourceCoefficient, options.tail_tol);
    r.delta = (r.source.zero_mode - r.app.zero_mode) + r.source.constant +
              (r.source.primed - r.app.primed);
    rep.ladder.sides.push_back(l);
    rep.ladder.values.push_back(r.delta);
    rep.rungs.push_back(r);
    last = lat;
  }

  if (nu > 0.0) {
    for (std::size_t i = 1; i < rep.ladder.values.size(); ++i)
      if (!(std::abs(rep.ladder.values[i]) < std::abs(rep.ladder.values[i - 1])))
        throw ConvergenceError("verify_theorem2: |delta_pressure| not decreasing at side " +
                               std::to_string(rep.ladder.sides[i]));
    if (rep.ladder.values.size() >= 3) {
      const auto fit = fit_rate(rep.ladder);
      rep.ladder.fitted_rate = fit.rate;
      rep.ladder.fit_residual = fit.residual;
    }
  }

  ThermoPoint base{beta, mu, nu, 0.0, last};
  const double rho_c = critical_density_finite(base, options.tail_tol).value;
  auto p_id = [&](double m) {
    ThermoPoint p = base;
    p.mu = m;
    return pressure_source(p, options.tail_tol).total;
  };
  auto p_app = [&](double m) {
    ThermoPoint p = base;
    p.mu = m;
    return pressure_app(p, options.rel_tol, kDefaultSourceCoefficient, options.tail_tol).total;
  };
  rep.density_source = density_via_griffiths(p_id, mu, rho_c, options.griffiths);
  rep.density_app = density_via_griffiths(p_app, mu, rho_c, options.griffiths);
  rep.condensate_gap = std::abs(rep.density_source.rho_0 - rep.density_app.rho_0);
  rep.condensate_bound = 2.0 / (last->volume * std::expm1(-beta * mu)) +
                         rep.density_source.richardson_error + rep.density_app.richardson_error;

  rep.rate_passed = nu == 0.0 || (rep.ladder.fitted_rate && *rep.ladder.fitted_rate >= options.rate_threshold);
  rep.condensate_passed = rep.condensate_gap <= rep.condensate_bound;
  rep.passed = rep.rate_passed && rep.condensate_passed;
  return rep;
}

TemperatureScan condensate_temperature_scan(double mu, double nu, int dim,
                                            const std::vector<double>& betas,
                                            const GriffithsOptions& options) {
  if (betas.empty()) throw DomainError("condensate_temperature_scan: no temperatures");
  TemperatureScan out;
  out.betas = betas;
  for (double b : betas) {
    require_positive(b, "beta", "condensate_temperature_scan");
    auto p = [&](double m) { return pressure_app_limit(b, m, nu, dim); };
    const double rho_c = critical_density_limit(b, mu, dim);
    out.rho0.push_back(density_via_griffiths(p, mu, rho_c, options).rho_0);
  }
  const auto [lo, hi] = std::minmax_element(out.rho0.begin(), out.rho0.end());
  out.spread = *hi - *lo;
  return out;
}

}  // namespace bose
