#include "bose/nonlinear_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "bose/errors.hpp"
#include "bose/kernels.hpp"
#include "bose/summation.hpp"

namespace bose {
namespace {

constexpr std::size_t kBlock = 4096;

void check_exponent(const ExponentFunction& f, const char* where) {
  require_positive(f.volume, "volume", where);
  if (f.nu < 0.0) throw DomainError(std::string(where) + ": nu must be >= 0");
}

struct SeriesState {
  double beta, mu, c;  // exponent h(n) = beta (mu n + c sqrt(n + 1))
  double h(double n) const { return beta * (mu * n + c * std::sqrt(n + 1.0)); }
  double slope(double n) const { return beta * (mu + 0.5 * c / std::sqrt(n + 1.0)); }
};

// Largest exponent over integer n >= 0: the concave maximum sits at the floor
// or ceiling of the continuous maximiser.
double peak_exponent(const SeriesState& s, double n_cont, double* n_peak) {
  const double lo = std::floor(n_cont);
  const double hi = lo + 1.0;
  const double h_lo = s.h(lo);
  const double h_hi = s.h(hi);
  *n_peak = h_hi > h_lo ? hi : lo;
  return std::max(h_lo, h_hi);
}

}  // namespace

double exponent_eval(const ExponentFunction& f, double x) {
  check_exponent(f, "exponent_eval");
  if (x < 0.0) throw DomainError("exponent_eval: x must be >= 0");
  return (f.mu - f.lambda0) * x + f.coefficient * f.nu * std::sqrt(x + 1.0 / f.volume);
}

double exponent_derivative(const ExponentFunction& f, double x) {
  check_exponent(f, "exponent_derivative");
  if (x < 0.0) throw DomainError("exponent_derivative: x must be >= 0");
  return (f.mu - f.lambda0) + 0.5 * f.coefficient * f.nu / std::sqrt(x + 1.0 / f.volume);
}

double exponent_second_derivative(const ExponentFunction& f, double x) {
  check_exponent(f, "exponent_second_derivative");
  if (x < 0.0) throw DomainError("exponent_second_derivative: x must be >= 0");
  return -0.25 * f.coefficient * f.nu * std::pow(x + 1.0 / f.volume, -1.5);
}

double exponent_maximizer(const ExponentFunction& f) {
  check_exponent(f, "exponent_maximizer");
  if (!(f.mu < f.lambda0)) {
    throw DomainError("exponent_maximizer: outside stability domain (mu must be < 0)");
  }
  const double r = 0.5 * f.coefficient * f.nu / (f.lambda0 - f.mu);
  return std::max(0.0, r * r - 1.0 / f.volume);
}

double laplace_sup(const ExponentFunction& f) {
  return exponent_eval(f, exponent_maximizer(f));
}

LaplaceResult zero_mode_pressure_series(double beta, double mu, double nu, double volume,
                                        double rel_tol, double coefficient,
                                        std::size_t max_terms) {
  require_positive(beta, "beta", "zero_mode_pressure_series");
  require_negative_mu(mu, "zero_mode_pressure_series");
  require_positive(rel_tol, "rel_tol", "zero_mode_pressure_series");
  const ExponentFunction f{mu, nu, volume, 0.0, coefficient};
  const double x_star = exponent_maximizer(f);

  const SeriesState s{beta, mu, coefficient * nu * std::sqrt(volume)};
  double n_peak = 0.0;
  const double h_max = peak_exponent(s, volume * x_star, &n_peak);

  // Sum outward from the peak: first rightwards, then leftwards. h is
  // concave, so past any n it lies below its tangent there and each discarded
  // side is dominated by a geometric series with ratio exp(-|h'(n)|). Each
  // side stops once that bound is below rel_tol/2 of the running sum.
  const auto& k = kernels::active();
  std::array<double, kBlock> expo;
  std::array<double, kBlock> terms;
  CompensatedSum sum;
  double tail = 0.0;
  std::size_t used = 0;
  const double side_tol = 0.5 * rel_tol;
  const auto peak = static_cast<std::size_t>(n_peak);

  auto fill = [&](std::size_t first, std::size_t len) {
    if (used + len > max_terms) {
      throw ConvergenceError("zero_mode_pressure_series: more than " +
                             std::to_string(max_terms) + " terms needed");
    }
    const std::span<double> e(expo.data(), len);
    k.sqrt_source_exponents(first, beta, mu, s.c, e);
    k.exp_shifted(e, h_max, std::span<double>(terms.data(), len));
  };
  auto geometric_tail = [](double term, double slope) {
    // term * r / (1 - r) with r = exp(-|slope|)
    const double a = -std::abs(slope);
    return term * std::exp(a) / (-std::expm1(a));
  };

  for (std::size_t first = peak;; first += kBlock) {
    const std::size_t len = kBlock;
    fill(first, len);
    bool done = false;
    for (std::size_t j = 0; j < len && !done; ++j) {
      sum.add(terms[j]);
      ++used;
      const double slope = s.slope(static_cast<double>(first + j));
      if (slope < 0.0) {
        const double bound = geometric_tail(terms[j], slope);
        if (bound <= side_tol * sum.value()) {
          tail += bound;
          done = true;
        }
      }
    }
    if (done) break;
  }

  for (std::size_t hi = peak; hi > 0;) {
    const std::size_t lo = hi > kBlock ? hi - kBlock : 0;
    fill(lo, hi - lo);
    bool done = false;
    for (std::size_t j = hi - lo; j-- > 0 && !done;) {
      sum.add(terms[j]);
      ++used;
      const std::size_t n = lo + j;
      const double slope = s.slope(static_cast<double>(n));
      if (n > 0 && slope > 0.0) {
        const double bound = geometric_tail(terms[j], slope);
        if (bound <= side_tol * sum.value()) {
          tail += bound;
          done = true;
        }
      }
    }
    if (done) break;
    hi = lo;
  }

  const double bv = beta * volume;
  LaplaceResult out;
  out.maximizer = x_star;
  out.sup_value = exponent_eval(f, x_star);
  out.numeric_log_sum = (h_max + std::log(sum.value())) / bv;
  out.gap = std::abs(out.numeric_log_sum - out.sup_value);
  out.terms_used = used;
  out.tail_bound = tail / (sum.value() * bv);
  return out;
}

LaplaceResult zero_mode_pressure_series(const ThermoPoint& point, double rel_tol,
                                        double coefficient) {
  if (!point.lattice) throw DomainError("zero_mode_pressure_series: point has no lattice");
  return zero_mode_pressure_series(point.beta, point.mu, point.nu, point.volume(), rel_tol,
                                   coefficient);
}

double zero_mode_pressure_truncated(double beta, double mu, double nu, double volume,
                                    std::size_t n_max, double coefficient) {
  require_positive(beta, "beta", "zero_mode_pressure_truncated");
  require_positive(volume, "volume", "zero_mode_pressure_truncated");
  const SeriesState s{beta, mu, coefficient * nu * std::sqrt(volume)};
  double h_max = s.h(0.0);
  for (std::size_t n = 1; n <= n_max; ++n) h_max = std::max(h_max, s.h(static_cast<double>(n)));

  const auto& k = kernels::active();
  std::array<double, kBlock> expo;
  std::array<double, kBlock> terms;
  CompensatedSum sum;
  for (std::size_t first = 0; first <= n_max; first += kBlock) {
    const std::size_t len = std::min(kBlock, n_max + 1 - first);
    const std::span<double> e(expo.data(), len);
    const std::span<double> t(terms.data(), len);
    k.sqrt_source_exponents(first, beta, mu, s.c, e);
    k.exp_shifted(e, h_max, t);
    sum.add(std::span<const double>(t));
  }
  return (h_max + std::log(sum.value())) / (beta * volume);
}

PressureBreakdown pressure_app(const ThermoPoint& point, double rel_tol, double coefficient,
                               double tail_tol) {
  require_negative_mu(point.mu, "pressure_app");
  const PressureBreakdown primed = pressure_ideal_primed(point, tail_tol);
  const LaplaceResult zero = zero_mode_pressure_series(point, rel_tol, coefficient);
  return make_breakdown(zero.numeric_log_sum, primed.primed, 0.0,
                        primed.truncation_bound + zero.tail_bound);
}

double pressure_app_limit(double beta, double mu, double nu, int dim, double coefficient) {
  require_negative_mu(mu, "pressure_app_limit");
  const double half = 0.5 * coefficient * nu;
  return -(half * half) / mu + pressure_ideal_limit(beta, mu, dim);
}

}  // namespace bose
