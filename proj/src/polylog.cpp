#include "bose/polylog.hpp"

#include <cmath>
#include <string>

#include "bose/errors.hpp"
#include "bose/summation.hpp"

namespace bose {
namespace {

// Rising factorial s (s+1) ... (s+n-1).
double rising(double s, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= s + i;
  return r;
}

SeriesValue zeta_euler_maclaurin(double s, double rel_tol, std::size_t max_terms) {
  std::size_t K = 16;
  for (;;) {
    const double k = static_cast<double>(K);
    const double omitted = rising(s, 7) / 1209600.0 * std::pow(k, -s - 7.0);
    // zeta(s) > 1, so an absolute bound of rel_tol is enough.
    if (omitted <= rel_tol || K >= max_terms) {
      CompensatedSum sum;
      for (std::size_t j = K; j >= 1; --j) sum.add(std::pow(static_cast<double>(j), -s));
      sum.add(std::pow(k, 1.0 - s) / (s - 1.0));
      sum.add(-0.5 * std::pow(k, -s));
      sum.add(s / 12.0 * std::pow(k, -s - 1.0));
      sum.add(-rising(s, 3) / 720.0 * std::pow(k, -s - 3.0));
      sum.add(rising(s, 5) / 30240.0 * std::pow(k, -s - 5.0));
      if (omitted > rel_tol * sum.value()) {
        throw ConvergenceError("polylog: Euler-Maclaurin tail did not converge");
      }
      return {sum.value(), omitted, K};
    }
    K *= 2;
  }
}

}  // namespace

SeriesValue polylog(double s, double z, double rel_tol, std::size_t max_terms) {
  if (!(s > 0.0)) throw DomainError("polylog: order s must be > 0");
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("polylog: argument z must lie in [0, 1]");
  if (z == 0.0) return {0.0, 0.0, 0};
  if (z == 1.0) {
    if (s <= 1.0) throw DomainError("polylog: series diverges at z = 1 for s <= 1");
    return zeta_euler_maclaurin(s, rel_tol, max_terms);
  }

  // Terms are positive and decreasing, so summing forward is already the
  // descending-magnitude order.
  CompensatedSum sum;
  const double one_minus_z = 1.0 - z;
  for (std::size_t k = 1; k <= max_terms; ++k) {
    const double kd = static_cast<double>(k);
    sum.add(std::pow(z, kd) / std::pow(kd, s));
    const double next = std::pow(z, kd + 1.0);
    const double tail = next / (std::pow(kd + 1.0, s) * one_minus_z);
    if (tail <= rel_tol * sum.value() || next == 0.0) {
      return {sum.value(), tail, k};
    }
  }
  throw ConvergenceError("polylog: more than " + std::to_string(max_terms) +
                         " terms needed at z = " + std::to_string(z));
}

}  // namespace bose
