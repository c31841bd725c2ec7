#pragma once

#include <cstddef>

namespace bose {

// A series value with a rigorous bound on the discarded tail.
struct SeriesValue {
  double value = 0.0;
  double bound = 0.0;
  std::size_t terms = 0;
};

// Li_s(z) = sum_{k>=1} z^k / k^s for real s > 0 and z in [0, 1]; z = 1 needs
// s > 1. The returned bound satisfies bound <= rel_tol * value. At z = 1 the
// tail is summed with Euler-Maclaurin and bounded by its first omitted term.
//
// Throws DomainError outside the admissible (s, z) set and ConvergenceError
// when more than max_terms terms would be needed (z extremely close to 1).
SeriesValue polylog(double s, double z, double rel_tol = 1e-17,
                    std::size_t max_terms = 100'000'000);

}  // namespace bose
