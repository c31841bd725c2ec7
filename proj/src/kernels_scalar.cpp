#include "bose/kernels.hpp"

#include <cmath>

namespace bose::kernels {
namespace {

void bose_log_terms(std::span<const double> energy, double beta, double mu,
                    std::span<double> out) {
  // Near x = 0, 1 - e^x cancels; expm1 keeps full relative accuracy there.
  constexpr double kSplit = -0.693147180559945309;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    const double x = beta * (mu - energy[i]);
    out[i] = x > kSplit ? -std::log(-std::expm1(x)) : -std::log1p(-std::exp(x));
  }
}

void bose_occupation_terms(std::span<const double> energy, double beta, double mu,
                           std::span<double> out) {
  for (std::size_t i = 0; i < energy.size(); ++i) {
    out[i] = 1.0 / std::expm1(beta * (energy[i] - mu));
  }
}

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - shift);
  }
}

void sqrt_source_exponents(std::size_t first, double beta, double mu, double c,
                           std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double n = static_cast<double>(first + k);
    out[k] = beta * (mu * n + c * std::sqrt(n + 1.0));
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, "scalar", bose_log_terms,
                                 bose_occupation_terms, exp_shifted,
                                 sqrt_source_exponents};
  return table;
}

}  // namespace bose::kernels
