#pragma once

// Elementwise arithmetic kernels behind the mode sums, the zero-mode series
// and the Gibbs weights. Every kernel has a scalar reference implementation;
// vector variants are selected once at runtime and must agree with the
// reference to a few ulp (see tests/test_kernels.cpp).
//
// Kernels only transform arrays. Reductions stay in the caller, in canonical
// order, so that the choice of kernel never changes summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace bose::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // out[i] = -log(1 - exp(beta*(mu - energy[i]))), requires energy[i] > mu.
  void (*bose_log_terms)(std::span<const double> energy, double beta, double mu,
                         std::span<double> out);

  // out[i] = 1 / (exp(beta*(energy[i] - mu)) - 1), requires energy[i] > mu.
  void (*bose_occupation_terms)(std::span<const double> energy, double beta, double mu,
                                std::span<double> out);

  // out[i] = exp(x[i] - shift)
  void (*exp_shifted)(std::span<const double> x, double shift, std::span<double> out);

  // out[k] = beta * (mu * n + c * sqrt(n + 1)) with n = first + k, where
  // c = coefficient * nu * sqrt(V). Exponent of the square-root source series.
  void (*sqrt_source_exponents)(std::size_t first, double beta, double mu, double c,
                                std::span<double> out);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);

// Picks the widest supported table once per process. The environment variable
// BOSE_LIMITS_KERNEL=scalar|avx2|auto overrides the choice; an unsupported
// request falls back to scalar.
const KernelTable& active();

const KernelTable* table_for(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace bose::kernels
