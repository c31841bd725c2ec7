#pragma once

// Periodic-box mode lattice: momenta p = 2*pi*n / l, n in Z^d, cut off at
// |p| <= p_max, with the free dispersion lambda(p) = p^2 / 2 (hbar = m = 1).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bose {

inline constexpr std::size_t kDefaultMaxModes = 8'000'000;

struct ModeLattice {
  int dim = 0;
  double side = 0.0;
  double volume = 0.0;
  double p_max = 0.0;
  bool includes_zero = true;

  // Integer coordinates n of each mode, row-major (size() * dim entries),
  // ordered by (|n|^2, lexicographic n). The zero mode, when present, is first.
  std::vector<std::int32_t> indices;
  std::vector<std::int64_t> norm2;
  std::vector<double> energies;

  std::size_t size() const { return energies.size(); }
  double spacing() const;
  std::span<const std::int32_t> index(std::size_t i) const {
    return {indices.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::vector<double> momentum(std::size_t i) const;

  // Energies of every p != 0 mode, still in canonical order.
  std::span<const double> nonzero_energies() const;
};

// Throws DomainError for d < 1, l <= 0 or p_max <= 0, and ResourceError when
// the lattice would hold more than max_modes modes.
ModeLattice build_lattice(int dim, double side, double p_max,
                          std::size_t max_modes = kDefaultMaxModes);

double dispersion(std::span<const double> p);

}  // namespace bose
