#include "bose/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "bose/errors.hpp"

namespace bose {

double ModeLattice::spacing() const { return 2.0 * std::numbers::pi / side; }

std::vector<double> ModeLattice::momentum(std::size_t i) const {
  std::vector<double> p(static_cast<std::size_t>(dim));
  const auto n = index(i);
  for (int a = 0; a < dim; ++a) p[a] = spacing() * n[a];
  return p;
}

std::span<const double> ModeLattice::nonzero_energies() const {
  std::span<const double> all(energies);
  return includes_zero && !all.empty() ? all.subspan(1) : all;
}

ModeLattice build_lattice(int dim, double side, double p_max, std::size_t max_modes) {
  if (dim < 1) throw DomainError("build_lattice: dimension must be >= 1");
  require_positive(side, "side length", "build_lattice");
  require_positive(p_max, "p_max", "build_lattice");

  const double spacing = 2.0 * std::numbers::pi / side;
  const double radius = p_max / spacing;  // in units of the lattice spacing

  // Volume of the d-ball as a cheap pre-check before allocating anything.
  const double ball = std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0) *
                      std::pow(radius, dim);
  if (ball > 2.0 * static_cast<double>(max_modes) + 1e3) {
    throw ResourceError("build_lattice: about " + std::to_string(static_cast<long long>(ball)) +
                        " modes exceed the limit of " + std::to_string(max_modes));
  }

  const auto r = static_cast<std::int32_t>(std::floor(radius));
  const double p2_max = p_max * p_max;
  const double s2 = spacing * spacing;

  std::vector<std::int32_t> raw;
  std::vector<std::int64_t> raw_norm2;
  std::vector<std::int32_t> n(static_cast<std::size_t>(dim), -r);
  for (;;) {
    std::int64_t q = 0;
    for (auto c : n) q += static_cast<std::int64_t>(c) * c;
    if (s2 * static_cast<double>(q) <= p2_max) {
      raw.insert(raw.end(), n.begin(), n.end());
      raw_norm2.push_back(q);
      if (raw_norm2.size() > max_modes) {
        throw ResourceError("build_lattice: more than " + std::to_string(max_modes) + " modes");
      }
    }
    int a = dim - 1;
    while (a >= 0 && n[a] == r) n[a--] = -r;
    if (a < 0) break;
    ++n[a];
  }

  const std::size_t count = raw_norm2.size();
  const auto d = static_cast<std::size_t>(dim);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (raw_norm2[x] != raw_norm2[y]) return raw_norm2[x] < raw_norm2[y];
    return std::lexicographical_compare(raw.begin() + x * d, raw.begin() + (x + 1) * d,
                                        raw.begin() + y * d, raw.begin() + (y + 1) * d);
  });

  ModeLattice lat;
  lat.dim = dim;
  lat.side = side;
  lat.volume = std::pow(side, dim);
  lat.p_max = p_max;
  lat.includes_zero = true;
  lat.indices.reserve(count * d);
  lat.norm2.reserve(count);
  lat.energies.reserve(count);
  for (std::size_t k : order) {
    lat.indices.insert(lat.indices.end(), raw.begin() + k * d, raw.begin() + (k + 1) * d);
    lat.norm2.push_back(raw_norm2[k]);
    lat.energies.push_back(0.5 * s2 * static_cast<double>(raw_norm2[k]));
  }
  return lat;
}

double dispersion(std::span<const double> p) {
  double q = 0.0;
  for (double c : p) q += c * c;
  return 0.5 * q;
}

}  // namespace bose
