#include "zygmund/sampling.hpp"

#include <boost/math/distributions/normal.hpp>

namespace zyg {

namespace {

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  for (std::uint32_t c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (std::uint32_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::uint64_t n, std::uint32_t base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (n > 0) {
    r += static_cast<double>(n % base) * f;
    n /= base;
    f *= inv;
  }
  return r;
}

double unit_from_bits(std::uint64_t v) {
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HaltonSequence::HaltonSequence(std::size_t dim, std::uint64_t seed)
    : bases_(first_primes(dim)), shift_(dim, 0.0) {
  require(dim > 0, "Halton dimension must be positive");
  if (seed != 0) {
    for (std::size_t k = 0; k < dim; ++k) shift_[k] = unit_from_bits(mix_seed(seed, k));
  }
}

Vec HaltonSequence::point(std::uint64_t i) const {
  Vec p(shift_.size());
  for (std::size_t k = 0; k < shift_.size(); ++k) {
    double v = radical_inverse(i + 1, bases_[k]) + shift_[k];
    p[k] = v >= 1.0 ? v - 1.0 : v;
  }
  return p;
}

std::vector<Vec> sphere_directions(std::size_t dim, std::size_t count,
                                   std::uint64_t seed) {
  require(dim > 0, "direction dimension must be positive");
  std::vector<Vec> dirs;
  dirs.reserve(count);
  for (std::size_t k = 0; k < dim && dirs.size() < count; ++k) {
    Vec e(dim, 0.0);
    e[k] = 1.0;
    dirs.push_back(std::move(e));
  }
  if (dirs.size() == count) return dirs;

  if (dim == 1) {
    // Only +-1 exist; alternate them.
    while (dirs.size() < count) dirs.push_back(Vec{dirs.size() % 2 == 0 ? 1.0 : -1.0});
    return dirs;
  }

  const boost::math::normal_distribution<double> gauss;
  HaltonSequence seq(dim, seed);
  for (std::uint64_t i = 0; dirs.size() < count; ++i) {
    Vec u = seq.point(i);
    Vec g(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      double p = std::clamp(u[k], 1e-12, 1.0 - 1e-12);
      g[k] = boost::math::quantile(gauss, p);
    }
    const double n = norm(g);
    if (n < 1e-9) continue;
    for (double& v : g) v /= n;
    dirs.push_back(std::move(g));
  }
  return dirs;
}

Vec log_grid_descending(double hi, double lo, int per_decade) {
  require(hi > 0.0 && lo > 0.0 && lo < hi, "log grid needs 0 < lo < hi");
  require(per_decade >= 1, "points per decade must be >= 1");
  const double decades = std::log10(hi / lo);
  const auto steps = static_cast<int>(std::ceil(decades * per_decade - 1e-9));
  Vec grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i < steps; ++i) {
    grid.push_back(hi * std::pow(10.0, -static_cast<double>(i) / per_decade));
  }
  grid.push_back(lo);
  return grid;
}

}  // namespace zyg
