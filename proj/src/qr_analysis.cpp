#include "zygmund/qr_analysis.hpp"

#include <limits>

#include "zygmund/sampling.hpp"

namespace zyg {

SymmetricEigen jacobi_eigen(const SquareMatrix& input, double tol, int max_sweeps) {
  const std::size_t n = input.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(input(i, j) - input(j, i)) <=
                  1e-12 * std::max(1.0, input.max_abs_entry()),
              "jacobi_eigen needs a symmetric matrix");
  SquareMatrix a = input;
  SquareMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const double scale = input.frobenius();

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  SymmetricEigen out;
  while (out.sweeps < max_sweeps && off_norm() > tol * scale) {
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_norm() > tol * scale)
    throw Error(ErrorKind::numeric, "Jacobi iteration did not converge");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors = SquareMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

QRReport weak_qr_ratio(const FieldHandle& field, const NadicCube& q, int N, int m) {
  require(N >= 2, "weak QR box parameter N must be >= 2");
  require(m >= 2, "weak QR quadrature needs m >= 2");
  require(field.dimension() == q.dimension(), "field and cube dimensions differ");
  const CarlesonBox box(q, 1.0 / N);
  const std::size_t n = q.dimension() + 1;

  QRReport r;
  r.address = q.address();
  r.N = N;
  r.m = m;
  r.gram = SquareMatrix(n);
  for_each_box_node(box, m, [&](std::span<const double> x, double y, double w) {
    const HarmonicJet j = field.jet(x, y);
    SquareMatrix sq = j.hessian.square();
    const auto eig = jacobi_eigen(j.hessian);
    const double rho = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    r.numerator += w * rho * rho;
    sq *= w;
    r.gram += sq;
  });
  // Symmetrize away rounding before the eigen solve.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) {
      const double s = 0.5 * (r.gram(i, k) + r.gram(k, i));
      r.gram(i, k) = r.gram(k, i) = s;
    }
  const auto eig = jacobi_eigen(r.gram);
  r.denominator = eig.values.front();
  r.gram_max_eig = eig.values.back();
  const double tr = r.gram.trace();
  r.flagged = !(r.denominator > kDegenerateRatio * tr);
  r.gamma_sq = r.flagged ? std::numeric_limits<double>::infinity() : r.numerator / r.denominator;
  return r;
}

std::vector<QRReport> weak_qr_sweep(const FieldHandle& field, const NadicCube& root, int depth,
                                    int N, int m, int threads) {
  require(depth >= 0, "sweep depth must be >= 0");
  std::vector<NadicCube> cubes;
  for (int g = root.generation(); g <= root.generation() + depth; ++g) {
    auto level = descendants(root, g);
    cubes.insert(cubes.end(), level.begin(), level.end());
  }
  std::vector<QRReport> out(cubes.size());
  parallel_for(cubes.size(), threads,
               [&](std::size_t i) { out[i] = weak_qr_ratio(field, cubes[i], N, m); });
  return out;
}

HessianScan hessian_lower_scan(const FieldHandle& field, const NadicCube& q, double delta,
                               const std::vector<Vec>& directions, int grid) {
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
  require(!directions.empty(), "direction set must be nonempty");
  require(grid >= 1, "scan grid must be >= 1");
  const std::size_t n = q.dimension() + 1;
  for (const auto& e : directions) {
    require(e.size() == n, "scan directions must live in R^{d+1}");
    require(std::abs(norm(e) - 1.0) <= 1e-12, "scan directions must be unit vectors");
  }
  HessianScan s;
  s.per_direction.assign(directions.size(), 0.0);
  const CarlesonBox box(q, delta);
  for_each_box_node(box, grid, [&](std::span<const double> x, double y, double) {
    const HarmonicJet j = field.jet(x, y);
    for (std::size_t k = 0; k < directions.size(); ++k)
      s.per_direction[k] = std::max(s.per_direction[k], y * norm(j.hessian.apply(directions[k])));
  });
  s.value = s.per_direction.front();
  for (std::size_t k = 1; k < directions.size(); ++k) {
    if (s.per_direction[k] < s.value) {
      s.value = s.per_direction[k];
      s.direction = k;
    }
  }
  return s;
}

std::string to_string(SeminormKind k) { return k == SeminormKind::zygmund ? "zygmund" : "bloch"; }

namespace {

void check_region(const SampleRegion& r, std::size_t d) {
  require(r.corner.size() == d, "sample region has wrong dimension");
  require(r.side > 0.0, "sample region side must be positive");
  require(r.lo > 0.0 && r.lo <= r.hi && r.hi <= 1.0, "sample range must lie within (0, 1]");
}

SeminormEstimate reduce(SeminormKind kind, const SampleRegion& region, const Vec& values,
                        const std::vector<Vec>& points) {
  SeminormEstimate e;
  e.kind = kind;
  e.samples = values.size();
  e.range_lo = region.lo;
  e.range_hi = region.hi;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > e.value || e.argmax.empty()) {
      e.value = std::max(e.value, values[i]);
      e.argmax = points[i];
    }
  }
  return e;
}

}  // namespace

SeminormEstimate bloch_seminorm(const FieldHandle& field, const SampleRegion& region,
                                std::size_t samples, std::uint64_t seed, int threads) {
  const std::size_t d = field.dimension();
  check_region(region, d);
  require(region.lo >= kMinHeight, "y range below the supported minimum height");
  const HaltonSequence seq(d + 1, seed);
  const double log_ratio = std::log(region.hi / region.lo);
  Vec values(samples);
  std::vector<Vec> points(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    const Vec u = seq.point(i);
    Vec p(d + 1);
    for (std::size_t k = 0; k < d; ++k) p[k] = region.corner[k] + region.side * u[k];
    p[d] = region.lo * std::exp(log_ratio * u[d]);
    const HarmonicJet j = field.jet(std::span<const double>(p.data(), d), p[d]);
    values[i] = p[d] * j.hessian.max_abs_entry();
    points[i] = std::move(p);
  });
  return reduce(SeminormKind::bloch, region, values, points);
}

SeminormEstimate zygmund_seminorm(const BoundaryFunction& f, std::size_t d,
                                  const SampleRegion& region, std::size_t samples,
                                  std::uint64_t seed, int threads) {
  check_region(region, d);
  const HaltonSequence seq(d, seed);
  const auto dirs = sphere_directions(d, samples, mix_seed(seed, 1));
  const Vec scales = region.lo < region.hi ? log_grid_descending(region.hi, region.lo, 8)
                                           : Vec{region.hi};
  Vec values(samples);
  std::vector<Vec> points(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    const Vec u = seq.point(i);
    const double h = scales[i % scales.size()];
    Vec x(d), xp(d), xm(d);
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = region.corner[k] + region.side * u[k];
      xp[k] = x[k] + h * dirs[i][k];
      xm[k] = x[k] - h * dirs[i][k];
    }
    values[i] = std::abs(f(xp) + f(xm) - 2.0 * f(x)) / h;
    x.push_back(h);
    points[i] = std::move(x);
  });
  return reduce(SeminormKind::zygmund, region, values, points);
}

}  // namespace zyg
