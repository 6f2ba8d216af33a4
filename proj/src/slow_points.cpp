#include "zygmund/slow_points.hpp"

#include <random>

#include "zygmund/sampling.hpp"

namespace zyg {

RayProfile ray_profile(const FieldHandle& field, std::span<const double> x, double y_min,
                       double y_max, int points_per_decade) {
  require(x.size() == field.dimension(), "point dimension mismatch");
  require(y_min >= kMinHeight, "y_min below the supported minimum height 1e-12");
  require(y_min < y_max && y_max <= 1.0, "ray needs 0 < y_min < y_max <= 1");
  require(points_per_decade >= 1, "points_per_decade must be >= 1");
  RayProfile p;
  p.x.assign(x.begin(), x.end());
  p.y_grid = log_grid_descending(y_max, y_min, points_per_decade);
  const std::size_t d = x.size();
  for (double y : p.y_grid) {
    const HarmonicJet j = field.jet(x, y);
    p.grad_norms.push_back(norm(j.gradient));
    Vec t(j.gradient.begin(), j.gradient.begin() + static_cast<std::ptrdiff_t>(d));
    p.tangential_norms.push_back(norm(t));
    p.tangential.push_back(std::move(t));
  }
  return p;
}

SlowScore slow_score(const BoundaryFunction& f, std::span<const double> x, double h_min,
                     double h_max, std::size_t directions_per_scale, std::uint64_t seed) {
  require(h_min > 0.0 && h_min < h_max, "slow score needs 0 < h_min < h_max");
  require(directions_per_scale >= 1, "need at least one direction per scale");
  const std::size_t d = x.size();
  const auto dirs = sphere_directions(d, directions_per_scale, seed);
  SlowScore s;
  s.x.assign(x.begin(), x.end());
  const double fx = f(x);
  Vec xp(d);
  for (double h = h_max; h >= h_min * (1.0 - 1e-12); h *= 0.5) {
    double q = 0.0;
    for (const auto& e : dirs) {
      for (std::size_t k = 0; k < d; ++k) xp[k] = x[k] + h * e[k];
      q = std::max(q, std::abs(f(xp) - fx) / h);
    }
    s.h_grid.push_back(h);
    s.quotients.push_back(q);
  }
  const std::size_t n = s.h_grid.size();
  if (n >= 2) {
    double mt = 0.0, mq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mt += std::log(1.0 / s.h_grid[i]);
      mq += s.quotients[i];
    }
    mt /= n;
    mq /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = std::log(1.0 / s.h_grid[i]) - mt;
      sxy += t * (s.quotients[i] - mq);
      sxx += t * t;
    }
    s.trend = sxy / sxx;
  }
  return s;
}

std::vector<IncrementSample> increment_samples(std::size_t d, std::size_t count, double h_min,
                                               double h_max, std::uint64_t seed) {
  require(d >= 1, "dimension must be >= 1");
  require(h_min > 0.0 && h_min <= h_max, "increment range needs 0 < h_min <= h_max");
  const HaltonSequence seq(d + 1, seed);
  const auto dirs = sphere_directions(d, count, mix_seed(seed, 2));
  const double log_ratio = std::log(h_max / h_min);
  std::vector<IncrementSample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec u = seq.point(i);
    out[i].x.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(d));
    const double r = h_min * std::exp(log_ratio * u[d]);
    out[i].h.resize(d);
    for (std::size_t k = 0; k < d; ++k) out[i].h[k] = r * dirs[i][k];
  }
  return out;
}

IncrementResidualReport check_increment_residual(const BoundaryFunction& f, const FieldHandle& field,
                          const std::vector<IncrementSample>& samples, double zygmund,
                          int threads) {
  require(zygmund >= 0.0, "Zygmund estimate must be nonnegative");
  const std::size_t d = field.dimension();
  Vec res(samples.size()), gap(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto& s = samples[i];
    require(s.x.size() == d && s.h.size() == d, "increment sample has wrong dimension");
    const double r = norm(s.h);
    require(r > 0.0 && r <= 1.0, "|h| must lie in (0, 1]");
    Vec xp(d), xm(d);
    for (std::size_t k = 0; k < d; ++k) {
      xp[k] = s.x[k] + s.h[k];
      xm[k] = s.x[k] - s.h[k];
    }
    const HarmonicJet j = field.jet(s.x, r);
    const double hg = dot(s.h, std::span<const double>(j.gradient.data(), d));
    const double fx = f(s.x), fp = f(xp), fm = f(xm);
    const double plus = std::abs(fp - fx - hg) / r;
    const double minus = std::abs(fm - fx + hg) / r;
    res[i] = plus;
    gap[i] = std::abs(plus - minus) - std::abs(fp + fm - 2.0 * fx) / r;
  });
  IncrementResidualReport rep;
  rep.samples = samples.size();
  rep.zygmund = zygmund;
  rep.max_symmetry_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    rep.max_residual = std::max(rep.max_residual, res[i]);
    rep.max_symmetry_gap = std::max(rep.max_symmetry_gap, gap[i]);
  }
  if (samples.empty()) rep.max_symmetry_gap = 0.0;
  if (zygmund > 0.0)
    rep.normalized = rep.max_residual / zygmund;
  else
    rep.normalized = rep.max_residual > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return rep;
}

SurveyTable directional_divergence_survey(const FieldHandle& field, std::span<const double> e,
                                          const std::vector<Vec>& x_samples, const Vec& floors,
                                          const Vec& thresholds, double y_top,
                                          int points_per_decade, int threads) {
  const std::size_t d = field.dimension();
  require(e.size() == d, "survey direction must live in R^d");
  require(std::abs(norm(e) - 1.0) <= 1e-12, "survey direction must be a unit vector");
  require(!floors.empty(), "survey needs at least one floor");
  require(y_top <= 1.0 && floors.front() <= y_top, "floors must lie below y_top <= 1");
  for (std::size_t j = 0; j < floors.size(); ++j) {
    require(floors[j] >= kMinHeight, "survey floor below the supported minimum height");
    if (j) require(floors[j] < floors[j - 1], "survey floors must be strictly decreasing");
  }
  for (const auto& x : x_samples) require(x.size() == d, "survey point has wrong dimension");

  // One grid for every x: the log grid plus the floors themselves.
  Vec grid = floors.back() < y_top ? log_grid_descending(y_top, floors.back(), points_per_decade)
                                   : Vec{y_top};
  grid.insert(grid.end(), floors.begin(), floors.end());
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  SurveyTable t;
  t.floors = floors;
  t.thresholds = thresholds;
  t.points = x_samples;
  t.sups.assign(x_samples.size(), Vec(floors.size(), 0.0));
  parallel_for(x_samples.size(), threads, [&](std::size_t i) {
    double running = 0.0;
    std::size_t j = 0;
    for (double y : grid) {
      while (j < floors.size() && y < floors[j]) t.sups[i][j++] = running;
      const HarmonicJet jet = field.jet(x_samples[i], y);
      running = std::max(running, std::abs(dot(std::span<const double>(jet.gradient.data(), d), e)));
    }
    while (j < floors.size()) t.sups[i][j++] = running;
  });
  t.exceedance.assign(thresholds.size(), Vec(floors.size(), 0.0));
  if (!x_samples.empty()) {
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      for (std::size_t j = 0; j < floors.size(); ++j) {
        std::size_t c = 0;
        for (const auto& row : t.sups) c += row[j] > thresholds[k] ? 1 : 0;
        t.exceedance[k][j] = static_cast<double>(c) / static_cast<double>(x_samples.size());
      }
  }
  return t;
}

OscillationReport check_oscillation_bound(const FieldHandle& field, double bloch,
                                          std::size_t pairs, double y_min, std::uint64_t seed,
                                          int threads) {
  require(bloch >= 0.0, "Bloch estimate must be nonnegative");
  require(y_min >= kMinHeight && y_min < 1.0, "y_min must lie in [1e-12, 1)");
  const std::size_t d = field.dimension();
  struct Pair {
    Vec a, b;
    double s, t;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;
  std::vector<Pair> ps(pairs);
  const double log_floor = std::log(y_min);
  for (auto& p : ps) {
    p.a.resize(d);
    p.b.resize(d);
    for (double& v : p.a) v = unif(rng);
    p.s = std::exp(log_floor * unif(rng));
    // Partners at distances comparable to the height, where the bound is tight.
    const double reach = p.s * std::exp(std::log(1e-3) + std::log(4e3) * unif(rng));
    Vec dir(d);
    for (double& v : dir) v = gauss(rng);
    const double n = std::max(norm(dir), 1e-300);
    for (std::size_t k = 0; k < d; ++k) p.b[k] = p.a[k] + reach * dir[k] / n;
    p.t = std::clamp(p.s * std::exp(2.0 * gauss(rng)), y_min, 1.0);
  }
  OscillationReport rep;
  rep.pairs = pairs;
  rep.factor = static_cast<double>(d + 1);
  Vec ratio(pairs, 0.0);
  parallel_for(pairs, threads, [&](std::size_t i) {
    const auto& p = ps[i];
    const Vec ga = field.jet(p.a, p.s).gradient;
    const Vec gb = field.jet(p.b, p.t).gradient;
    const double dist = distance(p.a, p.b) / std::max(p.s, p.t) + std::abs(std::log(p.t / p.s));
    const double diff = distance(ga, gb);
    if (bloch * dist > 0.0)
      ratio[i] = diff / (bloch * dist);
    else
      ratio[i] = diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  });
  for (double r : ratio) {
    rep.max_ratio = std::max(rep.max_ratio, r);
    if (r > rep.factor) ++rep.violations;
  }
  return rep;
}

}  // namespace zyg
