#pragma once

#include <vector>

#include "zygmund/harmonic_field.hpp"
#include "zygmund/qr_analysis.hpp"

namespace zyg {

struct RayProfile {
  Vec x;
  Vec y_grid;                  // strictly decreasing
  Vec grad_norms;              // |grad F(x,y)|
  Vec tangential_norms;        // |grad_x F(x,y)|
  std::vector<Vec> tangential; // grad_x F(x,y)
};

// Jets along the vertical ray over x, log-spaced from y_max down to y_min.
RayProfile ray_profile(const FieldHandle& field, std::span<const double> x, double y_min,
                       double y_max, int points_per_decade);

struct SlowScore {
  Vec x;
  Vec h_grid;    // dyadic scales h_max 2^{-j}, decreasing
  Vec quotients; // max over directions of |f(x+h e) - f(x)| / h
  double trend = 0.0;  // least-squares slope of quotient against log(1/h)
};

SlowScore slow_score(const BoundaryFunction& f, std::span<const double> x, double h_min,
                     double h_max, std::size_t directions_per_scale, std::uint64_t seed);

struct IncrementSample {
  Vec x;
  Vec h;
};

// x uniform in [0,1)^d (quasi-random), |h| log-uniform in [h_min, h_max],
// direction from the sphere sequence.
std::vector<IncrementSample> increment_samples(std::size_t d, std::size_t count, double h_min,
                                               double h_max, std::uint64_t seed);

struct IncrementResidualReport {
  double max_residual = 0.0;    // max |f(x+h) - f(x) - h.grad_x F(x,|h|)| / |h|
  double zygmund = 0.0;         // normalizing seminorm estimate
  double normalized = 0.0;      // max_residual / zygmund
  double max_symmetry_gap = 0.0;  // max |res(h) - res(-h)| - |second difference| / |h|
  std::size_t samples = 0;
};

// The residual satisfies |res(h) - res(-h)| <= |f(x+h) + f(x-h) - 2f(x)| / |h|
// by the triangle inequality; max_symmetry_gap should stay <= rounding.
IncrementResidualReport check_increment_residual(const BoundaryFunction& f, const FieldHandle& field,
                          const std::vector<IncrementSample>& samples, double zygmund,
                          int threads = 1);

struct SurveyTable {
  Vec floors;                          // decreasing
  Vec thresholds;
  std::vector<Vec> sups;               // sups[i][j]: x sample i, floor j
  std::vector<Vec> exceedance;         // exceedance[t][j]: fraction of x with sup > thresholds[t]
  std::vector<Vec> points;             // x samples
};

// For each x, the running sup of |grad_x F(x,y) . e| over y in [floor, y_top]
// on a nested log grid, so sups are nondecreasing as floors shrink.
SurveyTable directional_divergence_survey(const FieldHandle& field, std::span<const double> e,
                                          const std::vector<Vec>& x_samples, const Vec& floors,
                                          const Vec& thresholds, double y_top = 1.0,
                                          int points_per_decade = 16, int threads = 1);

struct OscillationReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double factor = 0.0;     // dimensional factor applied to the Bloch estimate
  double max_ratio = 0.0;  // max observed |grad F(b,t) - grad F(a,s)| / (B dist)
};

// Samples pairs (a,s), (b,t) with x in [0,1)^d, heights in [y_min, 1] and
// checks |grad F(b,t) - grad F(a,s)| <= factor B (|b-a|/max(t,s) + |log(t/s)|).
// Integrating the Hessian along a vertical-horizontal-vertical path gives
// factor = sqrt(d (d+1)) <= d+1 for the entrywise B.
OscillationReport check_oscillation_bound(const FieldHandle& field, double bloch,
                                          std::size_t pairs, double y_min, std::uint64_t seed,
                                          int threads = 1);

}  // namespace zyg
