#pragma once

#include <string>
#include <vector>

#include "zygmund/nadic_cube.hpp"

namespace zyg {

struct SymmetricEigen {
  Vec values;            // ascending
  SquareMatrix vectors;  // column j belongs to values[j]
  int sweeps = 0;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is
// <= tol * (Frobenius norm of the input). Input must be symmetric.
SymmetricEigen jacobi_eigen(const SquareMatrix& a, double tol = 1e-12, int max_sweeps = 100);

struct QRReport {
  std::string address;
  int N = 2;                // box C_{1/N}(Q)
  int m = 2;                // midpoint nodes per axis
  double numerator = 0.0;   // int rho(HF)^2 over the box
  SquareMatrix gram;        // int HF^2 over the box
  double denominator = 0.0; // lambda_min(gram)
  double gram_max_eig = 0.0;
  double gamma_sq = 0.0;    // numerator / denominator, +inf when flagged
  bool flagged = false;     // denominator <= kDegenerateRatio * trace(gram)
};

inline constexpr double kDegenerateRatio = 1e-12;

// Box integrals of max_e |(HF)e|^2 and min_e int |(HF)e|^2 over C_{1/N}(Q).
// Both extremizations are exact: the pointwise max is the spectral radius of
// the symmetric HF, and int |(HF)e|^2 = e^T (int HF^2) e.
QRReport weak_qr_ratio(const FieldHandle& field, const NadicCube& q, int N, int m);

// weak_qr_ratio for every cube of generations 0..depth below root, ordered by
// generation and index.
std::vector<QRReport> weak_qr_sweep(const FieldHandle& field, const NadicCube& root, int depth,
                                    int N, int m, int threads = 1);

struct HessianScan {
  double value = 0.0;        // min over e of max over the grid of y |(HF)e|
  std::size_t direction = 0; // index of the minimizing direction
  Vec per_direction;         // max over the grid for each direction
};

HessianScan hessian_lower_scan(const FieldHandle& field, const NadicCube& q, double delta,
                               const std::vector<Vec>& directions, int grid);

enum class SeminormKind { zygmund, bloch };

std::string to_string(SeminormKind k);

struct SeminormEstimate {
  SeminormKind kind = SeminormKind::bloch;
  double value = 0.0;
  std::size_t samples = 0;
  double range_lo = 0.0;  // y range (bloch) or |h| range (zygmund)
  double range_hi = 0.0;
  Vec argmax;             // (x, y) or (x, |h|) of the largest sample
};

struct SampleRegion {
  Vec corner;        // x box corner
  double side = 1.0; // x box sidelength
  double lo = 0.0;   // lower end of the y or |h| range
  double hi = 1.0;
};

// Sampled sup of y * max_ij |d_ij F| with quasi-random x and log-uniform y.
// Samples form a prefix-stable sequence, so more samples never lower the
// estimate.
SeminormEstimate bloch_seminorm(const FieldHandle& field, const SampleRegion& region,
                                std::size_t samples, std::uint64_t seed, int threads = 1);

// ||HF||_op <= ||HF||_Frobenius <= (d+1) max_ij |HF_ij|. Tight for the
// all-ones matrix, so sqrt(d+1) is not enough.
inline double bloch_operator_factor(std::size_t d) { return static_cast<double>(d + 1); }

using BoundaryFunction = std::function<double(std::span<const double>)>;

// Sampled sup of |f(x+h) + f(x-h) - 2 f(x)| / |h|. Sample i uses scale
// i mod |grid| of a log grid from hi down to lo, so hi is always attained.
SeminormEstimate zygmund_seminorm(const BoundaryFunction& f, std::size_t d,
                                  const SampleRegion& region, std::size_t samples,
                                  std::uint64_t seed, int threads = 1);

}  // namespace zyg
