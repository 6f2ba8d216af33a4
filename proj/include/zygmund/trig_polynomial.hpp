#pragma once

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

#include "zygmund/common.hpp"

namespace zyg {

struct TrigTerm {
  std::vector<int> k;
  std::complex<double> c;
};

// A Hermitian-paired mode k, -k stored in real form:
//   c_k e^{2 pi i k.x} + c_{-k} e^{-2 pi i k.x} = a cos(2 pi k.x) + b sin(2 pi k.x)
// with a = 2 Re c_k, b = -2 Im c_k.
struct RealMode {
  std::vector<int> k;
  double a = 0.0;
  double b = 0.0;
  double freq = 0.0;     // |k| (Euclidean)
  double abs_pair = 0.0; // |c_k| + |c_{-k}|
};

struct Jet2 {
  double value = 0.0;
  Vec gradient;
  SquareMatrix hessian;
};

struct SeminormBundle {
  double sup_abs = 0.0;
  double sup_grad = 0.0;
  double sup_hess = 0.0;           // Frobenius norm of the Hessian
  double hess_holder_alpha = 0.0;  // sum over entries of the alpha-Holder seminorms
  double alpha = 0.0;
};

enum class ConditionHVerdict { holds_via_derivative, holds_via_extremum, fails, inconclusive };

std::string to_string(ConditionHVerdict v);

struct ConditionHReport {
  Vec direction;
  ConditionHVerdict verdict = ConditionHVerdict::inconclusive;
  double directional_derivative = 0.0;
  double max_above = 0.0;  // max over samples of phi(te) - phi(0)
  double max_below = 0.0;  // max over samples of phi(0) - phi(te)
  double margin = 0.0;     // Lipschitz-along-e * h / 2
};

// Finite real trigonometric polynomial on R^d with integer frequencies,
// 1-periodic in every coordinate.
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  // Merges duplicate frequencies and symmetrizes to c_{-k} = conj(c_k).
  // Returns the largest pre-symmetrization asymmetry through `asymmetry`.
  TrigPolynomial(int d, const std::vector<TrigTerm>& terms, double* asymmetry = nullptr);

  static TrigPolynomial zero(int d) { return TrigPolynomial(d, {}); }
  // sum_i cos(2 pi x_i)
  static TrigPolynomial cosine_sum(int d);
  // coefficient * cos(2 pi k.x) + ...; convenience for tests and configs
  static TrigPolynomial from_real_modes(int d, double constant,
                                        const std::vector<RealMode>& modes);

  // JSON {"d": int, "terms": [{"k": [...], "re": x, "im": y}, ...]}.
  // Asymmetric input is symmetrized; a warning is appended when the asymmetry
  // exceeds 1e-12.
  static TrigPolynomial from_json(const nlohmann::json& j, std::vector<std::string>* warnings);
  nlohmann::json to_json() const;

  int dimension() const noexcept { return d_; }
  double constant() const noexcept { return constant_; }
  const std::vector<RealMode>& modes() const noexcept { return modes_; }
  double max_frequency() const noexcept { return max_freq_; }
  double min_frequency() const noexcept { return min_freq_; }
  bool is_zero() const noexcept { return modes_.empty() && constant_ == 0.0; }

  // Sum over the full (both signs) support of |c_k| (2 pi |k|)^order; order 0
  // includes the constant term.
  double weighted_l1(int order) const;

  double eval(std::span<const double> x) const;
  // Full complex sum over k and -k; the imaginary part is rounding residue.
  std::complex<double> eval_complex(std::span<const double> x) const;
  Jet2 jet2(std::span<const double> x) const;

  SeminormBundle seminorm_bounds(double alpha) const;

  // Returns the full list of terms (both signs of every frequency).
  std::vector<TrigTerm> terms() const;

 private:
  int d_ = 0;
  double constant_ = 0.0;
  std::vector<RealMode> modes_;
  double max_freq_ = 0.0;
  double min_freq_ = 0.0;
};

// Phase 2 pi frac(k . x) with the per-coordinate reduction done first so that
// large arguments lose as little precision as possible.
double reduced_phase(std::span<const int> k, std::span<const double> x);

// Default direction set for condition H: coordinate axes, the main diagonals
// and `extra` quasi-random unit vectors.
std::vector<Vec> condition_h_directions(int d, std::size_t extra, std::uint64_t seed);

std::vector<ConditionHReport> check_condition_h(const TrigPolynomial& phi,
                                                const std::vector<Vec>& directions,
                                                double t_window, double grid_step);

}  // namespace zyg
