#pragma once

#include <utility>
#include <vector>

#include "zygmund/harmonic_field.hpp"
#include "zygmund/trig_polynomial.hpp"

namespace zyg {

// Bounded harmonic extension of phi to R^{d+1}_+:
//   Phi(x,y) = sum_k c_k e^{-2 pi |k| y} e^{2 pi i k.x}
// Exact for trigonometric polynomials; derivatives are taken per mode.
HarmonicJet phi_extension_jet(const TrigPolynomial& phi, std::span<const double> x, double y);

class PhiExtensionField final : public FieldHandle {
 public:
  explicit PhiExtensionField(TrigPolynomial phi) : phi_(std::move(phi)) {}
  std::size_t dimension() const override { return static_cast<std::size_t>(phi_.dimension()); }
  HarmonicJet jet(std::span<const double> x, double y) const override {
    return phi_extension_jet(phi_, x, y);
  }
  std::string describe() const override { return "phi_extension"; }
  const TrigPolynomial& base() const noexcept { return phi_; }

 private:
  TrigPolynomial phi_;
};

// f(x) = sum_n b^{-n} phi(b^n x) and its harmonic extension
// F(x,y) = sum_n b^{-n} Phi(b^n x, b^n y).
//
// Truncation of F is certified separately for each jet order. With
// u = b^n y and w = 2 pi |k| the n-th term is bounded by
//   value:    b^{-n} (|c_0| + sum |c_k| e^{-w u})
//   gradient: sum |c_k| w e^{-w u}
//   Hessian:  sqrt(2) b^n sum |c_k| w^2 e^{-w u}        (Frobenius)
// Once w_min (b-1) u >= log(2) (gradient) or log(2b) (Hessian) consecutive
// terms shrink by at least half, so the remaining tail is at most twice the
// next term. Summation stops when all three tails are <= tail_tol.
class WeierstrassField final : public FieldHandle {
 public:
  WeierstrassField(TrigPolynomial phi, double b, double tail_tol);

  std::size_t dimension() const override { return static_cast<std::size_t>(phi_.dimension()); }
  HarmonicJet jet(std::span<const double> x, double y) const override;
  std::string describe() const override { return "weierstrass"; }

  // Boundary function f, truncated so that the geometric tail
  // sup|phi| b^{-N}/(b-1) is <= tail_tol.
  double eval(std::span<const double> x) const;

  // Number of series terms a jet at height y uses.
  int terms_for_height(double y) const;
  int terms_for_boundary() const noexcept { return boundary_terms_; }

  const TrigPolynomial& base() const noexcept { return phi_; }
  double b() const noexcept { return b_; }
  double tail_tol() const noexcept { return tail_tol_; }

 private:
  // Returns true when the tails after term n (exclusive) are all <= tail_tol.
  bool tails_certified(int n, double y) const;

  TrigPolynomial phi_;
  double b_;
  double tail_tol_;
  int boundary_terms_ = 0;
};

// Truncated jet computed with exactly `terms` series terms (no certification).
// Used as an independent long-summation reference.
HarmonicJet weierstrass_jet_fixed_terms(const WeierstrassField& w, std::span<const double> x,
                                        double y, int terms);

inline double weierstrass_eval(const WeierstrassField& w, std::span<const double> x) {
  return w.eval(x);
}

inline HarmonicJet field_jet(const WeierstrassField& w, std::span<const double> x, double y) {
  return w.jet(x, y);
}

struct FunctionalEquationResiduals {
  double value = 0.0;     // F(bx,by) = b F(x,y) - b Phi(x,y)
  double gradient = 0.0;  // grad F(bx,by) = grad F(x,y) - grad Phi(x,y)
  double hessian = 0.0;   // b HF(bx,by) = HF(x,y) - HPhi(x,y)
  std::size_t samples = 0;
};

struct HalfSpacePoint {
  Vec x;
  double y = 0.0;
};

// Max relative residuals of the three scaling identities over the samples.
// Each residual is |lhs - rhs| / max(|lhs|, |rhs| terms), or the absolute
// difference when every term vanishes.
FunctionalEquationResiduals check_functional_equations(const WeierstrassField& w,
                                                       const std::vector<HalfSpacePoint>& samples,
                                                       int threads = 1);

struct RepresentationCheck {
  double residual = 0.0;   // |f(x) - rhs|
  double boundary = 0.0;   // f(x)
  double rhs = 0.0;        // integral - y grad F . e + F
  double integral = 0.0;   // int_{t0}^{y} t e^T HF e dt
  double t0 = 0.0;
  double remainder_bound = 0.0;  // C * t0, C = sampled sup |t e^T HF e|
  double quadrature_error = 0.0; // summed Gauss-Kronrod error estimates
  std::size_t panels = 0;
};

struct RepresentationOptions {
  double t0_fraction = 1e-8;  // quadrature starts at t0 = t0_fraction * y
  double panel_ratio = 2.0;   // geometric panels [t/ratio, t]
  double panel_tol = 1e-12;   // relative tolerance per panel
  unsigned max_depth = 12;
};

// Checks f(x) = int_0^y t (e^T HF e)(x+te) dt - y grad F(x+ye).e + F(x+ye)
// for a unit e in R^{d+1} with positive last coordinate.
RepresentationCheck check_representation_identity(const WeierstrassField& w,
                                                  std::span<const double> x, double y,
                                                  std::span<const double> e,
                                                  const RepresentationOptions& opts = {});

}  // namespace zyg
