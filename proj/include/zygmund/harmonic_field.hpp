#pragma once

#include <memory>
#include <string>

#include "zygmund/common.hpp"

namespace zyg {

// Value, gradient and Hessian of a harmonic function on the upper half-space
// R^{d+1}_+ at one point. The last coordinate is the height y.
struct HarmonicJet {
  double value = 0.0;
  Vec gradient;          // size d+1
  SquareMatrix hessian;  // (d+1) x (d+1), symmetric, traceless

  explicit HarmonicJet(std::size_t d = 0) : gradient(d + 1, 0.0), hessian(d + 1) {}

  std::size_t dimension() const noexcept { return gradient.size() - 1; }
  // |grad_x F|, the tangential part.
  double tangential_norm() const;
};

// Anything that can produce harmonic jets for y > 0. Implementations must be
// immutable after construction so that one handle can be shared by workers.
class FieldHandle {
 public:
  virtual ~FieldHandle() = default;
  virtual std::size_t dimension() const = 0;
  virtual HarmonicJet jet(std::span<const double> x, double y) const = 0;
  virtual std::string describe() const = 0;
};

using FieldPtr = std::shared_ptr<const FieldHandle>;

// F(x,y) = slope * x_1 + offset. Constant gradient slope * e_1.
class LinearField final : public FieldHandle {
 public:
  explicit LinearField(std::size_t d, double slope = 1.0, double offset = 0.0);
  std::size_t dimension() const override { return d_; }
  HarmonicJet jet(std::span<const double> x, double y) const override;
  std::string describe() const override { return "linear"; }

 private:
  std::size_t d_;
  double slope_, offset_;
};

// F(x,y) = x_1^2 - y^2. Hessian diag(2, 0, ..., 0, -2): annihilates every
// direction orthogonal to e_1 and e_y when d >= 2.
class SaddleField final : public FieldHandle {
 public:
  explicit SaddleField(std::size_t d);
  std::size_t dimension() const override { return d_; }
  HarmonicJet jet(std::span<const double> x, double y) const override;
  std::string describe() const override { return "saddle"; }

 private:
  std::size_t d_;
};

// F = Re(z log z) - z with z = (x_1 - center) + i y, lifted to R^{d+1}_+.
// grad F = (log r, 0, ..., 0, -arg z): the tangential part has a log
// singularity and the normal part jumps from 0 to -pi across x_1 = center.
class KinkField final : public FieldHandle {
 public:
  KinkField(std::size_t d, double center, double scale = 1.0);
  std::size_t dimension() const override { return d_; }
  HarmonicJet jet(std::span<const double> x, double y) const override;
  std::string describe() const override { return "kink"; }

 private:
  std::size_t d_;
  double center_, scale_;
};

// c * inner + linear shift c_shift * x_1.
class AffineModifiedField final : public FieldHandle {
 public:
  AffineModifiedField(FieldPtr inner, double scale, double shift_slope);
  std::size_t dimension() const override { return inner_->dimension(); }
  HarmonicJet jet(std::span<const double> x, double y) const override;
  std::string describe() const override { return "scaled(" + inner_->describe() + ")"; }

 private:
  FieldPtr inner_;
  double scale_, shift_;
};

void require_height(double y);

}  // namespace zyg
