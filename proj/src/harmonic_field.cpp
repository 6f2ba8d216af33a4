#include "zygmund/harmonic_field.hpp"

#include <sstream>

namespace zyg {

void require_height(double y) {
  if (!(y >= kMinHeight)) {
    std::ostringstream os;
    os << "height y must be >= " << kMinHeight << " (got " << y << ")";
    fail_argument(os.str());
  }
}

double HarmonicJet::tangential_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < gradient.size(); ++i) s += gradient[i] * gradient[i];
  return std::sqrt(s);
}

LinearField::LinearField(std::size_t d, double slope, double offset)
    : d_(d), slope_(slope), offset_(offset) {
  require(d >= 1, "field dimension must be >= 1");
}

HarmonicJet LinearField::jet(std::span<const double> x, double y) const {
  require_height(y);
  HarmonicJet j(d_);
  j.value = slope_ * x[0] + offset_;
  j.gradient[0] = slope_;
  return j;
}

SaddleField::SaddleField(std::size_t d) : d_(d) {
  require(d >= 1, "field dimension must be >= 1");
}

HarmonicJet SaddleField::jet(std::span<const double> x, double y) const {
  require_height(y);
  HarmonicJet j(d_);
  j.value = x[0] * x[0] - y * y;
  j.gradient[0] = 2.0 * x[0];
  j.gradient[d_] = -2.0 * y;
  j.hessian(0, 0) = 2.0;
  j.hessian(d_, d_) = -2.0;
  return j;
}

KinkField::KinkField(std::size_t d, double center, double scale)
    : d_(d), center_(center), scale_(scale) {
  require(d >= 1, "field dimension must be >= 1");
}

HarmonicJet KinkField::jet(std::span<const double> x, double y) const {
  require_height(y);
  HarmonicJet j(d_);
  const double u = x[0] - center_;
  const double r2 = u * u + y * y;
  const double logr = 0.5 * std::log(r2);
  const double arg = std::atan2(y, u);
  // Re(z log z) - z = u log r - y arg - u
  j.value = scale_ * (u * logr - y * arg - u);
  j.gradient[0] = scale_ * logr;
  j.gradient[d_] = -scale_ * arg;
  j.hessian(0, 0) = scale_ * u / r2;
  j.hessian(0, d_) = j.hessian(d_, 0) = scale_ * y / r2;
  j.hessian(d_, d_) = -scale_ * u / r2;
  return j;
}

AffineModifiedField::AffineModifiedField(FieldPtr inner, double scale, double shift_slope)
    : inner_(std::move(inner)), scale_(scale), shift_(shift_slope) {
  require(inner_ != nullptr, "null inner field");
}

HarmonicJet AffineModifiedField::jet(std::span<const double> x, double y) const {
  HarmonicJet j = inner_->jet(x, y);
  j.value = scale_ * j.value + shift_ * x[0];
  for (double& g : j.gradient) g *= scale_;
  j.gradient[0] += shift_;
  j.hessian *= scale_;
  return j;
}

}  // namespace zyg
