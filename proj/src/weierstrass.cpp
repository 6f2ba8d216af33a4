#include "zygmund/weierstrass.hpp"

#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace zyg {

namespace {

constexpr int kMaxTerms = 20000;
constexpr double kExpCutoff = 700.0;

// Adds weight-scaled mode contributions of Phi at (x, y) to jet:
// value * wv, gradient * wg, Hessian * wh.
void accumulate_extension(HarmonicJet& jet, const TrigPolynomial& phi,
                          std::span<const double> x, double y, double wv, double wg,
                          double wh) {
  const std::size_t d = jet.dimension();
  jet.value += wv * phi.constant();
  for (const auto& m : phi.modes()) {
    const double w = kTwoPi * m.freq;
    if (w * y > kExpCutoff) continue;
    const double decay = std::exp(-w * y);
    const double th = reduced_phase(m.k, x);
    const double c = std::cos(th), s = std::sin(th);
    const double even = decay * (m.a * c + m.b * s);
    const double odd = decay * (-m.a * s + m.b * c);

    jet.value += wv * even;
    for (std::size_t i = 0; i < d; ++i) jet.gradient[i] += wg * kTwoPi * m.k[i] * odd;
    jet.gradient[d] -= wg * w * even;

    for (std::size_t i = 0; i < d; ++i) {
      const double ki = kTwoPi * m.k[i];
      for (std::size_t l = i; l < d; ++l) {
        const double v = -wh * ki * kTwoPi * m.k[l] * even;
        jet.hessian(i, l) += v;
        if (l != i) jet.hessian(l, i) += v;
      }
      const double vy = -wh * w * ki * odd;
      jet.hessian(i, d) += vy;
      jet.hessian(d, i) += vy;
    }
    jet.hessian(d, d) += wh * w * w * even;
  }
}

// sum over pairs |c_k| w^order e^{-w u}
double decayed_l1(const TrigPolynomial& phi, int order, double u) {
  double s = 0.0;
  for (const auto& m : phi.modes()) {
    const double w = kTwoPi * m.freq;
    if (w * u > kExpCutoff) continue;
    s += m.abs_pair * std::pow(w, order) * std::exp(-w * u);
  }
  return s;
}

double rel_residual(double diff, double scale) {
  if (scale == 0.0) return std::abs(diff);
  return std::abs(diff) / scale;
}

}  // namespace

HarmonicJet phi_extension_jet(const TrigPolynomial& phi, std::span<const double> x, double y) {
  require_height(y);
  require(x.size() == static_cast<std::size_t>(phi.dimension()), "point dimension mismatch");
  HarmonicJet j(x.size());
  accumulate_extension(j, phi, x, y, 1.0, 1.0, 1.0);
  return j;
}

WeierstrassField::WeierstrassField(TrigPolynomial phi, double b, double tail_tol)
    : phi_(std::move(phi)), b_(b), tail_tol_(tail_tol) {
  require(phi_.dimension() >= 1, "Weierstrass base function needs a dimension");
  require(b_ > 1.0 && std::isfinite(b_), "Weierstrass scale b must be > 1");
  require(tail_tol_ > 0.0 && std::isfinite(tail_tol_), "tail_tol must be positive");
  const double s = phi_.weighted_l1(0);
  if (s > 0.0) {
    const double need = std::log(s / (tail_tol_ * (b_ - 1.0))) / std::log(b_);
    boundary_terms_ = std::max(0, static_cast<int>(std::ceil(need))) + 1;
    if (boundary_terms_ > kMaxTerms) fail_argument("b too close to 1 for the requested tail_tol");
  } else {
    boundary_terms_ = 1;
  }
}

double WeierstrassField::eval(std::span<const double> x) const {
  require(x.size() == dimension(), "point dimension mismatch");
  Vec xs(x.begin(), x.end());
  double bn = 1.0;
  double sum = 0.0;
  for (int n = 0; n < boundary_terms_; ++n) {
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = bn * x[i];
    sum += phi_.eval(xs) / bn;
    bn *= b_;
  }
  return sum;
}

bool WeierstrassField::tails_certified(int n, double y) const {
  // Tail = terms n+1, n+2, ...
  const double bn = std::pow(b_, n);
  const double u_next = bn * b_ * y;
  const double c0 = std::abs(phi_.constant());
  if (phi_.modes().empty()) return c0 / (bn * (b_ - 1.0)) <= tail_tol_;

  const double w_min = kTwoPi * phi_.min_frequency();
  const double value_tail = (c0 + decayed_l1(phi_, 0, u_next)) / (bn * (b_ - 1.0));
  if (value_tail > tail_tol_) return false;

  if (w_min * (b_ - 1.0) * u_next < std::log(2.0)) return false;
  if (2.0 * decayed_l1(phi_, 1, u_next) > tail_tol_) return false;

  if (w_min * (b_ - 1.0) * u_next < std::log(2.0 * b_)) return false;
  const double hess_next = std::sqrt(2.0) * bn * b_ * decayed_l1(phi_, 2, u_next);
  return 2.0 * hess_next <= tail_tol_;
}

int WeierstrassField::terms_for_height(double y) const {
  require_height(y);
  for (int n = 0; n < kMaxTerms; ++n)
    if (tails_certified(n, y)) return n + 1;
  throw Error(ErrorKind::numeric, "Weierstrass jet series did not reach tail_tol");
}

HarmonicJet WeierstrassField::jet(std::span<const double> x, double y) const {
  require(x.size() == dimension(), "point dimension mismatch");
  return weierstrass_jet_fixed_terms(*this, x, y, terms_for_height(y));
}

HarmonicJet weierstrass_jet_fixed_terms(const WeierstrassField& w, std::span<const double> x,
                                        double y, int terms) {
  require_height(y);
  const std::size_t d = w.dimension();
  HarmonicJet j(d);
  Vec xs(d);
  double bn = 1.0;
  for (int n = 0; n < terms; ++n) {
    for (std::size_t i = 0; i < d; ++i) xs[i] = bn * x[i];
    accumulate_extension(j, w.base(), xs, bn * y, 1.0 / bn, 1.0, bn);
    bn *= w.b();
  }
  return j;
}

FunctionalEquationResiduals check_functional_equations(const WeierstrassField& w,
                                                       const std::vector<HalfSpacePoint>& samples,
                                                       int threads) {
  const double b = w.b();
  std::vector<FunctionalEquationResiduals> per(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t idx) {
    const auto& p = samples[idx];
    Vec bx(p.x);
    for (double& v : bx) v *= b;
    const HarmonicJet f0 = w.jet(p.x, p.y);
    const HarmonicJet f1 = w.jet(bx, b * p.y);
    const HarmonicJet ph = phi_extension_jet(w.base(), p.x, p.y);
    auto& r = per[idx];

    const double lhs_v = f1.value;
    const double rhs_v = b * f0.value - b * ph.value;
    r.value = rel_residual(lhs_v - rhs_v,
                           std::max({std::abs(lhs_v), std::abs(b * f0.value), std::abs(b * ph.value)}));

    Vec dg(f1.gradient.size());
    for (std::size_t i = 0; i < dg.size(); ++i) dg[i] = f1.gradient[i] - (f0.gradient[i] - ph.gradient[i]);
    r.gradient = rel_residual(norm(dg), std::max({norm(f1.gradient), norm(f0.gradient), norm(ph.gradient)}));

    const std::size_t n = f1.hessian.size();
    SquareMatrix diff(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        diff(i, l) = b * f1.hessian(i, l) - (f0.hessian(i, l) - ph.hessian(i, l));
    r.hessian = rel_residual(diff.frobenius(), std::max({b * f1.hessian.frobenius(),
                                                         f0.hessian.frobenius(),
                                                         ph.hessian.frobenius()}));
  });
  FunctionalEquationResiduals out;
  out.samples = samples.size();
  for (const auto& r : per) {
    out.value = std::max(out.value, r.value);
    out.gradient = std::max(out.gradient, r.gradient);
    out.hessian = std::max(out.hessian, r.hessian);
  }
  return out;
}

RepresentationCheck check_representation_identity(const WeierstrassField& w,
                                                  std::span<const double> x, double y,
                                                  std::span<const double> e,
                                                  const RepresentationOptions& opts) {
  const std::size_t d = w.dimension();
  require(x.size() == d, "point dimension mismatch");
  require(e.size() == d + 1, "direction must live in R^{d+1}");
  require(std::abs(norm(e) - 1.0) <= 1e-12, "direction must be a unit vector");
  require(e[d] > 0.0, "direction must have positive last coordinate");
  require(y > 0.0 && y <= 1.0, "line parameter y must lie in (0, 1]");
  require(opts.panel_ratio > 1.0 && opts.t0_fraction > 0.0 && opts.t0_fraction < 1.0,
          "invalid quadrature options");

  auto point_on_line = [&](double t) {
    Vec p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = x[i] + t * e[i];
    return p;
  };
  auto integrand = [&](double t) {
    const Vec p = point_on_line(t);
    const HarmonicJet j = w.jet(p, t * e[d]);
    const Vec he = j.hessian.apply(e);
    return t * dot(e, he);
  };

  RepresentationCheck out;
  out.t0 = opts.t0_fraction * y;
  out.boundary = w.eval(x);

  double hi = y;
  while (hi > out.t0) {
    const double lo = std::max(out.t0, hi / opts.panel_ratio);
    double err = 0.0;
    out.integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, lo, hi, opts.max_depth, opts.panel_tol, &err);
    out.quadrature_error += err;
    ++out.panels;
    hi = lo;
  }

  // Sampled sup of |t e^T HF e| bounds the integrand on [0, t0].
  double c_est = 0.0;
  const int probes = 64;
  for (int i = 0; i <= probes; ++i) {
    const double t = y * std::pow(opts.t0_fraction, static_cast<double>(i) / probes);
    c_est = std::max(c_est, std::abs(integrand(t)));
  }
  out.remainder_bound = c_est * out.t0;

  const Vec top = point_on_line(y);
  const HarmonicJet jt = w.jet(top, y * e[d]);
  out.rhs = out.integral - y * dot(jt.gradient, e) + jt.value;
  out.residual = std::abs(out.boundary - out.rhs);
  return out;
}

}  // namespace zyg
