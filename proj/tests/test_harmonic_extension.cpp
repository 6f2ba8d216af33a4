#include "doctest.h"
#include "oracles.hpp"
#include "zygmund/weierstrass.hpp"

using namespace zyg;

namespace {

const double kPi = std::numbers::pi;

TrigPolynomial cos1() { return TrigPolynomial::from_real_modes(1, 0.0, {{{1}, 1.0, 0.0}}); }

TrigPolynomial three_modes() {
  return TrigPolynomial::from_real_modes(1, 0.2, {{{1}, 1.0, 0.3}, {{2}, -0.5, 0.0}, {{5}, 0.1, 0.4}});
}

std::vector<HalfSpacePoint> half_space_points(std::size_t d, std::size_t n, std::uint64_t seed,
                                              double y_lo = 0.01, double y_hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<HalfSpacePoint> pts(n);
  for (auto& p : pts) {
    p.x.resize(d);
    for (double& v : p.x) v = u(rng);
    p.y = y_lo + (y_hi - y_lo) * u(rng);
  }
  return pts;
}

}  // namespace

TEST_CASE("single-mode Poisson extension") {
  const auto phi = cos1();
  for (const auto& p : half_space_points(1, 100, 1, 0.01, 2.0)) {
    const HarmonicJet j = phi_extension_jet(phi, p.x, p.y);
    const double expect = std::exp(-2 * kPi * p.y) * std::cos(2 * kPi * p.x[0]);
    CHECK(std::abs(j.value - expect) <= 1e-13);
  }
  const HarmonicJet far = phi_extension_jet(phi, Vec{0.0}, 10.0);
  CHECK(far.value == doctest::Approx(std::exp(-20 * kPi)).epsilon(1e-12));
  CHECK_THROWS_AS(phi_extension_jet(phi, Vec{0.0}, 0.0), Error);
}

TEST_CASE("Poisson extension matches kernel quadrature") {
  const auto phi = three_modes();
  const HarmonicJet j = phi_extension_jet(phi, Vec{0.3}, 0.5);
  const double ref = oracle::poisson_kernel_1d(phi, 0.3, 0.5);
  CHECK(std::abs(j.value - ref) <= 1e-6 * std::abs(ref));
}

TEST_CASE("decay of the extension for y >= 1") {
  const auto phi = three_modes();
  double l1 = 0.0;
  for (const auto& t : phi.terms())
    if (std::any_of(t.k.begin(), t.k.end(), [](int k) { return k != 0; })) l1 += std::abs(t.c);
  for (const auto& p : half_space_points(1, 200, 2, 1.0, 3.0)) {
    const double v = phi_extension_jet(phi, p.x, p.y).value;
    CHECK(std::abs(v - phi.constant()) <= l1 * std::exp(-2 * kPi * p.y) + 1e-15);
  }
}

TEST_CASE("Weierstrass boundary values") {
  const WeierstrassField w(cos1(), 2.0, 1e-12);
  CHECK(w.eval(Vec{0.0}) == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(std::abs(w.eval(Vec{0.5})) <= 2e-12);
  for (const auto& x : oracle::uniform_points(1, 1000, 4)) {
    CHECK(std::abs(w.eval(Vec{x[0] + 1.0}) - w.eval(x)) <= 2e-12);
  }
}

TEST_CASE("field jet against 500-term summation") {
  const WeierstrassField w(cos1(), 2.0, 1e-12);
  const HarmonicJet j = w.jet(Vec{0.37}, 0.05);
  const auto o = oracle::weierstrass_cos_long_sum(2.0, 0.37, 0.05, 500);
  CHECK(j.value == doctest::Approx(o.value).epsilon(1e-10));
  CHECK(j.gradient[0] == doctest::Approx(o.fx).epsilon(1e-10));
  CHECK(j.gradient[1] == doctest::Approx(o.fy).epsilon(1e-10));
  CHECK(j.hessian(0, 0) == doctest::Approx(o.fxx).epsilon(1e-10));
  CHECK(j.hessian(0, 1) == doctest::Approx(o.fxy).epsilon(1e-10));
  CHECK(j.hessian(1, 1) == doctest::Approx(o.fyy).epsilon(1e-10));
}

TEST_CASE("harmonicity and symmetry of the Hessian") {
  for (int d = 1; d <= 3; ++d) {
    const WeierstrassField w(TrigPolynomial::cosine_sum(d), 3.0, 1e-12);
    for (const auto& p : half_space_points(d, 300, 5 + d)) {
      const HarmonicJet j = w.jet(p.x, p.y);
      CHECK(std::abs(j.hessian.trace()) <= 1e-9 * (1 + j.hessian.frobenius()));
      for (int a = 0; a <= d; ++a)
        for (int b = 0; b < a; ++b)
          CHECK(std::abs(j.hessian(a, b) - j.hessian(b, a)) <= 1e-12 * j.hessian.frobenius());
    }
  }
}

TEST_CASE("jets agree with central differences") {
  const WeierstrassField w(TrigPolynomial::cosine_sum(2), 2.0, 1e-13);
  for (const auto& p : half_space_points(2, 50, 17)) {
    const HarmonicJet j = w.jet(p.x, p.y);
    const auto fd = oracle::central_differences(w, p.x, p.y, 1e-4 * p.y);
    const double gs = norm(j.gradient), hs = j.hessian.frobenius();
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(fd.gradient[a] - j.gradient[a]) <= 1e-4 * gs);
      for (int b = 0; b < 3; ++b) CHECK(std::abs(fd.hessian(a, b) - j.hessian(a, b)) <= 1e-4 * hs);
    }
  }
}

TEST_CASE("functional equations") {
  SUBCASE("b = 3, d = 2") {
    const WeierstrassField w(TrigPolynomial::cosine_sum(2), 3.0, 1e-12);
    const auto r = check_functional_equations(w, half_space_points(2, 1000, 8));
    CHECK(r.samples == 1000);
    CHECK(r.value <= 1e-9);
    CHECK(r.gradient <= 1e-9);
    CHECK(r.hessian <= 1e-9);
  }
  SUBCASE("zero field") {
    const WeierstrassField w(TrigPolynomial::zero(1), 2.0, 1e-12);
    const auto r = check_functional_equations(w, half_space_points(1, 50, 9));
    CHECK(r.value == 0.0);
    CHECK(r.gradient == 0.0);
    CHECK(r.hessian == 0.0);
  }
}

TEST_CASE("truncation monotonicity") {
  const WeierstrassField coarse(cos1(), 2.0, 1e-8), fine(cos1(), 2.0, 5e-9);
  for (const auto& p : half_space_points(1, 200, 10)) {
    CHECK(std::abs(coarse.jet(p.x, p.y).value - fine.jet(p.x, p.y).value) <= 1e-8 + 5e-9);
    CHECK(std::abs(coarse.eval(p.x) - fine.eval(p.x)) <= 1e-8 + 5e-9);
  }
}

TEST_CASE("heights below the floor are rejected") {
  const WeierstrassField w(cos1(), 2.0, 1e-12);
  CHECK_THROWS_AS(w.jet(Vec{0.1}, 1e-13), Error);
  CHECK_THROWS_AS(w.jet(Vec{0.1}, -1.0), Error);
  CHECK_THROWS_AS(WeierstrassField(cos1(), 1.0, 1e-12), Error);
  CHECK_THROWS_AS(WeierstrassField(cos1(), 2.0, 0.0), Error);
}

TEST_CASE("representation identity") {
  const WeierstrassField w(cos1(), 2.0, 1e-12);
  SUBCASE("vertical direction") {
    const auto r = check_representation_identity(w, Vec{0.3}, 0.5, Vec{0.0, 1.0});
    CHECK(r.residual <= 1e-6);
  }
  SUBCASE("tilted direction") {
    const double s = 1.0 / std::sqrt(2.0);
    const auto r = check_representation_identity(w, Vec{0.3}, 0.5, Vec{s, s});
    CHECK(r.residual <= 1e-5);
  }
  SUBCASE("zero field") {
    const WeierstrassField z(TrigPolynomial::zero(1), 2.0, 1e-12);
    CHECK(check_representation_identity(z, Vec{0.3}, 0.5, Vec{0.0, 1.0}).residual == 0.0);
  }
  SUBCASE("tangential direction rejected") {
    CHECK_THROWS_AS(check_representation_identity(w, Vec{0.3}, 0.5, Vec{1.0, 0.0}), Error);
  }
}

TEST_CASE("second differences stay bounded across dyadic refinements") {
  // Observed sup of |f(x+h) + f(x-h) - 2f(x)| / |h| at |h| = 2^-j for j in
  // successive blocks; the sup must not grow with refinement.
  const WeierstrassField w(cos1(), 2.0, 1e-13);
  const auto xs = oracle::uniform_points(1, 2000, 12);
  auto block_sup = [&](int j0) {
    double s = 0.0;
    for (int j = j0; j < j0 + 4; ++j) {
      const double h = std::ldexp(1.0, -j);
      for (const auto& x : xs) {
        const double q =
            std::abs(w.eval(Vec{x[0] + h}) + w.eval(Vec{x[0] - h}) - 2 * w.eval(x)) / h;
        s = std::max(s, q);
      }
    }
    return s;
  };
  const double base = block_sup(2);
  for (int j0 : {6, 10, 14}) CHECK(block_sup(j0) <= 1.2 * base);
}
