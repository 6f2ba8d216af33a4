#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "zygmund/qr_analysis.hpp"
#include "zygmund/sampling.hpp"
#include "zygmund/weierstrass.hpp"

using namespace zyg;

namespace {

const double kPi = std::numbers::pi;

std::shared_ptr<const WeierstrassField> classical() {
  return std::make_shared<const WeierstrassField>(
      TrigPolynomial::from_real_modes(1, 0.0, {{{1}, 1.0, 0.0}}), 2.0, 1e-12);
}

}  // namespace

TEST_CASE("Jacobi eigenvalues") {
  SUBCASE("tridiagonal with known spectrum") {
    SquareMatrix a(3);
    for (int i = 0; i < 3; ++i) a(i, i) = 2.0;
    a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = 1.0;
    const auto e = jacobi_eigen(a);
    CHECK(e.values[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-13));
    CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(e.values[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-13));
  }
  SUBCASE("random symmetric matrices satisfy A v = lambda v") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n = 2; n <= 4; ++n) {
      SquareMatrix a(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
      const auto e = jacobi_eigen(a);
      CHECK(std::is_sorted(e.values.begin(), e.values.end()));
      double tr = 0;
      for (double v : e.values) tr += v;
      CHECK(tr == doctest::Approx(a.trace()).epsilon(1e-12));
      for (int j = 0; j < n; ++j) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = e.vectors(i, j);
        const Vec av = a.apply(v);
        for (int i = 0; i < n; ++i) CHECK(std::abs(av[i] - e.values[j] * v[i]) <= 1e-10);
      }
    }
  }
  SUBCASE("asymmetric input is rejected") {
    SquareMatrix a(2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(jacobi_eigen(a), Error);
  }
}

TEST_CASE("d = 1 fields are conformal") {
  const auto w = classical();
  for (const auto& r : weak_qr_sweep(*w, NadicCube::root_of(Vec{0.0}, 1.0, 2), 4, 2, 16)) {
    CHECK_FALSE(r.flagged);
    CHECK(std::abs(r.gamma_sq - 1.0) <= 0.02);
    CHECK(r.numerator >= r.gram_max_eig * (1 - 1e-12));
    CHECK(r.gram_max_eig >= r.denominator);
  }
  // |(HF)e| does not depend on e for a traceless symmetric 2x2 matrix.
  const auto dirs = sphere_directions(2, 32, 3);
  for (const auto& x : oracle::uniform_points(1, 50, 6)) {
    const HarmonicJet j = w->jet(x, 0.05 + 0.5 * x[0]);
    const double ref = norm(j.hessian.apply(dirs[0]));
    for (const auto& e : dirs) CHECK(std::abs(norm(j.hessian.apply(e)) - ref) <= 1e-10 * ref);
  }
}

TEST_CASE("annihilated direction is flagged") {
  const SaddleField f(2);
  for (const auto& r : weak_qr_sweep(f, NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2), 2, 2, 4)) {
    CHECK(r.flagged);
    CHECK(std::isinf(r.gamma_sq));
  }
  const auto scan = hessian_lower_scan(f, NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2), 0.5,
                                       {Vec{1, 0, 0}, Vec{0, 1, 0}}, 4);
  CHECK(scan.value == 0.0);
  CHECK(scan.direction == 1);
}

TEST_CASE("ratio is scale invariant") {
  auto w = std::make_shared<const WeierstrassField>(TrigPolynomial::cosine_sum(2), 2.0, 1e-12);
  const AffineModifiedField scaled(w, -3.5, 0.0);
  const auto q = NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2).children()[2];
  const auto a = weak_qr_ratio(*w, q, 2, 6), b = weak_qr_ratio(scaled, q, 2, 6);
  CHECK(a.gamma_sq >= 1.0 - 1e-9);
  CHECK(std::abs(a.gamma_sq - b.gamma_sq) <= 1e-12 * a.gamma_sq);
  CHECK(a.denominator >= -1e-12 * a.gram.trace());
}

TEST_CASE("d = 2 sweep stays finite and stable across generations") {
  const WeierstrassField w(TrigPolynomial::cosine_sum(2), 2.0, 1e-12);
  // The guarantee holds for 1/N <= delta/4 with delta = 1/(4b); at N = 2 the max keeps growing.
  const int N = 16 * 2;
  const auto reps = weak_qr_sweep(w, NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2), 4, N, 8, 0);
  std::vector<double> per_gen(5, 0.0);
  for (const auto& r : reps) {
    REQUIRE_FALSE(r.flagged);
    CHECK(r.gamma_sq >= 1.0 - 1e-9);
    const int g = std::stoi(r.address.substr(0, r.address.find(':')));
    per_gen[g] = std::max(per_gen[g], r.gamma_sq);
  }
  const double hi = *std::max_element(per_gen.begin() + 1, per_gen.end());
  const double lo = *std::min_element(per_gen.begin() + 1, per_gen.end());
  CHECK(hi <= 2.0 * lo);
}

TEST_CASE("Hessian lower scan") {
  const auto w = classical();
  const auto root = NadicCube::root_of(Vec{0.0}, 1.0, 2);
  const double delta = 1.0 / 8.0;
  SUBCASE("bounded away from zero on random dyadic cubes") {
    std::mt19937_64 rng(11);
    const auto dirs = sphere_directions(2, 16, 1);
    double lo = INFINITY, hi = 0.0;
    for (int t = 0; t < 20; ++t) {
      const int g = 1 + static_cast<int>(rng() % 8);
      const std::int64_t idx = static_cast<std::int64_t>(rng() % (1u << g));
      const NadicCube q(root.root_ptr(), g, {idx});
      const double v = hessian_lower_scan(*w, q, delta, dirs, 8).value;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo > 0.0);
    CHECK(hi <= 4.0 * lo);
  }
  SUBCASE("more directions never raise the minimum") {
    const auto small = hessian_lower_scan(*w, root, delta, sphere_directions(2, 8, 2), 6);
    const auto big = hessian_lower_scan(*w, root, delta, sphere_directions(2, 16, 2), 6);
    CHECK(big.value <= small.value);
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(hessian_lower_scan(*w, root, 1.0, {Vec{1, 0}}, 4), Error);
    CHECK_THROWS_AS(hessian_lower_scan(*w, root, 0.5, {}, 4), Error);
    CHECK_THROWS_AS(hessian_lower_scan(*w, root, 0.5, {Vec{1, 1}}, 4), Error);
  }
}

TEST_CASE("Bloch seminorm") {
  const SampleRegion region{Vec{0.0}, 1.0, 1e-3, 1.0};
  SUBCASE("linear field") {
    CHECK(bloch_seminorm(LinearField(1), region, 256, 1).value == 0.0);
  }
  SUBCASE("single mode attains 2 pi / e") {
    const PhiExtensionField f(TrigPolynomial::from_real_modes(1, 0.0, {{{1}, 1.0, 0.0}}));
    const auto est = bloch_seminorm(f, region, 4096, 1);
    const double exact = 2 * kPi / std::exp(1.0);
    CHECK(est.value <= exact * (1 + 1e-12));
    CHECK(est.value >= 0.98 * exact);
  }
  SUBCASE("Weierstrass estimate saturates") {
    const auto w = classical();
    const SampleRegion r{Vec{0.0}, 1.0, 1e-4, 1.0};
    const auto a = bloch_seminorm(*w, r, 2048, 3), b = bloch_seminorm(*w, r, 8192, 3);
    CHECK(b.value >= a.value);
    CHECK(b.value <= 1.1 * a.value);
  }
  CHECK(bloch_operator_factor(2) == 3.0);
}

TEST_CASE("Zygmund seminorm") {
  const SampleRegion region{Vec{0.0}, 1.0, 1e-4, 0.5};
  SUBCASE("affine") {
    const auto est = zygmund_seminorm([](std::span<const double> x) { return 3 * x[0] - 1; }, 1,
                                      region, 500, 1);
    // Roundoff only: a few ulps of |f| <= 3 divided by h_min.
    CHECK(est.value <= 64 * std::numeric_limits<double>::epsilon() * 3 / region.lo);
  }
  SUBCASE("quadratic gives 2 h_max") {
    const auto est =
        zygmund_seminorm([](std::span<const double> x) { return x[0] * x[0]; }, 1, region, 500, 1);
    CHECK(est.value == doctest::Approx(2 * 0.5).epsilon(1e-9));
  }
  SUBCASE("Weierstrass agrees with the Bloch estimate up to a recorded constant") {
    const auto w = classical();
    const auto z = zygmund_seminorm([&](std::span<const double> x) { return w->eval(x); }, 1,
                                    SampleRegion{Vec{0.0}, 1.0, 1e-6, 1.0}, 100000, 2);
    const auto b = bloch_seminorm(*w, SampleRegion{Vec{0.0}, 1.0, 1e-4, 1.0}, 4096, 2);
    const double c = std::max(z.value / b.value, b.value / z.value);
    MESSAGE("Zygmund " << z.value << " Bloch " << b.value << " constant " << c);
    CHECK(z.value > 0.0);
    CHECK(c < 10.0);
  }
}
