#include "doctest.h"
#include "zygmund/nadic_cube.hpp"
#include "zygmund/weierstrass.hpp"

using namespace zyg;

TEST_CASE("children partition the parent") {
  const auto q = NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2);
  const auto ch = q.children();
  CHECK(ch.size() == 4);
  for (const auto& c : ch) CHECK(c.side() == 0.5);

  const auto q3 = NadicCube::root_of(Vec{0.0, 0.0, 0.0}, 1.0, 3);
  const auto ch3 = q3.children();
  CHECK(ch3.size() == 27);
  double vol = 0.0;
  for (const auto& c : ch3) vol += c.volume();
  CHECK(std::abs(vol - q3.volume()) <= 1e-15);
  for (std::size_t i = 0; i < ch3.size(); ++i)
    for (std::size_t j = i + 1; j < ch3.size(); ++j) CHECK_FALSE(ch3[i].interiors_overlap(ch3[j]));
}

TEST_CASE("addressing round trip and geometry from the root") {
  auto root = std::make_shared<const RootCube>(RootCube{Vec{0.25, -1.0}, 2.0, 3});
  const NadicCube q(root, 4, {17, 80});
  CHECK(q.address() == "4:17,80");
  const NadicCube back = NadicCube::from_address(root, q.address());
  CHECK(back == q);
  CHECK(q.side() == doctest::Approx(2.0 / 81.0).epsilon(1e-15));
  CHECK(q.corner()[0] == doctest::Approx(0.25 + 17 * 2.0 / 81.0).epsilon(1e-15));
  CHECK(q.parent()->generation() == 3);
  CHECK(q.ancestor(0).generation() == 0);
  CHECK(q.ancestor(2).contains(q));
  CHECK_FALSE(q.contains(q.ancestor(2)));
  CHECK_THROWS_AS(NadicCube::from_address(root, "4-17,80"), Error);
  CHECK_THROWS_AS(NadicCube(root, 1, {3, 0}), Error);
}

TEST_CASE("descendants are lexicographic") {
  const auto q = NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2);
  const auto ds = descendants(q, 2);
  CHECK(ds.size() == 16);
  CHECK(std::is_sorted(ds.begin(), ds.end()));
}

TEST_CASE("box quadrature") {
  const auto q = NadicCube::root_of(Vec{0.0}, 1.0, 2);
  SUBCASE("constant integrand gives the volume") {
    const CarlesonBox box(NadicCube::root_of(Vec{0.0, 0.0}, 0.5, 2), 0.25);
    const double v = box_quadrature(box, [](std::span<const double>, double) { return 1.0; }, 4);
    CHECK(v == doctest::Approx(0.25 * 0.75 * 0.5).epsilon(1e-15));
  }
  SUBCASE("integral of y") {
    const CarlesonBox box(q, 0.5);
    const double v = box_quadrature(box, [](std::span<const double>, double y) { return y; }, 2);
    CHECK(v == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  }
  SUBCASE("affine integrands are exact") {
    const CarlesonBox box(NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2), 0.5);
    const double v = box_quadrature(
        box, [](std::span<const double> x, double y) { return 1 + 2 * x[0] - x[1] + 3 * y; }, 3);
    // int over [0,1]^2 x [1/2,1] of 1 + 2x - y' + 3y = 0.5 (1 + 1 - 0.5) + 3 * 3/8
    CHECK(v == doctest::Approx(0.75 + 9.0 / 8.0).epsilon(1e-14));
  }
  SUBCASE("refinement consistency on an oscillatory integrand") {
    const CarlesonBox box(q, 0.5);
    auto f = [](std::span<const double> x, double y) {
      return std::sin(6 * x[0]) * std::exp(-y) + std::cos(4 * y);
    };
    const auto r = box_quadrature_with_estimate(box, f, 16);
    REQUIRE(r.discrepancy.has_value());
    CHECK(*r.discrepancy < 0.01 * std::abs(r.value));
  }
  SUBCASE("too few nodes") {
    CHECK_THROWS_AS(box_quadrature(CarlesonBox(q, 0.5),
                                   [](std::span<const double>, double) { return 1.0; }, 1),
                    Error);
  }
}

TEST_CASE("face average gradients") {
  SUBCASE("linear field") {
    const LinearField f(2);
    for (const auto& c : descendants(NadicCube::root_of(Vec{0.0, 0.0}, 1.0, 2), 2)) {
      const Vec g = face_average_gradient(f, c, 4);
      CHECK(g[0] == 1.0);
      CHECK(g[1] == 0.0);
      CHECK(g[2] == 0.0);
    }
  }
  SUBCASE("saddle field") {
    for (std::size_t d = 1; d <= 3; ++d) {
      const SaddleField f(d);
      const Vec g = face_average_gradient(f, NadicCube::root_of(Vec(d, 0.0), 1.0, 2), 8);
      CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-14));
      for (std::size_t i = 1; i < d; ++i) CHECK(g[i] == 0.0);
      CHECK(g[d] == doctest::Approx(-2.0).epsilon(1e-14));
    }
  }
  SUBCASE("Weierstrass refinement") {
    const WeierstrassField w(TrigPolynomial::from_real_modes(1, 0.0, {{{1}, 1.0, 0.0}}), 2.0,
                             1e-12);
    const auto root = NadicCube::root_of(Vec{0.0}, 1.0, 2);
    for (int j = 0; j <= 6; j += 2) {
      for (const auto& c : descendants(root, j)) {
        const Vec a = face_average_gradient(w, c, 8), b = face_average_gradient(w, c, 16),
                  e = face_average_gradient(w, c, 32);
        CHECK(distance(b, e) <= 0.5 * distance(a, b) + 1e-12);
        CHECK(distance(b, e) <= 1e-3 * std::max(norm(e), 1.0));
      }
    }
  }
}

TEST_CASE("Carleson boxes of children sit below the parent's") {
  const auto q = NadicCube::root_of(Vec{0.0}, 1.0, 3);
  const CarlesonBox parent(q, 1.0 / 3.0);
  for (const auto& c : q.children()) {
    const CarlesonBox child(c, 1.0 / 3.0);
    CHECK(child.y_high() <= parent.y_low() * (1 + 1e-15));
  }
}
