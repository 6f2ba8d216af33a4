#include "doctest.h"
#include "oracles.hpp"
#include "zygmund/trig_polynomial.hpp"

using namespace zyg;

namespace {

const double kPi = std::numbers::pi;

TrigPolynomial cos1(int d) { return TrigPolynomial::from_real_modes(d, 0.0, {{{1}, 1.0, 0.0}}); }

TrigPolynomial random_poly(int d, int terms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> freq(-3, 3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<RealMode> modes;
  for (int t = 0; t < terms; ++t) {
    RealMode m;
    m.k.resize(static_cast<std::size_t>(d));
    do {
      for (int& k : m.k) k = freq(rng);
    } while (std::all_of(m.k.begin(), m.k.end(), [](int k) { return k == 0; }));
    m.a = coef(rng);
    m.b = coef(rng);
    modes.push_back(m);
  }
  return TrigPolynomial::from_real_modes(d, coef(rng), modes);
}

}  // namespace

TEST_CASE("eval of a single cosine") {
  const auto phi = cos1(1);
  CHECK(phi.eval(Vec{0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(phi.eval(Vec{0.25})) < 1e-15);
  CHECK(phi.max_frequency() == 1.0);
}

TEST_CASE("eval matches termwise cosine summation") {
  for (int d = 1; d <= 3; ++d) {
    const auto phi = random_poly(d, 5, 11 + d);
    for (const auto& x : oracle::uniform_points(d, 100, 5)) {
      CHECK(std::abs(phi.eval(x) - oracle::trig_direct(phi, x)) <= 1e-13);
    }
  }
}

TEST_CASE("realness and periodicity") {
  const auto phi = random_poly(2, 6, 3);
  double l1 = phi.weighted_l1(0);
  for (const auto& x : oracle::uniform_points(2, 10000, 9)) {
    CHECK(std::abs(phi.eval_complex(x).imag()) <= 1e-12 * l1);
  }
  for (const auto& x : oracle::uniform_points(2, 1000, 10)) {
    for (std::size_t i = 0; i < 2; ++i) {
      Vec xs = x;
      xs[i] += 1.0;
      CHECK(std::abs(phi.eval(xs) - phi.eval(x)) <= 1e-12);
    }
  }
}

TEST_CASE("jet2 of cosine at the origin") {
  const auto j = cos1(1).jet2(Vec{0.0});
  CHECK(j.value == doctest::Approx(1.0));
  CHECK(std::abs(j.gradient[0]) < 1e-15);
  CHECK(j.hessian(0, 0) == doctest::Approx(-4.0 * kPi * kPi).epsilon(1e-14));
}

TEST_CASE("jet2 agrees with central differences") {
  const double h = 1e-5;
  for (int d = 1; d <= 3; ++d) {
    const auto phi = random_poly(d, 5, 21 + d);
    for (const auto& x : oracle::uniform_points(d, 50, 7)) {
      const Jet2 j = phi.jet2(x);
      double gscale = norm(j.gradient), hscale = j.hessian.frobenius();
      for (int i = 0; i < d; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (phi.eval(xp) - phi.eval(xm)) / (2 * h);
        CHECK(std::abs(fd - j.gradient[i]) <= 1e-6 * std::max(gscale, 1.0));
        const Jet2 jp = phi.jet2(xp), jm = phi.jet2(xm);
        for (int r = 0; r < d; ++r) {
          const double fdh = (jp.gradient[r] - jm.gradient[r]) / (2 * h);
          CHECK(std::abs(fdh - j.hessian(r, i)) <= 1e-6 * std::max(hscale, 1.0));
          CHECK(j.hessian(r, i) == j.hessian(i, r));
        }
      }
    }
  }
}

TEST_CASE("seminorm bounds") {
  SUBCASE("single cosine") {
    const auto s = cos1(1).seminorm_bounds(0.5);
    CHECK(s.sup_abs == doctest::Approx(1.0));
    CHECK(s.sup_grad == doctest::Approx(2 * kPi));
  }
  SUBCASE("zero polynomial") {
    const auto s = TrigPolynomial::zero(2).seminorm_bounds(0.5);
    CHECK(s.sup_abs == 0.0);
    CHECK(s.sup_grad == 0.0);
    CHECK(s.sup_hess == 0.0);
    CHECK(s.hess_holder_alpha == 0.0);
  }
  SUBCASE("alpha outside (0,1)") {
    CHECK_THROWS_AS(cos1(1).seminorm_bounds(0.0), Error);
    CHECK_THROWS_AS(cos1(1).seminorm_bounds(1.0), Error);
  }
  SUBCASE("grid sampling never exceeds the bounds") {
    const auto phi = random_poly(2, 5, 41);
    const double alpha = 0.4;
    const auto s = phi.seminorm_bounds(alpha);
    const auto pts = oracle::uniform_points(2, 10000, 13);
    double sa = 0, sg = 0, sh = 0, holder = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Jet2 j = phi.jet2(pts[i]);
      sa = std::max(sa, std::abs(j.value));
      sg = std::max(sg, norm(j.gradient));
      sh = std::max(sh, j.hessian.frobenius());
      const Jet2 k = phi.jet2(pts[(i + 1) % pts.size()]);
      double acc = 0;
      for (std::size_t e = 0; e < 4; ++e) acc += std::abs(j.hessian.data()[e] - k.hessian.data()[e]);
      holder = std::max(holder, acc / std::pow(distance(pts[i], pts[(i + 1) % pts.size()]), alpha));
    }
    CHECK(sa <= s.sup_abs);
    CHECK(sg <= s.sup_grad);
    CHECK(sh <= s.sup_hess);
    CHECK(holder <= s.hess_holder_alpha);
  }
}

TEST_CASE("json loading symmetrizes and rejects unknown keys") {
  std::vector<std::string> warnings;
  const nlohmann::json sym = {{"d", 1},
                              {"terms", {{{"k", {1}}, {"re", 0.5}, {"im", 0.0}},
                                         {{"k", {-1}}, {"re", 0.5}, {"im", 0.0}}}}};
  const auto phi = TrigPolynomial::from_json(sym, &warnings);
  CHECK(warnings.empty());
  CHECK(phi.eval(Vec{0.0}) == doctest::Approx(1.0));

  const nlohmann::json half = {{"d", 1}, {"terms", {{{"k", {1}}, {"re", 1.0}, {"im", 0.0}}}}};
  const auto phi2 = TrigPolynomial::from_json(half, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(std::abs(phi2.eval_complex(Vec{0.3}).imag()) < 1e-15);

  nlohmann::json bad = sym;
  bad["extra"] = 1;
  CHECK_THROWS_AS(TrigPolynomial::from_json(bad, &warnings), Error);
  nlohmann::json wrong_len = {{"d", 2}, {"terms", {{{"k", {1}}, {"re", 1.0}, {"im", 0.0}}}}};
  CHECK_THROWS_AS(TrigPolynomial::from_json(wrong_len, &warnings), Error);

  const auto round = TrigPolynomial::from_json(phi.to_json(), &warnings);
  CHECK(round.eval(Vec{0.17}) == doctest::Approx(phi.eval(Vec{0.17})).epsilon(1e-15));
}

TEST_CASE("condition H verdicts") {
  SUBCASE("sum of cosines holds via extremum in every direction") {
    const auto phi = TrigPolynomial::cosine_sum(2);
    const auto dirs = condition_h_directions(2, 16, 1);
    for (const auto& r : check_condition_h(phi, dirs, 0.5, 1e-3))
      CHECK(r.verdict == ConditionHVerdict::holds_via_extremum);
  }
  SUBCASE("sine holds via derivative") {
    const auto phi = TrigPolynomial::from_real_modes(1, 0.0, {{{1}, 0.0, 1.0}});
    const auto r = check_condition_h(phi, {Vec{1.0}}, 0.5, 1e-3);
    CHECK(r[0].verdict == ConditionHVerdict::holds_via_derivative);
    CHECK(r[0].directional_derivative == doctest::Approx(2 * kPi));
  }
  SUBCASE("constant fails") {
    const auto phi = TrigPolynomial::from_real_modes(1, 3.0, {});
    const auto r = check_condition_h(phi, {Vec{1.0}}, 0.5, 1e-3);
    CHECK(r[0].verdict == ConditionHVerdict::fails);
  }
  SUBCASE("constant profile along e_2 fails") {
    const auto phi = TrigPolynomial::from_real_modes(2, 0.0, {{{1, 0}, 1.0, 0.0}});
    const auto r = check_condition_h(phi, {Vec{0.0, 1.0}}, 0.5, 1e-3);
    CHECK(r[0].verdict == ConditionHVerdict::fails);
  }
  SUBCASE("bad arguments") {
    const auto phi = cos1(1);
    CHECK_THROWS_AS(check_condition_h(phi, {Vec{1.0}}, 0.0, 1e-3), Error);
    CHECK_THROWS_AS(check_condition_h(phi, {Vec{1.0}}, 0.5, -1.0), Error);
    CHECK_THROWS_AS(check_condition_h(phi, {Vec{0.5}}, 0.5, 1e-3), Error);
    CHECK_THROWS_AS(check_condition_h(phi, {}, 0.5, 1e-3), Error);
  }
}

TEST_CASE("reduced phase keeps precision for large arguments") {
  const std::vector<int> k{3};
  const double x = 1e6 + 0.125;
  const double ph = reduced_phase(k, Vec{x});
  CHECK(std::abs(std::cos(ph) - std::cos(2 * kPi * 0.375)) < 1e-9);
}
