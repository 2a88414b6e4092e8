#include "doctest.h"
#include "generators.hpp"

#include "ddforms/series.hpp"

using namespace ddforms;
using ddforms::testing::Gen;

namespace {

TriSeries mono(std::int64_t num_n, std::int64_t den_n, std::int64_t num_l, std::int64_t den_l, Rational c = 1,
               Window w = Window::unbounded()) {
  return TriSeries::monomial(c, make_rational(num_n, den_n), make_rational(num_l, den_l), Rational(0), w);
}

Window q_window(std::int64_t n) { return Window::box(std::nullopt, Rational(n)); }

}  // namespace

TEST_SUITE("series_core") {
  TEST_CASE("telescoping product truncates to 1 at order 3") {
    auto w = q_window(3);
    TriSeries a = TriSeries::one(w) - mono(1, 1, 0, 1, 1, w);
    TriSeries b = TriSeries::one(w) + mono(1, 1, 0, 1) + mono(2, 1, 0, 1) + mono(3, 1, 0, 1);
    TriSeries p = series_mul(a, b);
    CHECK(TriSeries::equal_within(p, TriSeries::one(w)));
    CHECK(p.size() == 1);
    // without truncation the q^4 term survives
    TriSeries b_full = TriSeries::one() + mono(1, 1, 0, 1) + mono(2, 1, 0, 1) + mono(3, 1, 0, 1);
    TriSeries full = series_mul(TriSeries::one() - mono(1, 1, 0, 1), b_full);
    CHECK(full.coeff(4, 0, 0) == -1);
    CHECK(full.size() == 2);
  }

  TEST_CASE("binomial square in r") {
    TriSeries x = mono(0, 1, 1, 2) + mono(0, 1, -1, 2);
    TriSeries sq = series_mul(x, x);
    CHECK(sq.coeff(0, 1, 0) == 1);
    CHECK(sq.coeff(0, 0, 0) == 2);
    CHECK(sq.coeff(0, -1, 0) == 1);
    CHECK(sq.size() == 3);
  }

  TEST_CASE("binomial series with rational exponent") {
    auto w = q_window(4);
    TriSeries u = TriSeries::one(w) + mono(1, 1, 0, 1);
    TriSeries h = series_pow_rational(u, make_rational(1, 2));
    CHECK(h.coeff(0, 0, 0) == 1);
    CHECK(h.coeff(1, 0, 0) == make_rational(1, 2));
    CHECK(h.coeff(2, 0, 0) == make_rational(-1, 8));
    CHECK(h.coeff(3, 0, 0) == make_rational(1, 16));
    CHECK(h.coeff(4, 0, 0) == make_rational(-5, 128));
    TriSeries g = series_pow_rational(TriSeries::one(w) - mono(1, 1, 0, 1), Rational(-1));
    for (int n = 0; n <= 4; ++n) CHECK(g.coeff(n, 0, 0) == 1);
  }

  TEST_CASE("square root of a perfect square") {
    Window w = Window::box(Rational(4), Rational(4));
    TriSeries x = TriSeries::monomial(Rational(1), Rational(1), Rational(1), Rational(1), w);
    TriSeries base = TriSeries::one(w) - x;
    TriSeries sq = base.pow_int(2);
    TriSeries root = series_pow_rational(sq, make_rational(1, 2));
    CHECK(TriSeries::equal_within(root, base));
  }

  TEST_CASE("non-unit constant term is rejected") {
    auto w = q_window(3);
    TriSeries u = TriSeries::one(w).scaled(Rational(2)) + mono(1, 1, 0, 1);
    CHECK_THROWS_AS(series_pow_rational(u, make_rational(1, 2)), MathError);
  }

  TEST_CASE("division by itself and by zero") {
    auto w = q_window(5);
    TriSeries a = TriSeries::one(w) + mono(1, 1, 1, 1, 3) - mono(2, 1, -1, 1, make_rational(1, 2));
    CHECK(TriSeries::equal_within(series_div(a, a), TriSeries::one(w)));
    CHECK_THROWS_AS(series_div(a, TriSeries(Dens{}, w)), MathError);
  }

  TEST_CASE("inexact row division is reported") {
    TriSeries a = mono(0, 1, 0, 1);
    TriSeries b = mono(0, 1, 1, 1) + mono(0, 1, 0, 1, 2);
    CHECK_THROWS_AS(series_div(a, b), MathError);
  }

  TEST_CASE("rescale") {
    TriSeries a = mono(0, 1, 1, 1) + mono(1, 1, 0, 1);
    TriSeries r = series_rescale(a, 2, 1, 1);
    CHECK(r.coeff(0, 1, 0) == 1);
    CHECK(r.coeff(2, 0, 0) == 1);
    CHECK(r.coeff(1, 0, 0) == 0);
    CHECK(TriSeries::equal_within(series_rescale(a, 1, 1, 1), a));
    TriSeries h = TriSeries::monomial(Rational(1), make_rational(1, 2), make_rational(1, 2), make_rational(1, 2));
    TriSeries d = series_rescale(h, 2, 2, 2);
    CHECK(d.coeff(1, 1, 1) == 1);
  }

  TEST_CASE("json round trip keeps key order") {
    TriSeries a = mono(1, 2, 1, 2, make_rational(-3, 7)) + mono(0, 1, -1, 2, 5);
    std::string js = series_to_json(a);
    CHECK(js == R"({"den_tau":2,"den_z":2,"den_omega":1,"coeffs":[[0,-1,0,"5"],[1,1,0,"-3/7"]]})");
    TriSeries b = series_from_json(js, Window::unbounded());
    CHECK(TriSeries::equal_within(a, b));
    CHECK_THROWS_AS(series_from_json("{\"den_tau\":1}", Window::unbounded()), MathError);
  }

  TEST_CASE("both-sides l-truncation is refused") {
    Window w = Window::box(std::nullopt, Rational(3), Rational(2));
    TriSeries a = TriSeries::from_terms(Dens{}, w, {{ExponentKey{0, 1, 0}, Rational(1)}});
    CHECK_THROWS_AS(series_mul(a, a), MathError);
  }

  TEST_CASE("property: ring axioms on random truncated series") {
    Gen g(20240611);
    Dens d{2, 2, 1};
    Window w = Window::box(Rational(3), Rational(4));
    for (int trial = 0; trial < 60; ++trial) {
      TriSeries a = g.series(d, w, 8, 3, 4, 6);
      TriSeries b = g.series(d, w, 8, 3, 4, 6);
      TriSeries c = g.series(d, w, 8, 3, 4, 6);
      CHECK(TriSeries::equal_within(a * b, b * a));
      CHECK(TriSeries::equal_within((a * b) * c, a * (b * c)));
      CHECK(TriSeries::equal_within(a * (b + c), a * b + a * c));
    }
  }

  TEST_CASE("property: pow_rational is additive in the exponent") {
    Gen g(77);
    Dens d{3, 1, 1};
    Window w = Window::box(Rational(1), Rational(3));
    for (int trial = 0; trial < 20; ++trial) {
      TriSeries u = g.unit_series(d, w, 6, 3);
      Rational p = g.rational(3, 4), q = g.rational(3, 4);
      TriSeries lhs = series_pow_rational(u, p) * series_pow_rational(u, q);
      TriSeries rhs = series_pow_rational(u, p + q);
      CHECK(TriSeries::equal_within(lhs, rhs));
    }
  }

  TEST_CASE("property: division undoes multiplication") {
    Gen g(4242);
    Dens d{2, 2, 1};
    Window w = Window::box(Rational(2), Rational(4));
    for (int trial = 0; trial < 40; ++trial) {
      TriSeries a = g.series(d, w, 8, 2, 3, 6);
      TriSeries b = g.unit_series(d, w, 8, 4);
      if (trial % 3 == 0) b = b * mono(1, 2, 1, 2);
      TriSeries q = series_div(a * b, b);
      CHECK(TriSeries::equal_within(q, a));
    }
  }

  TEST_CASE("binomial factor matches pow_int and geometric series") {
    Window w = Window::box(Rational(2), Rational(5));
    TriSeries base = TriSeries::one(w) + mono(1, 1, 1, 1);
    ExponentKey x{1, -1, 1};
    TriSeries f = TriSeries::one(w) - TriSeries::from_terms(Dens{}, w, {{x, Rational(1)}});
    CHECK(TriSeries::equal_within(base.mul_binomial_factor(x, Rational(1), 3), base * f.pow_int(3)));
    TriSeries inv = base.mul_binomial_factor(x, Rational(1), -2);
    CHECK(TriSeries::equal_within(inv * f.pow_int(2), base));
  }
}
