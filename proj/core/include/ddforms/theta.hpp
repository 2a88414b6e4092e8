#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ddforms/cyclotomic.hpp"
#include "ddforms/modular.hpp"
#include "ddforms/series.hpp"

namespace ddforms {

using Complex = std::complex<double>;

// sum_m (-4/m) q^{m^2/8} r^{m/2}
TriSeries theta_series(const Window& window);
// theta(c tau, c z)
TriSeries theta_series_scaled(std::int64_t c, const Window& window);
// sum_n e^{i pi (n + a/N)^2 tau + 2 pi i (n + a/N)(z + b/N)}
CycloSeries theta_char_series(std::int64_t level, std::int64_t a, std::int64_t b, const Window& window);

// xi^{(N)}_{a,b}(tau, c z) = theta_{a,b}(tau, c z) / theta_{a,b}(tau, 0); depends on (a, b) mod N only.
struct XiSymbol {
  std::int64_t level = 2;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t z_scale = 1;

  friend auto operator<=>(const XiSymbol&, const XiSymbol&) = default;
  std::string to_string() const;
};

// Reduces (a, b) mod N, lowers the level while both entries are even (xi^{(2N)}_{2a,2b} = xi^{(N)}_{a,b})
// and rejects the vanishing characteristic (N/2, N/2).
XiSymbol make_xi(std::int64_t level, std::int64_t a, std::int64_t b, std::int64_t z_scale = 1);

struct XiProduct {
  Rational scalar{1};
  Phase phase{};
  std::vector<XiSymbol> factors;  // kept sorted

  // twice the index: each factor contributes z_scale^2 / 2
  std::int64_t index_x2() const;
  Cyclo coefficient() const { return Cyclo(scalar) * Cyclo::from_phase(phase); }
  std::string to_string() const;
  void normalize();
};

// Generators of the Jacobi group acting by the weight-0 slash.
struct JacobiMove {
  enum class Kind { S, T, Tinv, NegI, Heis } kind = Kind::S;
  std::int64_t lambda = 0;
  std::int64_t mu = 0;

  static JacobiMove heis(std::int64_t l, std::int64_t m) { return {Kind::Heis, l, m}; }
};

XiSymbol xi_move(const XiSymbol& x, JacobiMove::Kind kind);
XiProduct xi_transform(const XiProduct& p, const std::vector<JacobiMove>& word);
std::vector<JacobiMove> moves_of(const std::vector<Gen>& word);
// p | M for M in SL_2(Z), via the S/T decomposition of M.
XiProduct xi_slash(const XiProduct& p, const Mat2& m);

// Orbit of a symbol under the group generated by the given matrices.
std::vector<XiSymbol> xi_orbit(const XiSymbol& x, const std::vector<Mat2>& generators, std::size_t cap = 10000);

CycloSeries xi_series(const XiSymbol& x, const Window& window);
CycloSeries xi_product_series(const XiProduct& p, const Window& window);

// Finite linear combination of xi-products: the weight-0 forms built from theta quotients.
struct XiForm {
  std::vector<XiProduct> terms;
  std::int64_t index_x2() const;
  XiForm slash(const Mat2& m) const;
  CycloSeries series(const Window& window) const;
};

// Numeric evaluation.
Complex eta_numeric(Complex tau);
Complex theta_numeric(Complex tau, Complex z);
Complex theta_char_numeric(std::int64_t level, std::int64_t a, std::int64_t b, Complex tau, Complex z);
Complex xi_numeric(const XiSymbol& x, Complex tau, Complex z);
Complex xi_product_numeric(const XiProduct& p, Complex tau, Complex z);
Complex xi_form_numeric(const XiForm& f, Complex tau, Complex z);
// Sum of the known terms at q = e(tau), r = e(z), s = e(omega).
Complex series_numeric(const CycloSeries& s, Complex tau, Complex z, Complex omega = 0.0);
Complex series_numeric(const TriSeries& s, Complex tau, Complex z, Complex omega = 0.0);

// (f |_{k,t} M)(tau, z) = (c tau + d)^{-k} e(-t c z^2 / (c tau + d)) f(M tau, z / (c tau + d)), principal branch.
template <class F>
Complex jacobi_slash_numeric(F&& f, double k, double t, const Mat2& m, Complex tau, Complex z) {
  const Complex I(0, 1);
  const double two_pi = 6.283185307179586;
  Complex j = double(m.c) * tau + double(m.d);
  Complex mt = (double(m.a) * tau + double(m.b)) / j;
  return std::pow(j, -k) * std::exp(-two_pi * I * t * double(m.c) * z * z / j) * f(mt, z / j);
}

// Heisenberg part: (f | [lambda, mu; 0])(tau, z) = e(t (lambda^2 tau + 2 lambda z)) f(tau, z + lambda tau + mu).
template <class F>
Complex heisenberg_slash_numeric(F&& f, double t, std::int64_t lambda, std::int64_t mu, Complex tau, Complex z) {
  const Complex I(0, 1);
  const double two_pi = 6.283185307179586;
  double l = double(lambda);
  return std::exp(two_pi * I * t * (l * l * tau + 2.0 * l * z)) * f(tau, z + l * tau + double(mu));
}

}  // namespace ddforms
