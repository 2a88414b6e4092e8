#include "ddforms/theta.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace ddforms {

namespace {

const double kTwoPi = 6.283185307179586;

Rational required_max_n(const Window& w, const char* what) {
  if (!w.max_n) throw MathError(std::string(what) + " needs a bounded tau-window");
  return *w.max_n;
}

// largest K >= 0 with K^2 <= x
std::int64_t isqrt_floor(const Rational& x) {
  if (sgn(x) < 0) return -1;
  BigInt f = floor_rational(x);
  BigInt r = sqrt(f);
  return to_int64(r);
}

Complex e_of(Complex x) { return std::exp(kTwoPi * Complex(0, 1) * x); }

}  // namespace

TriSeries theta_series(const Window& window) {
  Rational wn = required_max_n(window, "theta_series");
  // m^2 / 8 <= max_n
  std::int64_t mmax = isqrt_floor(wn * 8);
  std::vector<TriSeries::Term> terms;
  for (std::int64_t m = -mmax; m <= mmax; ++m) {
    int chi = kronecker(-4, m);
    if (chi == 0) continue;
    terms.push_back({ExponentKey{m * m, m, 0}, Rational(chi)});
  }
  return TriSeries::from_terms(Dens{8, 2, 1}, window, std::move(terms));
}

TriSeries theta_series_scaled(std::int64_t c, const Window& window) {
  if (c <= 0) throw MathError("theta scale must be positive");
  Window w = window;
  if (w.max_n) w.max_n = *w.max_n / c;
  if (w.max_abs_l) w.max_abs_l = *w.max_abs_l / c;
  return theta_series(w).rescale(c, c, 1).truncated(window);
}

CycloSeries theta_char_series(std::int64_t level, std::int64_t a, std::int64_t b, const Window& window) {
  if (level <= 0) throw MathError("theta characteristic level must be positive");
  Rational wn = required_max_n(window, "theta_char_series");
  // exponent (nN + a)^2 / (2N^2) <= max_n
  std::int64_t xmax = isqrt_floor(wn * 2 * level * level);
  std::vector<CycloSeries::Term> terms;
  std::int64_t n2 = level * level;
  for (std::int64_t x = -xmax; x <= xmax; ++x) {
    if (mod64(x - a, level) != 0) continue;
    terms.push_back({ExponentKey{x * x, x, 0}, Cyclo::root(mod64(x * b, n2), n2)});
  }
  return CycloSeries::from_terms(Dens{2 * n2, level, 1}, window, std::move(terms));
}

std::string XiSymbol::to_string() const {
  std::string s = "xi^(" + std::to_string(level) + ")_{" + std::to_string(a) + "," + std::to_string(b) + "}";
  if (z_scale != 1) s += "(tau," + std::to_string(z_scale) + "z)";
  return s;
}

XiSymbol make_xi(std::int64_t level, std::int64_t a, std::int64_t b, std::int64_t z_scale) {
  if (level <= 0) throw MathError("xi level must be positive");
  if (z_scale <= 0) throw MathError("xi z-scale must be positive");
  XiSymbol x{level, mod64(a, level), mod64(b, level), z_scale};
  while (x.level % 2 == 0 && x.a % 2 == 0 && x.b % 2 == 0 && x.level > 1) {
    x.level /= 2;
    x.a /= 2;
    x.b /= 2;
  }
  if (x.level % 2 == 0 && x.a == x.level / 2 && x.b == x.level / 2) {
    throw MathError("theta characteristic (N/2, N/2) vanishes at z = 0: " + x.to_string());
  }
  return x;
}

std::int64_t XiProduct::index_x2() const {
  std::int64_t s = 0;
  for (const auto& f : factors) s += f.z_scale * f.z_scale;
  return s;
}

std::string XiProduct::to_string() const {
  std::string s = scalar.get_str();
  if (!phase.is_one()) s += "*e(" + std::to_string(phase.k) + "/" + std::to_string(phase.order) + ")";
  for (const auto& f : factors) s += "*" + f.to_string();
  return s;
}

void XiProduct::normalize() {
  scalar.canonicalize();
  std::sort(factors.begin(), factors.end());
}

XiSymbol xi_move(const XiSymbol& x, JacobiMove::Kind kind) {
  using K = JacobiMove::Kind;
  std::int64_t n = x.level, a = x.a, b = x.b;
  switch (kind) {
    case K::S:
      return make_xi(n, b, -a, x.z_scale);
    case K::NegI:
      return make_xi(n, -a, -b, x.z_scale);
    case K::T:
    case K::Tinv: {
      if (n % 2 == 1) {
        n *= 2;
        a *= 2;
        b *= 2;
      }
      std::int64_t shift = a + n / 2;
      return make_xi(n, a, kind == K::T ? b + shift : b - shift, x.z_scale);
    }
    case K::Heis:
      return x;
  }
  return x;
}

XiProduct xi_transform(const XiProduct& p, const std::vector<JacobiMove>& word) {
  XiProduct out = p;
  for (const auto& mv : word) {
    if (mv.kind == JacobiMove::Kind::Heis) {
      // xi_{a,b}(tau, c z) picks up e((a c mu - b c lambda) / N)
      for (const auto& f : out.factors) {
        out.phase = out.phase * Phase::make(f.a * f.z_scale * mv.mu - f.b * f.z_scale * mv.lambda, f.level);
      }
      continue;
    }
    for (auto& f : out.factors) f = xi_move(f, mv.kind);
  }
  out.normalize();
  return out;
}

std::vector<JacobiMove> moves_of(const std::vector<Gen>& word) {
  std::vector<JacobiMove> out;
  out.reserve(word.size());
  for (auto g : word) {
    switch (g) {
      case Gen::S: out.push_back({JacobiMove::Kind::S}); break;
      case Gen::T: out.push_back({JacobiMove::Kind::T}); break;
      case Gen::Tinv: out.push_back({JacobiMove::Kind::Tinv}); break;
      case Gen::NegI: out.push_back({JacobiMove::Kind::NegI}); break;
    }
  }
  return out;
}

XiProduct xi_slash(const XiProduct& p, const Mat2& m) { return xi_transform(p, moves_of(st_decompose(m))); }

std::vector<XiSymbol> xi_orbit(const XiSymbol& x, const std::vector<Mat2>& generators, std::size_t cap) {
  std::vector<std::vector<JacobiMove>> words;
  for (const auto& g : generators) {
    words.push_back(moves_of(st_decompose(g)));
    words.push_back(moves_of(st_decompose(g.inverse())));
  }
  XiSymbol start = make_xi(x.level, x.a, x.b, x.z_scale);
  std::set<XiSymbol> seen{start};
  std::deque<XiSymbol> todo{start};
  while (!todo.empty()) {
    XiSymbol cur = todo.front();
    todo.pop_front();
    for (const auto& w : words) {
      XiProduct p{Rational(1), Phase{}, {cur}};
      XiSymbol next = xi_transform(p, w).factors.front();
      if (seen.insert(next).second) {
        if (seen.size() > cap) throw MathError("xi orbit exceeds the size cap");
        todo.push_back(next);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

CycloSeries xi_series(const XiSymbol& x0, const Window& window) {
  XiSymbol x = make_xi(x0.level, x0.a, x0.b, x0.z_scale);
  Rational wn = required_max_n(window, "xi_series") + 1;
  std::int64_t n = x.level;
  Dens d{2 * n, 1, 1};
  // numerator sum_k q^{k^2/2 + a k / N} zeta_N^{b k} r^k and the same at r = 1
  std::int64_t kmax = isqrt_floor(wn * 2) + 2;
  std::vector<CycloSeries::Term> num, den;
  Window w = Window::box(std::nullopt, wn);
  for (std::int64_t k = -kmax; k <= kmax; ++k) {
    std::int64_t e = n * k * k + 2 * x.a * k;
    if (make_rational(e, 2 * n) > wn) continue;
    Cyclo c = Cyclo::root(mod64(x.b * k, n), n);
    num.push_back({ExponentKey{e, k, 0}, c});
    den.push_back({ExponentKey{e, 0, 0}, c});
  }
  auto a = CycloSeries::from_terms(d, w, std::move(num));
  auto b = CycloSeries::from_terms(d, w, std::move(den));
  CycloSeries quotient = CycloSeries::div(a, b);
  CycloSeries shift = CycloSeries::monomial(Cyclo(1L), Rational(0), make_rational(x.a, n), Rational(0));
  CycloSeries xi = CycloSeries::mul(quotient, shift);
  if (x.z_scale != 1) xi = xi.rescale(1, x.z_scale, 1);
  return xi.truncated(window);
}

CycloSeries xi_product_series(const XiProduct& p, const Window& window) {
  Window w = window;
  w.max_abs_l.reset();
  CycloSeries acc = CycloSeries::monomial(p.coefficient(), Rational(0), Rational(0), Rational(0), w);
  std::map<XiSymbol, CycloSeries> cache;
  for (const auto& f : p.factors) {
    auto it = cache.find(f);
    if (it == cache.end()) it = cache.emplace(f, xi_series(f, w)).first;
    acc = CycloSeries::mul(acc, it->second).truncated(w);
  }
  return acc.truncated(window);
}

std::int64_t XiForm::index_x2() const {
  if (terms.empty()) return 0;
  std::int64_t t = terms.front().index_x2();
  for (const auto& p : terms)
    if (p.index_x2() != t) throw MathError("xi form mixes different indices");
  return t;
}

XiForm XiForm::slash(const Mat2& m) const {
  auto moves = moves_of(st_decompose(m));
  XiForm out;
  for (const auto& p : terms) out.terms.push_back(xi_transform(p, moves));
  return out;
}

CycloSeries XiForm::series(const Window& window) const {
  Window w = window;
  w.max_abs_l.reset();
  std::map<XiSymbol, CycloSeries> cache;
  CycloSeries acc(Dens{}, w);
  for (const auto& p : terms) {
    CycloSeries prod = CycloSeries::monomial(p.coefficient(), Rational(0), Rational(0), Rational(0), w);
    for (const auto& f : p.factors) {
      auto it = cache.find(f);
      if (it == cache.end()) it = cache.emplace(f, xi_series(f, w)).first;
      prod = CycloSeries::mul(prod, it->second).truncated(w);
    }
    acc = acc + prod;
  }
  return acc.truncated(window);
}

Complex eta_numeric(Complex tau) {
  if (tau.imag() <= 0) throw MathError("eta needs Im(tau) > 0");
  Complex q = e_of(tau);
  Complex prod = e_of(tau / 24.0);
  Complex qn = q;
  for (int n = 1; n < 100000 && std::abs(qn) > 1e-18; ++n) {
    prod *= (1.0 - qn);
    qn *= q;
  }
  return prod;
}

namespace {

// summation range for x = n + shift with Gaussian decay in Im(tau)
std::int64_t theta_range(Complex tau, Complex z) {
  double y = tau.imag();
  if (y <= 0) throw MathError("theta needs Im(tau) > 0");
  return static_cast<std::int64_t>(std::ceil(std::abs(z.imag()) / y + std::sqrt(90.0 / (kTwoPi * y / 2.0)))) + 3;
}

}  // namespace

Complex theta_numeric(Complex tau, Complex z) {
  std::int64_t k = 2 * theta_range(tau, z) + 1;
  Complex s = 0;
  for (std::int64_t m = -k; m <= k; ++m) {
    int chi = kronecker(-4, m);
    if (chi == 0) continue;
    double md = double(m);
    s += double(chi) * e_of(md * md / 8.0 * tau + md / 2.0 * z);
  }
  return s;
}

Complex theta_char_numeric(std::int64_t level, std::int64_t a, std::int64_t b, Complex tau, Complex z) {
  std::int64_t k = theta_range(tau, z) + std::abs(a / level) + 1;
  Complex s = 0;
  Complex zz = z + double(b) / double(level);
  for (std::int64_t n = -k; n <= k; ++n) {
    double x = double(n) + double(a) / double(level);
    s += e_of(0.5 * x * x * tau + x * zz);
  }
  return s;
}

Complex xi_numeric(const XiSymbol& x, Complex tau, Complex z) {
  return theta_char_numeric(x.level, x.a, x.b, tau, double(x.z_scale) * z) /
         theta_char_numeric(x.level, x.a, x.b, tau, 0.0);
}

Complex xi_product_numeric(const XiProduct& p, Complex tau, Complex z) {
  Complex v = p.coefficient().to_complex();
  for (const auto& f : p.factors) v *= xi_numeric(f, tau, z);
  return v;
}

Complex xi_form_numeric(const XiForm& f, Complex tau, Complex z) {
  Complex v = 0;
  for (const auto& p : f.terms) v += xi_product_numeric(p, tau, z);
  return v;
}

Complex series_numeric(const CycloSeries& s, Complex tau, Complex z, Complex omega) {
  Complex v = 0;
  const Dens& d = s.dens();
  for (const auto& [k, c] : s.terms()) {
    v += c.to_complex() * e_of(double(k.n_hat) / double(d.tau) * tau + double(k.l_hat) / double(d.z) * z +
                               double(k.m_hat) / double(d.omega) * omega);
  }
  return v;
}

Complex series_numeric(const TriSeries& s, Complex tau, Complex z, Complex omega) {
  Complex v = 0;
  const Dens& d = s.dens();
  for (const auto& [k, c] : s.terms()) {
    v += c.get_d() * e_of(double(k.n_hat) / double(d.tau) * tau + double(k.l_hat) / double(d.z) * z +
                          double(k.m_hat) / double(d.omega) * omega);
  }
  return v;
}

}  // namespace ddforms
