#include "ddforms/cyclotomic.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace ddforms {

Phase Phase::make(std::int64_t k, std::int64_t order) {
  if (order <= 0) throw MathError("phase order must be positive");
  k = mod64(k, order);
  std::int64_t g = gcd64(k, order);
  if (k == 0) return Phase{0, 1};
  return Phase{k / g, order / g};
}

Phase Phase::operator*(const Phase& o) const {
  std::int64_t L = lcm64(order, o.order);
  return make(k * (L / order) + o.k * (L / o.order), L);
}

Phase Phase::pow(std::int64_t e) const { return make(mod64(k * mod64(e, order), order), order); }

int Phase::as_sign() const {
  if (k == 0) return 1;
  if (order == 2) return -1;
  throw MathError("phase e^{2 pi i " + std::to_string(k) + "/" + std::to_string(order) + "} is not real");
}

namespace {

using PolyCache = std::map<std::int64_t, std::vector<std::int64_t>>;

const std::vector<std::int64_t>& cyclotomic_locked(std::int64_t order, PolyCache& cache) {
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  // x^L - 1 divided by Phi_d for every proper divisor d.
  std::vector<std::int64_t> num(static_cast<std::size_t>(order + 1), 0);
  num[0] = -1;
  num[static_cast<std::size_t>(order)] = 1;
  for (auto d : divisors(order)) {
    if (d == order) continue;
    const std::vector<std::int64_t> den = cyclotomic_locked(d, cache);
    std::size_t dn = den.size() - 1;
    std::vector<std::int64_t> quot(num.size() - dn, 0);
    for (std::size_t i = num.size() - 1;; --i) {
      std::int64_t coef = num[i];
      quot[i - dn] = coef;
      for (std::size_t j = 0; j <= dn; ++j) num[i - dn + j] -= coef * den[j];
      if (i == dn) break;
    }
    num = quot;
  }
  return cache.emplace(order, num).first->second;
}

}  // namespace

const std::vector<std::int64_t>& cyclotomic_polynomial(std::int64_t order) {
  static std::mutex mu;
  static PolyCache cache;
  std::lock_guard<std::mutex> lock(mu);
  return cyclotomic_locked(order, cache);
}

namespace {

std::vector<Rational> reduce_poly(std::vector<Rational> p, std::int64_t order) {
  const auto& phi = cyclotomic_polynomial(order);
  std::size_t deg = phi.size() - 1;
  for (std::size_t i = p.size(); i-- > deg;) {
    if (sgn(p[i]) == 0) continue;
    Rational coef = p[i];
    for (std::size_t j = 0; j <= deg; ++j) {
      if (phi[j] != 0) p[i - deg + j] -= coef * static_cast<long>(phi[j]);
    }
  }
  p.resize(deg);
  return p;
}

std::size_t degree_of(std::int64_t order) { return cyclotomic_polynomial(order).size() - 1; }

}  // namespace

Cyclo::Cyclo() : order_(1), c_(1, Rational(0)) {}
Cyclo::Cyclo(const Rational& r) : order_(1), c_(1, r) {}
Cyclo::Cyclo(long v) : order_(1), c_(1, Rational(v)) {}

Cyclo Cyclo::root(std::int64_t k, std::int64_t order) {
  Phase p = Phase::make(k, order);
  std::vector<Rational> poly(static_cast<std::size_t>(p.k + 1), Rational(0));
  poly[static_cast<std::size_t>(p.k)] = 1;
  return Cyclo(p.order, reduce_poly(std::move(poly), p.order));
}

bool Cyclo::is_zero() const {
  for (const auto& x : c_)
    if (sgn(x) != 0) return false;
  return true;
}

bool Cyclo::is_rational() const {
  for (std::size_t i = 1; i < c_.size(); ++i)
    if (sgn(c_[i]) != 0) return false;
  return true;
}

Rational Cyclo::to_rational() const {
  if (!is_rational()) throw MathError("cyclotomic value " + to_string() + " is not rational");
  return c_[0];
}

Cyclo Cyclo::lifted(std::int64_t new_order) const {
  if (new_order == order_) return *this;
  if (new_order % order_ != 0) throw MathError("cannot lift cyclotomic element to a non-multiple order");
  std::int64_t step = new_order / order_;
  std::vector<Rational> poly(static_cast<std::size_t>((static_cast<std::int64_t>(c_.size()) - 1) * step + 1),
                             Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i) poly[i * static_cast<std::size_t>(step)] = c_[i];
  return Cyclo(new_order, reduce_poly(std::move(poly), new_order));
}

Cyclo Cyclo::operator-() const {
  Cyclo r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Cyclo& Cyclo::operator+=(const Cyclo& o) {
  if (o.order_ == order_) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  std::int64_t L = lcm64(order_, o.order_);
  Cyclo a = lifted(L);
  Cyclo b = o.lifted(L);
  for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
  *this = std::move(a);
  return *this;
}

Cyclo& Cyclo::operator-=(const Cyclo& o) { return *this += -o; }

Cyclo& Cyclo::operator*=(const Cyclo& o) {
  if (o.order_ == 1) {
    for (auto& x : c_) x *= o.c_[0];
    return *this;
  }
  if (order_ == 1) {
    Rational s = c_[0];
    *this = o;
    for (auto& x : c_) x *= s;
    return *this;
  }
  std::int64_t L = lcm64(order_, o.order_);
  Cyclo a = lifted(L);
  Cyclo b = o.lifted(L);
  std::vector<Rational> prod(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (sgn(a.c_[i]) == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) {
      if (sgn(b.c_[j]) == 0) continue;
      prod[i + j] += a.c_[i] * b.c_[j];
    }
  }
  *this = Cyclo(L, reduce_poly(std::move(prod), L));
  return *this;
}

Cyclo Cyclo::inverse() const {
  if (is_zero()) throw MathError("division by zero in cyclotomic field");
  if (order_ == 1) return Cyclo(Rational(1) / c_[0]);
  // Solve (this) * y = 1 using the multiplication matrix in the power basis.
  std::size_t n = degree_of(order_);
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t j = 0; j < n; ++j) {
    Cyclo col = *this * root(static_cast<std::int64_t>(j), order_);
    col = col.lifted(order_);
    for (std::size_t i = 0; i < n; ++i) m[i][j] = col.c_[i];
  }
  m[0][n] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(m[piv][col]) == 0) ++piv;
    if (piv == n) throw MathError("singular multiplication matrix");
    std::swap(m[piv], m[col]);
    Rational inv = Rational(1) / m[col][col];
    for (std::size_t k = col; k <= n; ++k) m[col][k] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(m[r][col]) == 0) continue;
      Rational f = m[r][col];
      for (std::size_t k = col; k <= n; ++k) m[r][k] -= f * m[col][k];
    }
  }
  std::vector<Rational> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = m[i][n];
  return Cyclo(order_, std::move(y));
}

Cyclo& Cyclo::operator/=(const Cyclo& o) {
  if (o.order_ == 1) {
    if (sgn(o.c_[0]) == 0) throw MathError("division by zero");
    for (auto& x : c_) x /= o.c_[0];
    return *this;
  }
  return *this *= o.inverse();
}

bool Cyclo::operator==(const Cyclo& o) const {
  if (order_ == o.order_) return c_ == o.c_;
  std::int64_t L = lcm64(order_, o.order_);
  return lifted(L).c_ == o.lifted(L).c_;
}

Cyclo Cyclo::conj() const {
  Cyclo r(Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (sgn(c_[i]) == 0) continue;
    r += Cyclo(c_[i]) * root(-static_cast<std::int64_t>(i), order_);
  }
  return r;
}

std::complex<double> Cyclo::to_complex() const {
  std::complex<double> z = 0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(order_);
    z += c_[i].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return z;
}

std::string Cyclo::to_string() const {
  if (is_rational()) return c_[0].get_str();
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (sgn(c_[i]) == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << c_[i].get_str() << ")";
    if (i > 0) os << "*z" << order_ << "^" << i;
  }
  return os.str();
}

}  // namespace ddforms
