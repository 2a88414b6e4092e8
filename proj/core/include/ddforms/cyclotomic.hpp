#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ddforms/rational.hpp"

namespace ddforms {

// A root of unity e^{2 pi i k / order}, kept reduced.
struct Phase {
  std::int64_t k = 0;
  std::int64_t order = 1;

  static Phase make(std::int64_t k, std::int64_t order);
  Phase operator*(const Phase& o) const;
  Phase pow(std::int64_t e) const;
  Phase inverse() const { return make(-k, order); }
  bool is_one() const { return k == 0; }
  bool operator==(const Phase& o) const { return k == o.k && order == o.order; }
  // Returns +1 / -1 for real phases, throws otherwise.
  int as_sign() const;
};

// Element of the cyclotomic field Q(zeta_L), stored in the power basis
// 1, zeta, ..., zeta^{phi(L)-1} reduced modulo the L-th cyclotomic polynomial.
class Cyclo {
 public:
  Cyclo();
  Cyclo(const Rational& r);  // NOLINT(implicit)
  Cyclo(long v);              // NOLINT(implicit)

  static Cyclo root(std::int64_t k, std::int64_t order);
  static Cyclo from_phase(const Phase& p) { return root(p.k, p.order); }

  std::int64_t order() const { return order_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_rational() const;
  Rational rational_part() const { return c_[0]; }
  Rational to_rational() const;  // throws unless rational

  Cyclo lifted(std::int64_t new_order) const;  // new_order must be a multiple of order()

  Cyclo operator-() const;
  Cyclo& operator+=(const Cyclo& o);
  Cyclo& operator-=(const Cyclo& o);
  Cyclo& operator*=(const Cyclo& o);
  Cyclo& operator/=(const Cyclo& o);
  friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
  friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }
  friend Cyclo operator*(Cyclo a, const Cyclo& b) { return a *= b; }
  friend Cyclo operator/(Cyclo a, const Cyclo& b) { return a /= b; }
  bool operator==(const Cyclo& o) const;
  bool operator!=(const Cyclo& o) const { return !(*this == o); }

  Cyclo inverse() const;
  Cyclo conj() const;
  std::complex<double> to_complex() const;
  std::string to_string() const;

 private:
  Cyclo(std::int64_t order, std::vector<Rational> c) : order_(order), c_(std::move(c)) {}
  std::int64_t order_ = 1;
  std::vector<Rational> c_;
};

// Integer coefficients of the L-th cyclotomic polynomial, lowest degree first.
const std::vector<std::int64_t>& cyclotomic_polynomial(std::int64_t order);

inline bool is_zero_coeff(const Rational& r) { return sgn(r) == 0; }
inline bool is_zero_coeff(const Cyclo& c) { return c.is_zero(); }

}  // namespace ddforms
