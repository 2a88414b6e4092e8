#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddforms {

using Rational = mpq_class;
using BigInt = mpz_class;

class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational r(static_cast<long>(num), static_cast<unsigned long>(den < 0 ? -den : den));
  if (den < 0) r = -r;
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

std::int64_t to_int64(const BigInt& z);
std::int64_t to_int64(const Rational& r);  // requires an integer value

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);
std::int64_t mod64(std::int64_t a, std::int64_t m);  // result in [0, m)
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);

// Extended gcd: returns g = gcd(a,b) >= 0 with x*a + y*b = g.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y);
std::int64_t inverse_mod(std::int64_t a, std::int64_t m);

std::vector<std::int64_t> prime_factors(std::int64_t n);  // distinct, ascending
std::vector<std::int64_t> divisors(std::int64_t n);       // positive, ascending
std::int64_t euler_phi(std::int64_t n);
int moebius(std::int64_t n);
BigInt sigma(std::int64_t n, unsigned power);

// Kronecker symbol (d/n) for the cases used here: d in {-4, -3, 3, ...} and n any integer.
int kronecker(std::int64_t d, std::int64_t n);

// Binomial coefficient C(alpha, k) for rational alpha.
Rational binomial(const Rational& alpha, unsigned k);

// Floor of x for a rational.
BigInt floor_rational(const Rational& x);

}  // namespace ddforms
