#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ddforms/cyclotomic.hpp"
#include "ddforms/rational.hpp"
#include "ddforms/series.hpp"

namespace ddforms {

struct Mat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator-() const { return {-a, -b, -c, -d}; }
  bool operator==(const Mat2&) const = default;
  Mat2 inverse() const;  // requires det = 1
  std::string to_string() const;

  static Mat2 identity() { return {1, 0, 0, 1}; }
  static Mat2 S() { return {0, -1, 1, 0}; }
  static Mat2 T(std::int64_t k = 1) { return {1, k, 0, 1}; }
  static Mat2 neg_identity() { return {-1, 0, 0, -1}; }
};

bool in_gamma0(const Mat2& m, std::int64_t level);

// Cusp f/e of Gamma_0(N): e | N, width h_e = N / gcd(e^2, N), N_e = N / e.
struct Cusp {
  std::int64_t f = 1;
  std::int64_t e = 1;
  std::int64_t width = 1;
  std::int64_t comp = 1;
  std::int64_t level = 1;

  bool is_infinity() const { return e == level; }
  std::string label() const;
  // Matrix M_{f/e} with M(inf) = f/e; the identity for the cusp at infinity.
  Mat2 matrix() const;
};

std::vector<Cusp> cusps_gamma0(std::int64_t level);
std::int64_t gamma0_index(std::int64_t level);
std::string cusps_to_json(const std::vector<Cusp>& cusps);

// Right coset representatives of Gamma_0(level) in Gamma_0(parent); parent must divide level.
std::vector<Mat2> coset_reps(std::int64_t level, std::int64_t parent = 1);

// Generators of Gamma_0(level) (Schreier generators from S, T over the coset representatives, plus -I).
std::vector<Mat2> gamma0_generators(std::int64_t level);

// Index of Gamma_t(N) intersected with Sp_4(Z) in Sp_4(Z).
BigInt index_paramodular(std::int64_t t, std::int64_t level);

enum class Gen { S, T, Tinv, NegI };
std::vector<Gen> st_decompose(const Mat2& m);
Mat2 word_product(const std::vector<Gen>& word);
std::string word_to_string(const std::vector<Gen>& word);

// Product of eta(d tau)^e over the factors (d, e).
struct EtaProduct {
  std::vector<std::pair<std::int64_t, std::int64_t>> factors;

  Rational weight() const;
  Rational order_at_infinity() const;
};

Rational eta_order_at_cusp(const EtaProduct& p, std::int64_t cusp_a, std::int64_t cusp_c);

// q^{d/24} prod (1 - q^{dn}) truncated to the window's tau bound.
TriSeries eta_qexpansion(std::int64_t d, const Window& window);
// prod eta(d tau)^e as one series.
TriSeries eta_product_qexpansion(const EtaProduct& p, const Window& window);

// Residue x mod 24 with v_eta(M) = exp(2 pi i x / 24), where
// eta(M tau) = v_eta(M) (c tau + d)^{1/2} eta(tau) with the principal square root.
std::int64_t eta_multiplier(const Mat2& m);

// Dedekind sum s(h, k) for k > 0.
Rational dedekind_sum(std::int64_t h, std::int64_t k);

struct CharacterId {
  enum class Kind {
    trivial,
    chi2_2,          // (-1)^{b-c} on Gamma_0(2), c = C/2
    chi4_2,          // exp(2 pi i d(b-c)/4) on Gamma_0(2)
    chi2_3,          // order-2 character of Gamma_0(3)
    chi2_4,          // (-1)^{(d-1)/2} on Gamma_0(4)
    chi4_level2_t2,  // exp(2 pi i (bd+d-1)/4) on Gamma_0(2)
    chi2_b,          // (-1)^b on Gamma_0(2)
    eta_power,       // v_eta^n on SL_2(Z)
    eta_quotient,    // character of an eta quotient on Gamma_0(level), exponents of v_eta per scale
    dirichlet,       // chi_N(d) for a real Dirichlet character
  };

  Kind kind = Kind::trivial;
  std::int64_t level = 1;
  std::int64_t eta_exp = 0;
  // eta_quotient: (scale, exponent of v_eta); a theta factor at scale c contributes 3 * exponent
  std::vector<std::pair<std::int64_t, std::int64_t>> eta_exps;
  std::vector<int> values;  // dirichlet: values on residues 0..level-1

  static CharacterId trivial_char() { return {}; }
  static CharacterId named(Kind k);
  static CharacterId eta_power_char(std::int64_t n);
  static CharacterId eta_quotient_char(std::int64_t level, std::vector<std::pair<std::int64_t, std::int64_t>> exps);
  static CharacterId dirichlet_kronecker(std::int64_t disc, std::int64_t modulus);
  static CharacterId dirichlet_values(std::int64_t modulus, std::vector<int> values);

  std::string tag() const;
};

Phase character_value(const CharacterId& chi, const Mat2& m);

// sigma_a in SL_2(Z) congruent to diag(a^{-1}, a) modulo M.
Mat2 sigma_a(std::int64_t a, std::int64_t modulus);

// Dirichlet helpers for real characters given by their values.
int dirichlet_value(const CharacterId& chi, std::int64_t n);
bool dirichlet_is_primitive(const CharacterId& chi);
Rational bernoulli_number(unsigned k);  // B_1 = -1/2
Rational generalized_bernoulli(unsigned k, const CharacterId& chi);

// E_k(tau, chi) = -B_{k,chi}/(2k) + sum_n sum_{a|n} chi(a) a^{k-1} q^n.
TriSeries eisenstein_qexpansion(unsigned k, const CharacterId& chi, const Window& window);

}  // namespace ddforms
