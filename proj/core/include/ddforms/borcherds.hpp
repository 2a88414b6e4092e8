#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddforms/jacobi.hpp"
#include "ddforms/lift.hpp"
#include "ddforms/series.hpp"

namespace ddforms {

// Expansion of phi | M_{f/e} in q^{1/h_e}, with the cusp's width and N_e = N / e.
struct CuspTable {
  Cusp cusp;
  std::int64_t h = 1;
  std::int64_t n_e = 1;
  TriSeries expansion;

  // h_e / N_e
  Rational multiplicity() const { return make_rational(h, n_e); }
  // c_{f/e}(n, l) at true exponents; zero outside the support
  Rational c(const Rational& n, const Rational& l) const;
};

struct BorcherdsInput {
  std::string form_id;
  std::int64_t level = 1;
  Rational t;
  Rational max_n;  // q-precision of every table
  std::vector<CuspTable> cusps;
};

BorcherdsInput collect_cusp_data(const JacobiForm& form, const Rational& max_n);
BorcherdsInput collect_cusp_data(const std::string& form_id, const Rational& max_n);

struct IntegralityViolation {
  std::string cusp;
  Rational n, l, value;  // value = (h_e / N_e) c(n, l)
};

// Coefficients with 4 n t - l^2 <= 0 whose scaled value is not an integer.
std::vector<IntegralityViolation> integrality_check(const BorcherdsInput& input);

struct WeylData {
  Rational A, B, C;
  std::int64_t k_x2 = 0;
  Rational D0;
  Rational D1;
};

WeylData weyl_data(const BorcherdsInput& input);
std::string weyl_to_json(const WeylData& w);

// q^A r^B s^C prod_{cusps} prod_{(n,l,m) > 0} (1 - (q^n r^l s^{tm})^{N_e})^{(h_e/N_e) c(nm, l)} on the window.
SiegelForm borcherds_expand(const BorcherdsInput& input, const Window& window);
SiegelForm borcherds_expand(const std::string& form_id, const Window& window);

// First Fourier-Jacobi coefficient: eta and theta/eta factors times s^C.
TriSeries leading_fj_factor(const BorcherdsInput& input, const Rational& max_n);

// The same product from the traces f_d = Tr_{Gamma_0(d)} phi, d | N, with Moebius exponents.
SiegelForm traced_expand(const JacobiForm& phi, const Window& window);

// t D_1 + C - t A
Rational lemma_d1_check(const BorcherdsInput& input);

struct CharacterData {
  struct PerCusp {
    std::string cusp;
    std::int64_t n_e = 1;
    Rational eta_exponent;         // (h/N_e) sum_l c(0, l)
    Rational heisenberg_exponent;  // (h/N_e) sum_{l>0} l c(0, l)
  };
  std::vector<PerCusp> cusps;
  Phase center;       // chi([0, 0; 1/t]) = e(C / t)
  int vt_sign = 1;    // (-1)^{D0}
  std::int64_t eta_order = 1;         // order of the eta-product multiplier on Gamma_0(N)
  std::int64_t heisenberg_order = 1;  // 1 or 2
  std::int64_t order = 1;             // lcm of the three parts
};

CharacterData character_data(const BorcherdsInput& input);
std::string character_to_json(const CharacterData& c);

}  // namespace ddforms
