#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ddforms/jacobi.hpp"
#include "ddforms/series.hpp"

namespace ddforms {

// Fourier expansion of a Siegel form in q = e(tau), r = e(z), s = e(omega), true exponents.
struct SiegelForm {
  std::string id;
  std::int64_t t = 1;      // paramodular level of Gamma_t(N)^+
  std::int64_t level = 1;  // N
  bool plus = true;
  std::int64_t weight_x2 = 0;
  std::string character;
  TriSeries series;
};

std::string siegel_to_json(const SiegelForm& f);
SiegelForm siegel_from_json(const std::string& text);

// omega <= max_omega and tau <= max_omega / t: a box mapped onto itself by the V_t swap.
Window siegel_window(const Rational& max_omega, std::int64_t t);

struct LiftSpec {
  std::string form_id;
  std::int64_t mu = 1;
  Rational max_omega{3};
  std::optional<Rational> max_tau;  // defaults to the V_t-symmetric bound
};

// phi | T_-(m): index m t, window in the output tau-exponent.
TriSeries hecke_tminus(const JacobiForm& phi, std::int64_t m, const Window& window);

SiegelForm arithmetic_lift(const JacobiForm& phi, std::int64_t mu, const Window& window);
SiegelForm arithmetic_lift(const LiftSpec& spec);

enum class ClosedForm { nabla2, q1 };
SiegelForm closed_form_oracle(ClosedForm which, const Window& window);

// Layer of s-degree m_hat (scaled by the series' omega denominator) as a q-r series.
TriSeries fourier_jacobi_slice(const SiegelForm& f, std::int64_t m_hat);

// c(x, y, w) = c(w / t, y, x t) on the part of the window that is closed under the swap.
bool vt_symmetry_check(const TriSeries& series, std::int64_t t);
bool vt_symmetry_check(const SiegelForm& f);

}  // namespace ddforms
