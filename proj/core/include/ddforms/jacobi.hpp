#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddforms/modular.hpp"
#include "ddforms/series.hpp"
#include "ddforms/theta.hpp"

namespace ddforms {

// prod eta(d tau)^e * prod theta(c tau, c z)^p
struct EtaThetaRecipe {
  EtaProduct eta;
  std::vector<std::pair<std::int64_t, std::int64_t>> thetas;  // (scale c, power p)

  Rational weight() const;
  Rational index() const;
  Rational order_at_infinity() const;
  // v_eta exponents per scale; a theta factor at scale c counts as eta(c tau)^3
  std::vector<std::pair<std::int64_t, std::int64_t>> eta_exponents() const;
  TriSeries series(const Window& window) const;
  Complex numeric(Complex tau, Complex z) const;
};

struct JacobiForm {
  std::string id;
  std::string formula;
  std::int64_t weight_x2 = 0;
  std::int64_t index_x2 = 0;
  std::int64_t level = 1;
  CharacterId character;
  std::int64_t q_chi = 1;
  bool weak = false;
  bool holomorphic = false;
  bool cusp_form = false;

  std::optional<XiForm> xi;
  std::optional<EtaThetaRecipe> eta_theta;
  // Fixed expansions keyed by cusp label, for forms given only by their Fourier data.
  std::map<std::string, TriSeries> stored;

  Rational weight() const { return make_rational(weight_x2, 2); }
  Rational index() const { return make_rational(index_x2, 2); }
};

// Expansion of phi | M_{f/e} as a series in q^{1/h_e} and r (omega-free).
TriSeries cusp_expansion(const JacobiForm& form, const Cusp& cusp, const Window& window);
TriSeries expansion_at_infinity(const JacobiForm& form, const Window& window);

// Sum of phi | M over Gamma_0(level) \ Gamma_0(target).
JacobiForm trace_to(const JacobiForm& form, std::int64_t target_level, const std::string& new_id = "");

// t sum c(0,l) - 24 t sum_{n<0} sigma_1(-n) c(n,l) - 6 sum l^2 c(0,l) for a level-one expansion.
Rational weight2_constant_check(const TriSeries& expansion, const Rational& t);
Rational weight2_constant_check(const JacobiForm& form, std::int64_t precision = 1);

// Character with chi(T) = e(1/q); returns q.
std::int64_t conductor_of(const CharacterId& chi);

JacobiForm make_xi_form(std::string id, std::string formula, std::int64_t level, XiForm xi);
JacobiForm make_eta_theta_form(std::string id, std::string formula, std::int64_t level, EtaThetaRecipe recipe);

const JacobiForm& registry_form(const std::string& id);
std::vector<std::string> registry_ids();
std::string registry_json();

// Numeric value of a registry form, or of "eta" / "theta".
Complex eval_numeric(const std::string& id, Complex tau, Complex z);

}  // namespace ddforms
