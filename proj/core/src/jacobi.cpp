#include "ddforms/jacobi.hpp"

#include <functional>

#include "json.hpp"

namespace ddforms {

Rational EtaThetaRecipe::weight() const {
  Rational w = eta.weight();
  for (auto [c, p] : thetas) w += make_rational(p, 2);
  return w;
}

Rational EtaThetaRecipe::index() const {
  Rational t(0);
  for (auto [c, p] : thetas) t += make_rational(p * c, 2);
  return t;
}

Rational EtaThetaRecipe::order_at_infinity() const {
  Rational o = eta.order_at_infinity();
  for (auto [c, p] : thetas) o += make_rational(p * c, 8);
  return o;
}

std::vector<std::pair<std::int64_t, std::int64_t>> EtaThetaRecipe::eta_exponents() const {
  std::map<std::int64_t, std::int64_t> acc;
  for (auto [d, e] : eta.factors) acc[d] += e;
  for (auto [c, p] : thetas) acc[c] += 3 * p;
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (auto [d, e] : acc)
    if (e != 0) out.emplace_back(d, e);
  return out;
}

TriSeries EtaThetaRecipe::series(const Window& window) const {
  if (!window.max_n) throw MathError("eta-theta expansion needs a bounded tau-window");
  // divisions by theta lose at most the divisor's leading order from the window
  Rational margin(1);
  for (auto [c, p] : thetas)
    if (p < 0) margin += make_rational(-p * c, 4);
  Window wide = Window::box(std::nullopt, *window.max_n + margin);
  TriSeries acc = eta_product_qexpansion(eta, wide);
  std::vector<TriSeries> divisors;
  for (auto [c, p] : thetas) {
    TriSeries th = theta_series_scaled(c, wide);
    for (std::int64_t i = 0; i < p; ++i) acc = series_mul(acc, th);
    for (std::int64_t i = 0; i < -p; ++i) divisors.push_back(th);
  }
  for (const auto& d : divisors) acc = series_div(acc, d);
  if (acc.window().max_n && *acc.window().max_n < *window.max_n) {
    throw MathError("eta-theta expansion lost precision below the requested window");
  }
  return acc.truncated(window).normalized();
}

Complex EtaThetaRecipe::numeric(Complex tau, Complex z) const {
  Complex v = 1;
  for (auto [d, e] : eta.factors) v *= std::pow(eta_numeric(double(d) * tau), double(e));
  for (auto [c, p] : thetas) v *= std::pow(theta_numeric(double(c) * tau, double(c) * z), double(p));
  return v;
}

TriSeries cusp_expansion(const JacobiForm& form, const Cusp& cusp, const Window& window) {
  if (cusp.level != form.level) throw MathError("cusp does not belong to the form's level");
  if (auto it = form.stored.find(cusp.label()); it != form.stored.end()) return it->second.truncated(window);
  if (form.xi) {
    XiForm slashed = cusp.is_infinity() ? *form.xi : form.xi->slash(cusp.matrix());
    return to_rational_series(slashed.series(window)).normalized();
  }
  if (form.eta_theta) {
    if (!cusp.is_infinity()) throw MathError("eta-theta forms are expanded at infinity only: " + form.id);
    return form.eta_theta->series(window);
  }
  throw MathError("no expansion available for " + form.id + " at cusp " + cusp.label());
}

TriSeries expansion_at_infinity(const JacobiForm& form, const Window& window) {
  return cusp_expansion(form, cusps_gamma0(form.level).back(), window);
}

JacobiForm trace_to(const JacobiForm& form, std::int64_t target_level, const std::string& new_id) {
  if (target_level < 1 || form.level % target_level != 0) throw MathError("trace target must divide the level");
  if (!form.xi) throw MathError("trace needs a theta-quotient form: " + form.id);
  if (form.weight_x2 != 0) throw MathError("trace is implemented for weight 0 only");
  XiForm sum;
  for (const auto& m : coset_reps(form.level, target_level)) {
    XiForm part = form.xi->slash(m);
    sum.terms.insert(sum.terms.end(), part.terms.begin(), part.terms.end());
  }
  std::string id = new_id.empty() ? "Tr_" + std::to_string(target_level) + "(" + form.id + ")" : new_id;
  JacobiForm out = make_xi_form(id, "Tr_{Gamma_0(" + std::to_string(target_level) + ")} " + form.formula,
                                target_level, std::move(sum));
  return out;
}

Rational weight2_constant_check(const TriSeries& expansion, const Rational& t) {
  Rational row0(0), l2(0), polar(0);
  for (const auto& [k, c] : expansion.terms()) {
    auto e = expansion.true_exponent(k);
    if (sgn(e.m) != 0) throw MathError("weight-2 check expects an omega-free expansion");
    if (sgn(e.n) == 0) {
      row0 += c;
      l2 += e.l * e.l * c;
    } else if (sgn(e.n) < 0) {
      if (!is_integer(e.n)) throw MathError("weight-2 check expects integral q-exponents");
      polar += Rational(sigma(to_int64(Rational(-e.n)), 1)) * c;
    }
  }
  return t * row0 - 24 * t * polar - 6 * l2;
}

Rational weight2_constant_check(const JacobiForm& form, std::int64_t precision) {
  if (form.level != 1) throw MathError("weight-2 check needs a level-one form");
  return weight2_constant_check(expansion_at_infinity(form, Window::box(std::nullopt, Rational(precision))),
                                form.index());
}

std::int64_t conductor_of(const CharacterId& chi) {
  Phase p = character_value(chi, Mat2::T(1));
  if (p.is_one()) return 1;
  if (Phase::make(1, p.order) != p) throw MathError("character value at T is not e(1/q): " + chi.tag());
  return p.order;
}

JacobiForm make_xi_form(std::string id, std::string formula, std::int64_t level, XiForm xi) {
  JacobiForm f;
  f.id = std::move(id);
  f.formula = std::move(formula);
  f.level = level;
  f.weight_x2 = 0;
  f.index_x2 = xi.index_x2();
  f.weak = true;
  f.xi = std::move(xi);
  return f;
}

JacobiForm make_eta_theta_form(std::string id, std::string formula, std::int64_t level, EtaThetaRecipe recipe) {
  JacobiForm f;
  f.id = std::move(id);
  f.formula = std::move(formula);
  f.level = level;
  Rational w = recipe.weight() * 2, t = recipe.index() * 2;
  f.weight_x2 = to_int64(w);
  f.index_x2 = to_int64(t);
  f.character = CharacterId::eta_quotient_char(level, recipe.eta_exponents());
  f.q_chi = is_integer(recipe.weight()) ? conductor_of(f.character) : 0;
  f.holomorphic = true;
  f.weak = true;
  f.cusp_form = sgn(recipe.order_at_infinity()) > 0;
  f.eta_theta = std::move(recipe);
  return f;
}

namespace {

XiForm xi_product_form(long scalar, std::vector<XiSymbol> factors) {
  XiProduct p{Rational(scalar), Phase{}, std::move(factors)};
  p.normalize();
  return XiForm{{p}};
}

using Factors = std::vector<std::pair<std::int64_t, std::int64_t>>;

JacobiForm eta_theta(std::string id, std::string formula, std::int64_t level, Factors eta, Factors thetas) {
  return make_eta_theta_form(std::move(id), std::move(formula), level, EtaThetaRecipe{EtaProduct{std::move(eta)}, std::move(thetas)});
}

std::map<std::string, JacobiForm> build_registry() {
  std::map<std::string, JacobiForm> r;
  auto add = [&](JacobiForm f) { r.emplace(f.id, std::move(f)); };

  add(make_xi_form("phi2", "4 xi^(2)_{1,0}^2", 2, xi_product_form(4, {make_xi(2, 1, 0), make_xi(2, 1, 0)})));
  add(make_xi_form("phi3", "3 xi^(6)_{3,1} xi^(6)_{3,5}", 3,
                   xi_product_form(3, {make_xi(6, 3, 1), make_xi(6, 3, 5)})));
  add(make_xi_form("phi4", "2 xi^(4)_{2,1} xi^(4)_{2,3}", 4,
                   xi_product_form(2, {make_xi(4, 2, 1), make_xi(4, 2, 3)})));
  add(make_xi_form("psi", "2 xi^(2)_{1,0}(tau, 2z)", 2, xi_product_form(2, {make_xi(2, 1, 0, 2)})));
  add(trace_to(r.at("phi2"), 1, "phi01"));
  add(trace_to(r.at("psi"), 1, "phi02"));

  add(eta_theta("eta9_theta", "eta^9 theta", 1, {{1, 9}}, {{1, 1}}));
  add(eta_theta("eta3_theta", "eta^3 theta", 1, {{1, 3}}, {{1, 1}}));
  add(eta_theta("eta_theta", "eta theta", 1, {{1, 1}}, {{1, 1}}));
  add(eta_theta("nabla3_in", "eta(tau) eta(2tau)^4 theta", 2, {{1, 1}, {2, 4}}, {{1, 1}}));
  add(eta_theta("q1_in", "eta(2tau)^2 / eta(tau) theta", 2, {{1, -1}, {2, 2}}, {{1, 1}}));
  add(eta_theta("nabla2_in", "eta(3tau)^3 theta", 3, {{3, 3}}, {{1, 1}}));
  add(eta_theta("h32", "eta(2tau) eta(4tau)^2 / eta(tau) theta", 4, {{1, -1}, {2, 1}, {4, 2}}, {{1, 1}}));
  add(eta_theta("h32_sq", "(eta(2tau) eta(4tau)^2 / eta(tau) theta)^2", 4, {{1, -2}, {2, 2}, {4, 4}}, {{1, 2}}));
  add(eta_theta("phi2_half", "eta(2tau)^5 / eta(tau) theta(2tau,2z) / theta(tau,z)", 2, {{1, -1}, {2, 5}},
                {{1, -1}, {2, 1}}));
  add(eta_theta("phi2_half_sq", "(eta(2tau)^5 / eta(tau) theta(2tau,2z) / theta(tau,z))^2", 2,
                {{1, -2}, {2, 10}}, {{1, -2}, {2, 2}}));
  add(eta_theta("phi3_1", "eta(3tau)^6 theta(3tau,3z) / theta(tau,z)", 3, {{3, 6}}, {{1, -1}, {3, 1}}));
  add(eta_theta("phi1_half", "eta(2tau) eta(tau) theta(2tau,2z) / theta(tau,z)", 2, {{1, 1}, {2, 1}},
                {{1, -1}, {2, 1}}));
  add(eta_theta("nabla3_in_sq", "eta^2 eta(2tau)^8 theta^2", 2, {{1, 2}, {2, 8}}, {{1, 2}}));
  add(eta_theta("nabla2_in_sq", "eta(3tau)^6 theta^2", 3, {{3, 6}}, {{1, 2}}));
  add(eta_theta("q1_in_sq", "eta(2tau)^4 / eta^2 theta^2", 2, {{1, -2}, {2, 4}}, {{1, 2}}));
  add(eta_theta("q1_in_4", "eta(2tau)^8 / eta^4 theta^4", 2, {{1, -4}, {2, 8}}, {{1, 4}}));
  return r;
}

const std::map<std::string, JacobiForm>& registry() {
  static const std::map<std::string, JacobiForm> r = build_registry();
  return r;
}

}  // namespace

const JacobiForm& registry_form(const std::string& id) {
  auto it = registry().find(id);
  if (it == registry().end()) throw MathError("unknown form id: " + id);
  return it->second;
}

std::vector<std::string> registry_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, f] : registry()) ids.push_back(id);
  return ids;
}

std::string registry_json() {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [id, f] : registry()) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["formula"] = f.formula;
    j["level"] = f.level;
    j["weight_x2"] = f.weight_x2;
    j["index_x2"] = f.index_x2;
    j["character"] = f.character.tag();
    j["q_chi"] = f.q_chi;
    j["kind"] = f.xi ? "theta_quotient" : "eta_theta";
    j["weak"] = f.weak;
    j["holomorphic"] = f.holomorphic;
    j["cusp_form"] = f.cusp_form;
    arr.push_back(j);
  }
  return arr.dump(2);
}

Complex eval_numeric(const std::string& id, Complex tau, Complex z) {
  if (tau.imag() <= 0) throw MathError("evaluation needs Im(tau) > 0");
  if (id == "eta") return eta_numeric(tau);
  if (id == "theta") return theta_numeric(tau, z);
  const JacobiForm& f = registry_form(id);
  if (f.xi) return xi_form_numeric(*f.xi, tau, z);
  return f.eta_theta->numeric(tau, z);
}

}  // namespace ddforms
