#include "ddforms/series.hpp"

#include "json.hpp"

namespace ddforms {

std::string Window::to_string() const {
  auto f = [](const std::optional<Rational>& v) { return v ? v->get_str() : std::string("inf"); };
  return "m<=" + f(max_m) + " n<=" + f(max_n) + " |l|<=" + f(max_abs_l);
}

TriSeries series_mul(const TriSeries& a, const TriSeries& b) { return TriSeries::mul(a, b); }
TriSeries series_div(const TriSeries& a, const TriSeries& b) { return TriSeries::div(a, b); }
TriSeries series_pow_rational(const TriSeries& u, const Rational& alpha) { return u.pow_rational(alpha); }
TriSeries series_rescale(const TriSeries& a, std::int64_t c_tau, std::int64_t c_z, std::int64_t c_omega) {
  return a.rescale(c_tau, c_z, c_omega);
}

TriSeries to_rational_series(const CycloSeries& s) {
  return s.map_coeffs<Rational>([](const Cyclo& c) { return c.to_rational(); });
}

CycloSeries to_cyclo_series(const TriSeries& s) {
  return s.map_coeffs<Cyclo>([](const Rational& c) { return Cyclo(c); });
}

std::string series_to_json(const TriSeries& s) {
  nlohmann::ordered_json j;
  j["den_tau"] = s.dens().tau;
  j["den_z"] = s.dens().z;
  j["den_omega"] = s.dens().omega;
  auto coeffs = nlohmann::ordered_json::array();
  for (const auto& [k, c] : s.terms()) coeffs.push_back({k.n_hat, k.l_hat, k.m_hat, c.get_str()});
  j["coeffs"] = std::move(coeffs);
  return j.dump();
}

TriSeries series_from_json(const std::string& text, const Window& window) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MathError(std::string("malformed series JSON: ") + e.what());
  }
  try {
    Dens d{j.at("den_tau").get<std::int64_t>(), j.at("den_z").get<std::int64_t>(),
           j.at("den_omega").get<std::int64_t>()};
    std::vector<TriSeries::Term> terms;
    for (const auto& row : j.at("coeffs")) {
      if (!row.is_array() || row.size() != 4) throw MathError("series coefficient rows must have four entries");
      terms.push_back({ExponentKey{row[0].get<std::int64_t>(), row[1].get<std::int64_t>(), row[2].get<std::int64_t>()},
                       parse_rational(row[3].get<std::string>())});
    }
    return TriSeries::from_terms(d, window, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw MathError(std::string("malformed series JSON: ") + e.what());
  }
}

}  // namespace ddforms
