#include "ddforms/classification.hpp"

#include "json.hpp"

namespace ddforms {

namespace {

// lhs / k
Rational lhs_per_weight(std::int64_t t, std::int64_t level) {
  if (t < 1 || level < 1) throw MathError("t and N must be positive");
  Rational v(level);
  for (auto p : prime_factors(level)) {
    if (t % p != 0) v *= make_rational(p * p + 1, p * (p + 1));
  }
  v *= t * t;
  for (auto p : prime_factors(t)) v *= make_rational(p * p + 1, p * p);
  return v;
}

}  // namespace

Rational weight_identity_lhs(std::int64_t t, std::int64_t level, std::int64_t k_x2) {
  return make_rational(k_x2, 2) * lhs_per_weight(t, level);
}

Rational weight_identity_rhs(std::int64_t t, std::int64_t m) {
  if (m < 1) throw MathError("multiplicity must be positive");
  return Rational((t > 1 ? 10 : 5) * m);
}

std::vector<Candidate> enumerate_dd_candidates(std::int64_t t_max, std::int64_t n_max, std::int64_t m) {
  if (t_max < 1 || n_max < 1) throw MathError("search bounds must be at least 1");
  std::vector<Candidate> out;
  for (std::int64_t t = 1; t <= t_max; ++t) {
    Rational rhs2 = 2 * weight_identity_rhs(t, m);
    for (std::int64_t n = 1; n <= n_max; ++n) {
      Rational k_x2 = rhs2 / lhs_per_weight(t, n);
      if (is_integer(k_x2) && sgn(k_x2) > 0) out.push_back({t, n, to_int64(k_x2), m});
    }
  }
  return out;
}

std::string candidates_to_json(const std::vector<Candidate>& cs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : cs) arr.push_back({{"t", c.t}, {"N", c.level}, {"k_x2", c.k_x2}, {"m", c.m}});
  return arr.dump();
}

}  // namespace ddforms
