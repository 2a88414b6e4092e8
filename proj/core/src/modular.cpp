#include "ddforms/modular.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ddforms {

Mat2 Mat2::inverse() const {
  if (det() != 1) throw MathError("inverse of a non-unimodular matrix");
  return {d, -b, -c, a};
}

std::string Mat2::to_string() const {
  std::ostringstream os;
  os << "(" << a << " " << b << "; " << c << " " << d << ")";
  return os.str();
}

bool in_gamma0(const Mat2& m, std::int64_t level) { return m.det() == 1 && m.c % level == 0; }

std::string Cusp::label() const {
  if (is_infinity()) return "inf";
  if (f == 0 && e == 1) return "0";
  return std::to_string(f) + "/" + std::to_string(e);
}

Mat2 Cusp::matrix() const {
  if (is_infinity()) return Mat2::identity();
  std::int64_t y = e == 1 ? 0 : inverse_mod(f, e);
  if (y != 0) y -= e;
  std::int64_t x = (f * y - 1) / e;
  return {f, x, e, y};
}

std::vector<Cusp> cusps_gamma0(std::int64_t level) {
  if (level < 1) throw MathError("level must be positive");
  std::vector<Cusp> out;
  for (auto e : divisors(level)) {
    std::int64_t g = gcd64(e, level / e);
    std::int64_t width = level / gcd64(e * e, level);
    for (std::int64_t cls = 0; cls < g; ++cls) {
      if (gcd64(cls, g) != 1) continue;
      std::int64_t f = cls;
      while (gcd64(f, e) != 1) f += g;
      if (e == level) f = 1;
      out.push_back(Cusp{f, e, width, level / e, level});
    }
  }
  return out;
}

std::int64_t gamma0_index(std::int64_t level) {
  std::int64_t r = level;
  for (auto p : prime_factors(level)) r = r / p * (p + 1);
  return r;
}

std::string cusps_to_json(const std::vector<Cusp>& cusps) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : cusps) {
    arr.push_back(nlohmann::ordered_json{{"f", c.f}, {"e", c.e}, {"width", c.width}, {"N_e", c.comp}});
  }
  return arr.dump();
}

std::vector<Mat2> coset_reps(std::int64_t level, std::int64_t parent) {
  if (level < 1 || parent < 1 || level % parent != 0) throw MathError("coset_reps: parent level must divide level");
  std::vector<std::int64_t> units;
  for (std::int64_t u = 1; u <= level; ++u)
    if (gcd64(u, level) == 1) units.push_back(u % level);
  std::set<std::pair<std::int64_t, std::int64_t>> points;
  for (std::int64_t c = 0; c < level; c += parent) {
    for (std::int64_t d = 0; d < level; ++d) {
      if (gcd64(gcd64(c, d), level) != 1) continue;
      std::pair<std::int64_t, std::int64_t> best{level, level};
      for (auto u : units) best = std::min(best, {(u * c) % level, (u * d) % level});
      points.insert(best);
    }
  }
  if (level == 1) points = {{0, 0}};
  std::vector<Mat2> reps;
  for (auto [c, d] : points) {
    if (c == 0) {
      reps.push_back(Mat2::identity());
      continue;
    }
    std::int64_t d0 = d;
    while (gcd64(c, d0) != 1) d0 += level;
    std::int64_t x, y;
    ext_gcd(d0, c, x, y);
    reps.push_back(Mat2{x, -y, c, d0});
  }
  return reps;
}

namespace {

// Index of the coset Gamma_0(level) m in the list of representatives.
std::size_t coset_index(const std::vector<Mat2>& reps, const Mat2& m, std::int64_t level) {
  for (std::size_t i = 0; i < reps.size(); ++i)
    if (in_gamma0(m * reps[i].inverse(), level)) return i;
  throw MathError("coset lookup failed for " + m.to_string());
}

}  // namespace

std::vector<Mat2> gamma0_generators(std::int64_t level) {
  auto reps = coset_reps(level);
  std::vector<Mat2> gens{Mat2::neg_identity(), Mat2::T(1)};
  for (const auto& r : reps) {
    for (const auto& g : {Mat2::S(), Mat2::T(1)}) {
      Mat2 rg = r * g;
      Mat2 h = rg * reps[coset_index(reps, rg, level)].inverse();
      if (h == Mat2::identity() || h == Mat2::neg_identity()) continue;
      if (std::find(gens.begin(), gens.end(), h) == gens.end()) gens.push_back(h);
    }
  }
  return gens;
}

BigInt index_paramodular(std::int64_t t, std::int64_t level) {
  if (t < 1 || level < 1) throw MathError("index_paramodular needs positive t and N");
  Rational r = Rational(BigInt(t) * level) * Rational(BigInt(t) * level) * Rational(BigInt(t) * level);
  for (auto p : prime_factors(t * level)) {
    r *= Rational(p + 1, p);
    r *= Rational(p * p + 1, p * p);
  }
  for (auto p : prime_factors(gcd64(t, level))) r *= Rational(p + 1, p);
  if (!is_integer(r)) throw MathError("paramodular index is not integral");
  return r.get_num();
}

std::vector<Gen> st_decompose(const Mat2& m0) {
  if (m0.det() != 1) throw MathError("st_decompose needs a matrix of determinant 1");
  std::vector<Gen> word;
  Mat2 m = m0;
  auto emit_t = [&](std::int64_t q) {
    for (std::int64_t i = 0; i < q; ++i) word.push_back(Gen::T);
    for (std::int64_t i = 0; i > q; --i) word.push_back(Gen::Tinv);
  };
  // M = T^q S M'' with q = floor(a/c), M'' = (c d; -(a - qc) -(b - qd))
  while (m.c != 0) {
    std::int64_t q = floor_div(m.a, m.c);
    emit_t(q);
    word.push_back(Gen::S);
    std::int64_t a1 = m.a - q * m.c, b1 = m.b - q * m.d;
    m = Mat2{m.c, m.d, -a1, -b1};
  }
  if (m.a == 1) {
    emit_t(m.b);
  } else {
    word.push_back(Gen::NegI);
    emit_t(-m.b);
  }
  return word;
}

Mat2 word_product(const std::vector<Gen>& word) {
  Mat2 m = Mat2::identity();
  for (auto g : word) {
    switch (g) {
      case Gen::S: m = m * Mat2::S(); break;
      case Gen::T: m = m * Mat2::T(1); break;
      case Gen::Tinv: m = m * Mat2::T(-1); break;
      case Gen::NegI: m = m * Mat2::neg_identity(); break;
    }
  }
  return m;
}

std::string word_to_string(const std::vector<Gen>& word) {
  std::string s;
  for (auto g : word) {
    if (!s.empty()) s += " ";
    switch (g) {
      case Gen::S: s += "S"; break;
      case Gen::T: s += "T"; break;
      case Gen::Tinv: s += "T^-1"; break;
      case Gen::NegI: s += "-I"; break;
    }
  }
  return s.empty() ? "1" : s;
}

Rational EtaProduct::weight() const {
  Rational w = 0;
  for (auto [d, e] : factors) w += e;
  return w / 2;
}

Rational EtaProduct::order_at_infinity() const {
  Rational o = 0;
  for (auto [d, e] : factors) o += make_rational(d * e, 24);
  return o;
}

Rational eta_order_at_cusp(const EtaProduct& p, std::int64_t cusp_a, std::int64_t cusp_c) {
  if (gcd64(cusp_a, cusp_c) != 1) throw MathError("cusp must be in lowest terms");
  Rational o = 0;
  for (auto [d, e] : p.factors) {
    std::int64_t g = gcd64(cusp_c, d);
    o += make_rational(e * g * g, 24 * d);
  }
  return o;
}

TriSeries eta_product_qexpansion(const EtaProduct& p, const Window& window) {
  if (!window.max_n) throw MathError("eta expansion needs a bounded tau-window");
  Rational lead = p.order_at_infinity();
  Window inner = window;
  inner.max_n = *window.max_n - lead;
  inner.max_m.reset();
  TriSeries s = TriSeries::one(inner).with_dens(Dens{24, 1, 1});
  if (sgn(*inner.max_n) >= 0) {
    std::int64_t bound = to_int64(floor_rational(*inner.max_n));
    for (auto [d, e] : p.factors) {
      if (d <= 0) throw MathError("eta scale must be positive");
      for (std::int64_t n = 1; d * n <= bound; ++n) s = s.mul_binomial_factor(ExponentKey{24 * d * n, 0, 0}, Rational(1), e);
    }
  }
  TriSeries shift = TriSeries::monomial(Rational(1), lead, Rational(0), Rational(0));
  return series_mul(s, shift).truncated(window);
}

TriSeries eta_qexpansion(std::int64_t d, const Window& window) { return eta_product_qexpansion(EtaProduct{{{d, 1}}}, window); }

Rational dedekind_sum(std::int64_t h, std::int64_t k) {
  if (k <= 0) throw MathError("dedekind_sum needs k > 0");
  // s(h,k) = sum_{r=1}^{k-1} ((r/k)) ((hr/k)), each term (2r-k)(2m-k)/(4k^2)
  BigInt acc = 0;
  for (std::int64_t r = 1; r < k; ++r) {
    std::int64_t m = mod64(h * r, k);
    if (m == 0) continue;
    acc += BigInt(2 * r - k) * BigInt(2 * m - k);
  }
  Rational s(acc, BigInt(4) * k * k);
  s.canonicalize();
  return s;
}

std::int64_t eta_multiplier(const Mat2& m) {
  if (m.det() != 1) throw MathError("eta_multiplier needs a matrix of determinant 1");
  if (m.c == 0) {
    if (m.a == 1) return mod64(m.b, 24);
    return mod64(18 - m.b, 24);
  }
  if (m.c < 0) return mod64(eta_multiplier(-m) + 6, 24);
  Rational x = make_rational(m.a + m.d, m.c) - 12 * dedekind_sum(m.d, m.c) - 3;
  x.canonicalize();
  if (!is_integer(x)) throw MathError("eta multiplier exponent is not integral");
  return mod64(to_int64(x), 24);
}

CharacterId CharacterId::named(Kind k) {
  CharacterId c;
  c.kind = k;
  switch (k) {
    case Kind::chi2_2:
    case Kind::chi4_2:
    case Kind::chi4_level2_t2:
    case Kind::chi2_b: c.level = 2; break;
    case Kind::chi2_3: c.level = 3; break;
    case Kind::chi2_4: c.level = 4; break;
    default: throw MathError("character kind needs parameters");
  }
  return c;
}

CharacterId CharacterId::eta_power_char(std::int64_t n) {
  CharacterId c;
  c.kind = Kind::eta_power;
  c.eta_exp = n;
  return c;
}

CharacterId CharacterId::eta_quotient_char(std::int64_t level, std::vector<std::pair<std::int64_t, std::int64_t>> exps) {
  CharacterId c;
  c.kind = Kind::eta_quotient;
  c.level = level;
  for (auto [d, e] : exps) {
    if (level % d != 0) throw MathError("eta quotient scale must divide the level");
  }
  c.eta_exps = std::move(exps);
  return c;
}

CharacterId CharacterId::dirichlet_kronecker(std::int64_t disc, std::int64_t modulus) {
  std::vector<int> v(static_cast<std::size_t>(modulus));
  for (std::int64_t n = 0; n < modulus; ++n) v[static_cast<std::size_t>(n)] = gcd64(n, modulus) == 1 ? kronecker(disc, n) : 0;
  return dirichlet_values(modulus, std::move(v));
}

CharacterId CharacterId::dirichlet_values(std::int64_t modulus, std::vector<int> values) {
  if (modulus < 1 || static_cast<std::int64_t>(values.size()) != modulus) throw MathError("bad Dirichlet character table");
  CharacterId c;
  c.kind = Kind::dirichlet;
  c.level = modulus;
  c.values = std::move(values);
  return c;
}

std::string CharacterId::tag() const {
  switch (kind) {
    case Kind::trivial: return "trivial";
    case Kind::chi2_2: return "chi2_2";
    case Kind::chi4_2: return "chi4_2";
    case Kind::chi2_3: return "chi2_3";
    case Kind::chi2_4: return "chi2_4";
    case Kind::chi4_level2_t2: return "chi4_level2_t2";
    case Kind::chi2_b: return "chi2_b";
    case Kind::eta_power: return "eta_power(" + std::to_string(eta_exp) + ")";
    case Kind::eta_quotient: {
      std::string s = "eta_quotient(";
      for (std::size_t i = 0; i < eta_exps.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(eta_exps[i].first) + "^" + std::to_string(eta_exps[i].second);
      }
      return s + ")";
    }
    case Kind::dirichlet: {
      std::string s = "dirichlet(" + std::to_string(level) + ";";
      for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
      return s + ")";
    }
  }
  return "unknown";
}

int dirichlet_value(const CharacterId& chi, std::int64_t n) {
  if (chi.kind == CharacterId::Kind::trivial) return 1;
  if (chi.kind != CharacterId::Kind::dirichlet) throw MathError("not a Dirichlet character");
  return chi.values[static_cast<std::size_t>(mod64(n, chi.level))];
}

Phase character_value(const CharacterId& chi, const Mat2& m) {
  using K = CharacterId::Kind;
  if (m.det() != 1) throw MathError("character_value needs a unimodular matrix");
  if (m.c % chi.level != 0) {
    throw MathError("matrix " + m.to_string() + " is outside Gamma_0(" + std::to_string(chi.level) + ")");
  }
  switch (chi.kind) {
    case K::trivial: return Phase{0, 1};
    case K::chi2_2: return Phase::make(m.b - m.c / 2, 2);
    case K::chi4_2: return Phase::make(m.d * (m.b - m.c / 2), 4);
    case K::chi2_3: {
      int leg = kronecker(-3, m.d);
      std::int64_t c = m.c / 3;
      std::int64_t par = mod64(c, 2) == 1 ? m.a + m.d + 1 : m.b;
      return Phase::make(par, 2) * Phase::make(leg == 1 ? 0 : 1, 2);
    }
    case K::chi2_4: return Phase::make((m.d - 1) / 2, 2);
    case K::chi4_level2_t2: return Phase::make(m.b * m.d + m.d - 1, 4);
    case K::chi2_b: return Phase::make(m.b, 2);
    case K::eta_power: return Phase::make(chi.eta_exp * eta_multiplier(m), 24);
    case K::eta_quotient: {
      std::int64_t x = 0;
      for (auto [d, e] : chi.eta_exps) {
        Mat2 md{m.a, d * m.b, m.c / d, m.d};
        x += e * eta_multiplier(md);
      }
      return Phase::make(x, 24);
    }
    case K::dirichlet: {
      int v = dirichlet_value(chi, m.d);
      if (v == 0) throw MathError("Dirichlet character vanishes on the lower-right entry");
      return Phase::make(v == 1 ? 0 : 1, 2);
    }
  }
  throw MathError("unknown character kind");
}

Mat2 sigma_a(std::int64_t a, std::int64_t modulus) {
  if (modulus < 1) throw MathError("sigma_a modulus must be positive");
  if (gcd64(a, modulus) != 1) {
    throw MathError("sigma_a: " + std::to_string(a) + " is not coprime to " + std::to_string(modulus));
  }
  std::int64_t m2 = modulus * modulus;
  std::int64_t alpha = m2 == 1 ? 0 : inverse_mod(mod64(a, m2), m2);
  std::int64_t w = (alpha * a - 1) / m2;
  return Mat2{alpha, modulus * w, modulus, a};
}

bool dirichlet_is_primitive(const CharacterId& chi) {
  if (chi.kind == CharacterId::Kind::trivial) return true;
  if (chi.kind != CharacterId::Kind::dirichlet) throw MathError("not a Dirichlet character");
  std::int64_t n = chi.level;
  if (n == 1) return true;
  for (auto d : divisors(n)) {
    if (d == n) continue;
    bool induced = true;
    for (std::int64_t x = 1; x < n && induced; ++x) {
      if (gcd64(x, n) == 1 && x % d == 1 % d && dirichlet_value(chi, x) != 1) induced = false;
    }
    if (induced) return false;
  }
  return true;
}

Rational bernoulli_number(unsigned k) {
  static std::vector<Rational> cache{Rational(1)};
  while (cache.size() <= k) {
    unsigned m = static_cast<unsigned>(cache.size());
    Rational s = 0;
    for (unsigned j = 0; j < m; ++j) s += binomial(Rational(m + 1), j) * cache[j];
    cache.push_back(-s / (m + 1));
  }
  return cache[k];
}

Rational generalized_bernoulli(unsigned k, const CharacterId& chi) {
  // k! [t^k] sum_a chi(a) e^{at} * (1/f) sum_j B_j (f t)^j / j!
  std::int64_t f = chi.kind == CharacterId::Kind::trivial ? 1 : chi.level;
  Rational total = 0;
  for (std::int64_t a = 1; a <= f; ++a) {
    int ca = dirichlet_value(chi, a);
    if (ca == 0) continue;
    Rational inner = 0;
    for (unsigned j = 0; j <= k; ++j) {
      BigInt apow, fpow;
      mpz_ui_pow_ui(apow.get_mpz_t(), static_cast<unsigned long>(a), k - j);
      mpz_ui_pow_ui(fpow.get_mpz_t(), static_cast<unsigned long>(f), j);
      inner += binomial(Rational(k), j) * Rational(apow) * bernoulli_number(j) * Rational(fpow);
    }
    total += ca * inner / f;
  }
  return total;
}

TriSeries eisenstein_qexpansion(unsigned k, const CharacterId& chi, const Window& window) {
  if (k < 1) throw MathError("Eisenstein weight must be positive");
  if (!window.max_n) throw MathError("Eisenstein expansion needs a bounded tau-window");
  if (!dirichlet_is_primitive(chi)) throw MathError("Eisenstein series needs a primitive character");
  int parity = dirichlet_value(chi, -1);
  if (parity != ((k % 2 == 0) ? 1 : -1)) throw MathError("character parity does not match the weight");
  std::vector<TriSeries::Term> terms;
  terms.push_back({ExponentKey{0, 0, 0}, -generalized_bernoulli(k, chi) / (2 * k)});
  std::int64_t bound = to_int64(floor_rational(*window.max_n));
  for (std::int64_t n = 1; n <= bound; ++n) {
    BigInt s = 0;
    for (auto a : divisors(n)) {
      int ca = dirichlet_value(chi, a);
      if (ca == 0) continue;
      BigInt p;
      mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(a), k - 1);
      s += ca * p;
    }
    terms.push_back({ExponentKey{n, 0, 0}, Rational(s)});
  }
  return TriSeries::from_terms(Dens{1, 1, 1}, window, std::move(terms));
}

}  // namespace ddforms
