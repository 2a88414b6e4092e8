#include "ddforms/lift.hpp"

#include <cmath>
#include <map>

#include "json.hpp"

namespace ddforms {

namespace {

std::optional<std::string> opt_str(const std::optional<Rational>& v) {
  return v ? std::optional<std::string>(v->get_str()) : std::nullopt;
}

std::optional<Rational> opt_rat(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return parse_rational(j.at(key).get<std::string>());
}

BigInt int_pow(std::int64_t a, std::int64_t e) {
  BigInt p;
  mpz_pow_ui(p.get_mpz_t(), BigInt(a).get_mpz_t(), static_cast<unsigned long>(e));
  return p;
}

int legendre3(std::int64_t a) {
  switch (mod64(a, 3)) {
    case 1: return 1;
    case 2: return -1;
    default: return 0;
  }
}

std::int64_t isqrt_exact(std::int64_t v) {
  if (v < 0) return -1;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r * r == v ? r : -1;
}

Dens lift_dens(const TriSeries& s, std::int64_t q) {
  const Dens& d = s.dens();
  return Dens{lcm64(d.tau, q), lcm64(d.z, 2), lcm64(d.omega, 2)};
}

}  // namespace

std::string siegel_to_json(const SiegelForm& f) {
  nlohmann::ordered_json j;
  j["id"] = f.id;
  j["t"] = f.t;
  j["N"] = f.level;
  j["plus"] = f.plus;
  j["weight_x2"] = f.weight_x2;
  j["character"] = f.character;
  const Window& w = f.series.window();
  nlohmann::ordered_json win;
  win["max_omega"] = opt_str(w.max_m) ? nlohmann::ordered_json(*opt_str(w.max_m)) : nlohmann::ordered_json(nullptr);
  win["max_tau"] = opt_str(w.max_n) ? nlohmann::ordered_json(*opt_str(w.max_n)) : nlohmann::ordered_json(nullptr);
  win["max_abs_z"] =
      opt_str(w.max_abs_l) ? nlohmann::ordered_json(*opt_str(w.max_abs_l)) : nlohmann::ordered_json(nullptr);
  j["window"] = win;
  j["series"] = nlohmann::ordered_json::parse(series_to_json(f.series));
  return j.dump();
}

SiegelForm siegel_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    SiegelForm f;
    f.id = j.value("id", std::string());
    f.t = j.at("t").get<std::int64_t>();
    f.level = j.at("N").get<std::int64_t>();
    f.plus = j.value("plus", true);
    f.weight_x2 = j.at("weight_x2").get<std::int64_t>();
    f.character = j.value("character", std::string());
    Window w;
    if (j.contains("window")) {
      const auto& win = j.at("window");
      w.max_m = opt_rat(win, "max_omega");
      w.max_n = opt_rat(win, "max_tau");
      w.max_abs_l = opt_rat(win, "max_abs_z");
    }
    f.series = series_from_json(j.at("series").dump(), w);
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw MathError(std::string("malformed Siegel form JSON: ") + e.what());
  }
}

Window siegel_window(const Rational& max_omega, std::int64_t t) {
  if (t <= 0) throw MathError("paramodular level must be positive");
  return Window::box(max_omega, max_omega / t);
}

TriSeries hecke_tminus(const JacobiForm& phi, std::int64_t m, const Window& window) {
  if (m <= 0) throw MathError("Hecke index must be positive");
  if (phi.weight_x2 % 2 != 0) throw MathError("Hecke operator T_-(m) needs integral weight");
  const std::int64_t q = phi.q_chi;
  if (q <= 0) throw MathError("form has no character conductor: " + phi.id);
  if (gcd64(m, q) != 1) throw MathError("T_-(m) needs m coprime to q");
  if (phi.index_x2 % 2 != 0 && m % 2 == 0) throw MathError("T_-(m) needs odd m for half-integral index");
  if (!window.max_n) throw MathError("T_-(m) needs a bounded tau-window");
  const std::int64_t k = phi.weight_x2 / 2;
  const std::int64_t nq = phi.level * q;

  TriSeries input = expansion_at_infinity(phi, Window::box(std::nullopt, *window.max_n * m));
  const Dens din = input.dens();
  // a d = m; output (nu a / d, lambda a), sum over b mod d keeps the terms with d | nu q
  std::map<ExponentKey, Cyclo> acc;
  for (auto a : divisors(m)) {
    if (gcd64(a, nq) != 1) continue;
    std::int64_t d = m / a;
    Cyclo weight = Cyclo(Rational(int_pow(a, k - 1))) * Cyclo::from_phase(character_value(phi.character, sigma_a(a, nq)));
    for (const auto& [key, c] : input.terms()) {
      Rational nu_q = make_rational(key.n_hat * q, din.tau);
      if (!is_integer(nu_q)) throw MathError("input exponent is not in (1/q)Z: " + phi.id);
      if (to_int64(nu_q) % d != 0) continue;
      ExponentKey out{key.n_hat * a * a, key.l_hat * a, 0};
      auto [it, fresh] = acc.try_emplace(out, weight * Cyclo(c));
      if (!fresh) it->second += weight * Cyclo(c);
    }
  }
  std::vector<TriSeries::Term> terms;
  for (auto& [key, c] : acc) terms.push_back({key, c.to_rational()});
  Window w = window;
  w.max_m.reset();
  return TriSeries::from_terms(Dens{din.tau * m, din.z, 1}, w, std::move(terms)).normalized();
}

SiegelForm arithmetic_lift(const JacobiForm& phi, std::int64_t mu, const Window& window) {
  if (!phi.holomorphic) throw MathError("the lift needs a holomorphic Jacobi form: " + phi.id);
  if (phi.weight_x2 % 2 != 0) throw MathError("the lift needs integral weight: " + phi.id);
  if (!window.max_m || !window.max_n) throw MathError("the lift needs bounded tau- and omega-windows");
  const std::int64_t q = phi.q_chi;
  if (q <= 0 || 24 % q != 0) throw MathError("character conductor must divide 24: " + phi.id);
  Rational qt = phi.index() * q;
  if (!is_integer(qt)) throw MathError("q t must be integral: " + phi.id);
  if (gcd64(mu, q) != 1) throw MathError("mu must be a unit mod q");
  const std::int64_t k = phi.weight_x2 / 2;
  const Rational t = phi.index();

  Window tau_only = Window::box(std::nullopt, *window.max_n);
  TriSeries head = expansion_at_infinity(phi, Window::box(std::nullopt, Rational(0)));
  Rational c00 = head.coeff(Rational(0), Rational(0), Rational(0));

  TriSeries result(Dens{q, 2, 2}, window);
  if (sgn(c00) != 0) {
    if (q != 1) throw MathError("c(0,0) != 0 is only covered for q = 1: " + phi.id);
    CharacterId chi_n;
    if (phi.character.kind == CharacterId::Kind::dirichlet) {
      chi_n = phi.character;
    } else if (phi.character.kind == CharacterId::Kind::trivial && phi.level == 1) {
      chi_n = CharacterId::dirichlet_values(1, {1});
    } else {
      throw MathError("Eisenstein branch needs a character induced by a primitive Dirichlet character");
    }
    result = result + eisenstein_qexpansion(static_cast<unsigned>(k), chi_n, tau_only).scaled(c00).truncated(window);
  }
  for (std::int64_t m = 1; Rational(m * t) <= *window.max_m; ++m) {
    if (mod64(m - mu, q) != 0) continue;
    TriSeries slice = hecke_tminus(phi, m, tau_only);
    result = result + slice.times_s(m * t).truncated(window);
  }
  result = result.truncated(window).normalized();
  result = result.with_dens(lift_dens(result, q));

  SiegelForm f;
  f.id = "Lift(" + phi.id + ")";
  f.t = to_int64(qt);
  f.level = phi.level;
  f.weight_x2 = phi.weight_x2;
  f.character = "chi_{t,mu} from " + phi.character.tag() + ", mu=" + std::to_string(mu);
  f.series = std::move(result);
  return f;
}

SiegelForm arithmetic_lift(const LiftSpec& spec) {
  const JacobiForm& phi = registry_form(spec.form_id);
  if (phi.q_chi <= 0) throw MathError("form cannot be lifted: " + spec.form_id);
  Rational qt = phi.index() * phi.q_chi;
  if (!is_integer(qt)) throw MathError("q t must be integral: " + spec.form_id);
  Window w = siegel_window(spec.max_omega, to_int64(qt));
  if (spec.max_tau) w.max_n = *spec.max_tau;
  return arithmetic_lift(phi, spec.mu, w);
}

SiegelForm closed_form_oracle(ClosedForm which, const Window& window) {
  if (!window.max_m || !window.max_n) throw MathError("closed-form oracle needs bounded tau- and omega-windows");
  SiegelForm f;
  std::vector<TriSeries::Term> terms;
  if (which == ClosedForm::nabla2) {
    // q^{n/2} r^{l/2} s^{m/2}, n, m odd, 3 N^2 = 4 m n - l^2.
    // The a-term is a (a/3) c(nm/a^2, l/a) and |c(nm/a^2, l/a)| = N/a, so the divisor weight is (a/3).
    std::int64_t nmax = to_int64(floor_rational(*window.max_n * 2));
    std::int64_t mmax = to_int64(floor_rational(*window.max_m * 2));
    for (std::int64_t m = 1; m <= mmax; m += 2) {
      for (std::int64_t n = 1; n <= nmax; n += 2) {
        for (std::int64_t l = -2 * n * m; l <= 2 * n * m; ++l) {
          std::int64_t rest = 4 * m * n - l * l;
          if (rest <= 0 || rest % 3 != 0) continue;
          std::int64_t big_n = isqrt_exact(rest / 3);
          if (big_n <= 0) continue;
          int sym = kronecker(-4, big_n * l);
          if (sym == 0) continue;
          std::int64_t g = gcd64(gcd64(l, m), n);
          std::int64_t inner = 0;
          for (auto a : divisors(g)) inner += legendre3(a);
          if (inner == 0) continue;
          terms.push_back({ExponentKey{n, l, m}, Rational(big_n * sym * inner)});
        }
      }
    }
    f.id = "nabla2 closed formula";
    f.t = 1;
    f.level = 3;
    f.weight_x2 = 4;
    f.series = TriSeries::from_terms(Dens{2, 2, 2}, window, std::move(terms));
  } else {
    // q^{n/4} r^{l/2} s^{m/2}, n, m = 1 mod 4, l odd, (2N+1)^2 = 2 m n - l^2 with N >= 0.
    std::int64_t nmax = to_int64(floor_rational(*window.max_n * 4));
    std::int64_t mmax = to_int64(floor_rational(*window.max_m * 2));
    for (std::int64_t m = 1; m <= mmax; m += 4) {
      for (std::int64_t n = 1; n <= nmax; n += 4) {
        for (std::int64_t l = -2 * n * m - 1; l <= 2 * n * m + 1; l += 2) {
          if (mod64(l, 2) != 1) continue;
          std::int64_t rest = 2 * m * n - l * l;
          std::int64_t root = isqrt_exact(rest);
          if (root <= 0 || root % 2 != 1) continue;
          // chi(sigma_a) = 1 and (-4/(l/a)) = (-4/l)(-4/a), so the divisor weight is (-4/a)
          std::int64_t g = gcd64(gcd64(n, l), m);
          std::int64_t inner = 0;
          for (auto a : divisors(g)) inner += kronecker(-4, a);
          if (inner == 0) continue;
          terms.push_back({ExponentKey{n, l, m}, Rational(kronecker(-4, l) * inner)});
        }
      }
    }
    f.id = "Q1 closed formula";
    f.t = 2;
    f.level = 2;
    f.weight_x2 = 2;
    f.series = TriSeries::from_terms(Dens{4, 2, 2}, window, std::move(terms));
  }
  return f;
}

TriSeries fourier_jacobi_slice(const SiegelForm& f, std::int64_t m_hat) { return f.series.slice_omega(m_hat); }

bool vt_symmetry_check(const TriSeries& s, std::int64_t t) {
  if (t <= 0) throw MathError("paramodular level must be positive");
  for (const auto& [k, c] : s.terms()) {
    auto e = s.true_exponent(k);
    Rational x = e.m / t, w = e.n * t;
    if (!s.in_window(x, e.l, w)) continue;
    Rational sn = x * s.dens().tau, so = w * s.dens().omega;
    if (!is_integer(sn) || !is_integer(so)) return false;
    if (s.coeff(x, e.l, w) != c) return false;
  }
  return true;
}

bool vt_symmetry_check(const SiegelForm& f) { return vt_symmetry_check(f.series, f.t); }

}  // namespace ddforms
