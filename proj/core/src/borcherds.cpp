#include "ddforms/borcherds.hpp"

#include <map>
#include <numeric>
#include <tuple>

#include "json.hpp"

namespace ddforms {

Rational CuspTable::c(const Rational& n, const Rational& l) const { return expansion.coeff(n, l, Rational(0)); }

namespace {

// (1 - X)^e with X a monomial of positive (n, m) grade, in scaled units.
struct Factor {
  ExponentKey x;
  Rational e;
};

// (1 - r^{l})^e with l < 0 and e a non-negative integer.
struct RowFactor {
  std::int64_t l_hat;
  std::int64_t e;
};

std::int64_t grade(const ExponentKey& k) { return k.n_hat + k.m_hat; }

// exp(sum e log(1 - X)) on n_hat <= nmax, m_hat <= mmax, by w F_k = sum_j w(j) L_j F_{k-j} with w = n_hat + m_hat.
TriSeries exp_of_factors(const std::vector<Factor>& factors, const Dens& d, std::int64_t nmax, std::int64_t mmax) {
  std::map<ExponentKey, Rational> log_terms;
  for (const auto& f : factors) {
    if (sgn(f.e) == 0) continue;
    for (std::int64_t k = 1;; ++k) {
      ExponentKey kx{f.x.n_hat * k, f.x.l_hat * k, f.x.m_hat * k};
      if (kx.n_hat > nmax || kx.m_hat > mmax) break;
      Rational v = f.e / k;
      log_terms[kx] -= v;
    }
  }
  std::vector<std::pair<ExponentKey, Rational>> log_w;  // w(j) L_j
  for (auto& [k, v] : log_terms) {
    if (sgn(v) != 0) log_w.emplace_back(k, Rational(v * grade(k)));
  }

  using Slot = std::tuple<std::int64_t, ExponentKey>;
  std::map<Slot, Rational> pending;
  pending[{0, ExponentKey{}}] = Rational(1);
  std::vector<TriSeries::Term> out;
  while (!pending.empty()) {
    auto node = pending.extract(pending.begin());
    auto [w, key] = node.key();
    Rational value = w == 0 ? node.mapped() : Rational(node.mapped() / w);
    if (sgn(value) == 0) continue;
    for (const auto& [j, lw] : log_w) {
      ExponentKey nk = key + j;
      if (nk.n_hat > nmax || nk.m_hat > mmax) continue;
      pending[{w + grade(j), nk}] += lw * value;
    }
    out.emplace_back(key, std::move(value));
  }
  Window w = Window::box(make_rational(mmax, d.omega), make_rational(nmax, d.tau));
  return TriSeries::from_terms(d, w, std::move(out));
}

// q^A r^B s^C * prod rows * exp(factors), truncated to the window.
TriSeries assemble(const Rational& A, const Rational& B, const Rational& C, const std::vector<Factor>& factors,
                   const std::vector<RowFactor>& rows, const Dens& d, const Window& window) {
  Rational nb = *window.max_n - A, mb = *window.max_m - C;
  if (sgn(nb) < 0 || sgn(mb) < 0) return TriSeries(Dens{}, window);
  // refine the grid so the exp window ends exactly at (nb, mb)
  const std::int64_t ft = to_int64(Rational(BigInt(Rational(nb * d.tau).get_den())));
  const std::int64_t fo = to_int64(Rational(BigInt(Rational(mb * d.omega).get_den())));
  const Dens fine{d.tau * ft, d.z, d.omega * fo};
  std::vector<Factor> refined;
  refined.reserve(factors.size());
  for (const auto& f : factors) refined.push_back({ExponentKey{f.x.n_hat * ft, f.x.l_hat, f.x.m_hat * fo}, f.e});
  TriSeries body = exp_of_factors(refined, fine, to_int64(Rational(nb * fine.tau)), to_int64(Rational(mb * fine.omega)));
  TriSeries poly = TriSeries::one().with_dens(d);
  for (const auto& r : rows) {
    TriSeries base = TriSeries::one().with_dens(d) -
                     TriSeries::from_terms(d, Window::unbounded(), {{ExponentKey{0, r.l_hat, 0}, Rational(1)}});
    poly = series_mul(poly, base.pow_int(r.e));
  }
  TriSeries lead = TriSeries::monomial(Rational(1), A, B, C);
  TriSeries result = series_mul(series_mul(lead, poly), body);
  if (!(result.window().intersect(window) == window)) {
    throw MathError("product window " + result.window().to_string() + " does not cover " + window.to_string());
  }
  return result.truncated(window).normalized();
}

std::map<Rational, std::vector<std::pair<Rational, Rational>>> rows_by_n(const TriSeries& s) {
  std::map<Rational, std::vector<std::pair<Rational, Rational>>> rows;
  for (const auto& [k, c] : s.terms()) {
    auto e = s.true_exponent(k);
    rows[e.n].emplace_back(e.l, c);
  }
  return rows;
}

void require_window(const Window& w) {
  if (!w.max_m || !w.max_n) throw MathError("the product needs bounded tau- and omega-windows");
  if (w.max_abs_l) throw MathError("the product needs an unbounded z-window");
}

std::int64_t scaled_int(const Rational& v, std::int64_t den, const char* what) {
  Rational s = v * den;
  if (!is_integer(s)) throw MathError(std::string("exponent not representable: ") + what);
  return to_int64(s);
}

void check_integral(const TriSeries& s, const std::string& what) {
  for (const auto& [k, c] : s.terms()) {
    if (!is_integer(c)) {
      auto e = s.true_exponent(k);
      throw MathError(what + " has a non-integral coefficient " + c.get_str() + " at (" + e.n.get_str() + ", " +
                      e.l.get_str() + ", " + e.m.get_str() + ")");
    }
  }
}

std::int64_t order_of(const Rational& x) {
  Rational frac = x - Rational(floor_rational(x));
  return to_int64(Rational(BigInt(frac.get_den())));
}

}  // namespace

BorcherdsInput collect_cusp_data(const JacobiForm& form, const Rational& max_n) {
  if (form.weight_x2 != 0) throw MathError("Borcherds input must have weight 0: " + form.id);
  if (!form.xi && form.stored.empty()) throw MathError("no cusp expansions available for " + form.id);
  BorcherdsInput in;
  in.form_id = form.id;
  in.level = form.level;
  in.t = form.index();
  in.max_n = max_n;
  Window w = Window::box(std::nullopt, max_n);
  for (const auto& c : cusps_gamma0(form.level)) {
    CuspTable tab;
    tab.cusp = c;
    tab.h = c.width;
    tab.n_e = form.level / c.e;
    tab.expansion = cusp_expansion(form, c, w);
    in.cusps.push_back(std::move(tab));
  }
  return in;
}

BorcherdsInput collect_cusp_data(const std::string& form_id, const Rational& max_n) {
  return collect_cusp_data(registry_form(form_id), max_n);
}

std::vector<IntegralityViolation> integrality_check(const BorcherdsInput& input) {
  std::vector<IntegralityViolation> out;
  for (const auto& tab : input.cusps) {
    for (const auto& [k, c] : tab.expansion.terms()) {
      auto e = tab.expansion.true_exponent(k);
      if (4 * e.n * input.t - e.l * e.l > 0) continue;
      Rational v = tab.multiplicity() * c;
      if (!is_integer(v)) out.push_back({tab.cusp.label(), e.n, e.l, v});
    }
  }
  return out;
}

WeylData weyl_data(const BorcherdsInput& input) {
  WeylData w;
  Rational k2(0);
  for (const auto& tab : input.cusps) {
    for (const auto& [key, c] : tab.expansion.terms()) {
      auto e = tab.expansion.true_exponent(key);
      if (sgn(e.n) == 0) {
        w.A += tab.h * c;
        if (sgn(e.l) > 0) w.B += e.l * tab.h * c;
        w.C += e.l * e.l * tab.h * c;
        if (sgn(e.l) == 0) k2 += tab.multiplicity() * c;
      } else if (sgn(e.n) < 0 && is_integer(e.n)) {
        std::int64_t minus_n = to_int64(Rational(-e.n));
        if (sgn(e.l) == 0) w.D0 += tab.multiplicity() * Rational(sigma(minus_n, 0)) * c;
        w.D1 += tab.h * Rational(sigma(minus_n, 1)) * c;
      }
    }
  }
  w.A /= 24;
  w.B /= 2;
  w.C /= 4;
  if (!is_integer(k2)) throw MathError("weight is not in (1/2)Z for " + input.form_id);
  w.k_x2 = to_int64(k2);
  return w;
}

std::string weyl_to_json(const WeylData& w) {
  nlohmann::ordered_json j;
  j["A"] = w.A.get_str();
  j["B"] = w.B.get_str();
  j["C"] = w.C.get_str();
  j["weight_x2"] = w.k_x2;
  if (is_integer(w.D0)) {
    j["D0"] = to_int64(w.D0);
  } else {
    j["D0"] = w.D0.get_str();
  }
  j["D1"] = w.D1.get_str();
  return j.dump();
}

SiegelForm borcherds_expand(const BorcherdsInput& input, const Window& window) {
  require_window(window);
  if (auto bad = integrality_check(input); !bad.empty()) {
    const auto& v = bad.front();
    throw MathError("integrality fails at cusp " + v.cusp + ", (n, l) = (" + v.n.get_str() + ", " + v.l.get_str() +
                    "): " + v.value.get_str());
  }
  for (const auto& tab : input.cusps) {
    for (const auto& [k, c] : tab.expansion.terms()) {
      if (k.n_hat < 0) {
        throw MathError("input has polar terms at cusp " + tab.cusp.label() +
                        "; only weak inputs are expanded");
      }
    }
  }
  const WeylData wd = weyl_data(input);
  const Rational nb = *window.max_n - wd.A, mb = *window.max_m - wd.C;
  const Rational& t = input.t;

  Dens d{1, 1, to_int64(Rational(BigInt(t.get_den())))};
  for (const auto& tab : input.cusps) d.z = lcm64(d.z, tab.expansion.dens().z);

  std::vector<Factor> factors;
  std::vector<RowFactor> rows;
  for (const auto& tab : input.cusps) {
    const std::int64_t ne = tab.n_e;
    const Rational mult = tab.multiplicity();
    const std::int64_t n_top = sgn(nb) < 0 ? -1 : to_int64(floor_rational(nb / ne));
    const std::int64_t m_top = sgn(mb) < 0 ? -1 : to_int64(floor_rational(mb / (t * ne)));
    if (n_top >= 0 && m_top >= 0 && Rational(n_top * std::max<std::int64_t>(m_top, 0)) > input.max_n) {
      throw MathError("cusp tables are too short for this window: need q-precision " +
                      std::to_string(n_top * m_top) + " at cusp " + tab.cusp.label());
    }
    auto rows_n = rows_by_n(tab.expansion);
    for (std::int64_t m = 0; m <= m_top; ++m) {
      for (std::int64_t n = 0; n <= n_top; ++n) {
        auto it = rows_n.find(Rational(n * m));
        if (it == rows_n.end()) continue;
        for (const auto& [l, c] : it->second) {
          if (m == 0 && n == 0 && sgn(l) >= 0) continue;
          Rational e = mult * c;
          Rational norm = 4 * Rational(n * m) * t - l * l;
          if (sgn(norm) < 0 && sgn(e) < 0) {
            throw MathError("meromorphic product: negative exponent at (nm, l) = (" + std::to_string(n * m) + ", " +
                            l.get_str() + ") of cusp " + tab.cusp.label());
          }
          std::int64_t l_hat = scaled_int(l * ne, d.z, "l");
          if (m == 0 && n == 0) {
            rows.push_back({l_hat, to_int64(e)});
            continue;
          }
          factors.push_back({ExponentKey{n * ne * d.tau, l_hat, scaled_int(t * m * ne, d.omega, "omega")}, e});
        }
      }
    }
  }

  SiegelForm f;
  f.id = "B(" + input.form_id + ")";
  if (!is_integer(input.t)) throw MathError("paramodular level t must be integral: " + input.form_id);
  f.t = to_int64(input.t);
  f.level = input.level;
  f.weight_x2 = wd.k_x2;
  f.character = "Borcherds character of " + input.form_id;
  f.series = assemble(wd.A, wd.B, wd.C, factors, rows, d, window);
  check_integral(f.series, f.id);
  return f;
}

SiegelForm borcherds_expand(const std::string& form_id, const Window& window) {
  require_window(window);
  const JacobiForm& phi = registry_form(form_id);
  Rational n_need = floor_rational(*window.max_n) * floor_rational(*window.max_m / phi.index());
  if (n_need < *window.max_n) n_need = *window.max_n;
  return borcherds_expand(collect_cusp_data(phi, n_need), window);
}

TriSeries leading_fj_factor(const BorcherdsInput& input, const Rational& max_n) {
  Window w = Window::box(std::nullopt, max_n);
  EtaProduct etas;
  TriSeries acc = TriSeries::one(w);
  for (const auto& tab : input.cusps) {
    const std::int64_t ne = tab.n_e;
    const Rational mult = tab.multiplicity();
    Rational eta_e = mult * tab.c(Rational(0), Rational(0));
    for (const auto& [k, c] : tab.expansion.terms()) {
      auto e = tab.expansion.true_exponent(k);
      if (sgn(e.n) != 0 || sgn(e.l) <= 0) continue;
      Rational p = mult * c;
      if (!is_integer(p) || sgn(p) < 0) throw MathError("theta factor exponent must be a non-negative integer");
      eta_e -= p;
      if (!is_integer(e.l)) throw MathError("theta factor needs integral l");
      TriSeries th = theta_series(Window::box(std::nullopt, max_n / ne)).rescale(ne, ne * to_int64(e.l), 1);
      acc = series_mul(acc, th.pow_int(to_int64(p))).truncated(w);
    }
    if (!is_integer(eta_e)) throw MathError("eta factor exponent must be integral");
    if (sgn(eta_e) != 0) etas.factors.push_back({ne, to_int64(eta_e)});
  }
  acc = series_mul(acc, eta_product_qexpansion(etas, w)).truncated(w);
  return acc.times_s(weyl_data(input).C).normalized();
}

SiegelForm traced_expand(const JacobiForm& phi, const Window& window) {
  require_window(window);
  if (phi.weight_x2 != 0) throw MathError("traced product needs a weight-0 form: " + phi.id);
  const std::int64_t N = phi.level;
  const Rational t = phi.index();
  Rational n_need = floor_rational(*window.max_n) * floor_rational(*window.max_m / t);
  if (n_need < *window.max_n) n_need = *window.max_n;
  Window wexp = Window::box(std::nullopt, n_need);

  std::map<std::int64_t, TriSeries> traces;  // d -> f_d at infinity
  for (auto dv : divisors(N)) {
    traces[dv] = expansion_at_infinity(dv == N ? phi : trace_to(phi, dv), wexp);
  }
  for (const auto& [dv, s] : traces) {
    for (const auto& [k, c] : s.terms()) {
      if (k.n_hat < 0) throw MathError("traced product expects weak input: " + phi.id);
    }
  }
  // Weyl vector from the full trace f_1
  Rational A(0), B(0), C(0);
  for (const auto& [k, c] : traces.at(1).terms()) {
    auto e = traces.at(1).true_exponent(k);
    if (sgn(e.n) != 0) continue;
    A += c;
    if (sgn(e.l) > 0) B += e.l * c;
    C += e.l * e.l * c;
  }
  A /= 24;
  B /= 2;
  C /= 4;

  Dens d{1, 1, to_int64(Rational(BigInt(t.get_den())))};
  for (const auto& [dv, s] : traces) d.z = lcm64(d.z, s.dens().z);
  const Rational nb = *window.max_n - A, mb = *window.max_m - C;

  std::vector<Factor> factors;
  std::vector<RowFactor> rows;
  if (sgn(nb) >= 0 && sgn(mb) >= 0) {
    // aggregated exponent of (1 - x^g), x = q^n r^l s^{tm}: sum_{b e = g} mu(b) f_{N/e}(nm, l) / g
    std::map<std::int64_t, std::map<Rational, std::vector<std::pair<Rational, Rational>>>> rows_of;
    for (const auto& [dv, s] : traces) rows_of[dv] = rows_by_n(s);
    const std::int64_t n_top = to_int64(floor_rational(nb)), m_top = to_int64(floor_rational(mb / t));
    for (std::int64_t m = 0; m <= m_top; ++m) {
      for (std::int64_t n = 0; n <= n_top; ++n) {
        const Rational nm(n * m);
        for (auto g : divisors(N)) {
          if (n * g > n_top || Rational(t * m * g) > mb) continue;
          std::map<Rational, Rational> agg;  // l -> exponent
          for (auto e : divisors(N)) {
            if (g % e != 0) continue;
            std::int64_t b = g / e;
            if ((N / e) % b != 0 || moebius(b) == 0) continue;
            const auto& rs = rows_of.at(N / e);
            auto it = rs.find(nm);
            if (it == rs.end()) continue;
            for (const auto& [l, c] : it->second) agg[l] += Rational(moebius(b)) * c / g;
          }
          for (const auto& [l, ex] : agg) {
            if (sgn(ex) == 0) continue;
            if (m == 0 && n == 0 && sgn(l) >= 0) continue;
            if (!is_integer(ex)) {
              throw MathError("non-integral aggregate exponent " + ex.get_str() + " at (n, l, m) = (" +
                              std::to_string(n) + ", " + l.get_str() + ", " + std::to_string(m) + "), power " +
                              std::to_string(g));
            }
            Rational norm = 4 * nm * t - l * l;
            if (sgn(norm) < 0 && sgn(ex) < 0) throw MathError("meromorphic traced product for " + phi.id);
            std::int64_t l_hat = scaled_int(l * g, d.z, "l");
            if (m == 0 && n == 0) {
              rows.push_back({l_hat, to_int64(ex)});
            } else {
              factors.push_back({ExponentKey{n * g * d.tau, l_hat, scaled_int(t * m * g, d.omega, "omega")}, ex});
            }
          }
        }
      }
    }
  }

  SiegelForm f;
  f.id = "traced B(" + phi.id + ")";
  if (!is_integer(t)) throw MathError("paramodular level t must be integral: " + phi.id);
  f.t = to_int64(t);
  f.level = N;
  f.character = "Borcherds character of " + phi.id;
  f.series = assemble(A, B, C, factors, rows, d, window);
  check_integral(f.series, f.id);
  // the weight weighs c(0, 0) by h_e / N_e, which the traces do not separate
  f.weight_x2 = weyl_data(collect_cusp_data(phi, Rational(0))).k_x2;
  return f;
}

Rational lemma_d1_check(const BorcherdsInput& input) {
  WeylData w = weyl_data(input);
  return input.t * w.D1 + w.C - input.t * w.A;
}

CharacterData character_data(const BorcherdsInput& input) {
  CharacterData cd;
  WeylData w = weyl_data(input);
  for (const auto& tab : input.cusps) {
    CharacterData::PerCusp pc;
    pc.cusp = tab.cusp.label();
    pc.n_e = tab.n_e;
    for (const auto& [k, c] : tab.expansion.terms()) {
      auto e = tab.expansion.true_exponent(k);
      if (sgn(e.n) != 0) continue;
      pc.eta_exponent += tab.multiplicity() * c;
      if (sgn(e.l) > 0) pc.heisenberg_exponent += tab.multiplicity() * e.l * c;
    }
    cd.cusps.push_back(pc);
  }
  // eta part: prod_e v_eta(alpha_e M alpha_e^{-1})^{x_e} on generators of Gamma_0(N)
  cd.eta_order = 1;
  for (const auto& m : gamma0_generators(input.level)) {
    Rational x(0);
    for (const auto& pc : cd.cusps) {
      Mat2 conj{m.a, m.b * pc.n_e, m.c / pc.n_e, m.d};
      x += pc.eta_exponent * eta_multiplier(conj);
    }
    cd.eta_order = std::lcm(cd.eta_order, order_of(x / 24));
  }
  // Heisenberg part: v_{H,N_e}([lambda, mu; 0]) = (-1)^{lambda + N_e mu + N_e lambda mu}
  cd.heisenberg_order = 1;
  for (auto [lam, mu] : {std::pair<std::int64_t, std::int64_t>{1, 0}, {0, 1}}) {
    Rational x(0);
    for (const auto& pc : cd.cusps) x += pc.heisenberg_exponent * (lam + pc.n_e * mu + pc.n_e * lam * mu);
    cd.heisenberg_order = std::lcm(cd.heisenberg_order, order_of(x / 2));
  }
  Rational ct = w.C / input.t;
  Rational frac = ct - Rational(floor_rational(ct));
  cd.center = Phase::make(to_int64(Rational(BigInt(frac.get_num()))), to_int64(Rational(BigInt(frac.get_den()))));
  if (!is_integer(w.D0)) throw MathError("D0 is not an integer for " + input.form_id);
  cd.vt_sign = to_int64(w.D0) % 2 == 0 ? 1 : -1;
  cd.order = std::lcm(std::lcm(cd.eta_order, cd.heisenberg_order), order_of(ct));
  return cd;
}

std::string character_to_json(const CharacterData& c) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cusps = nlohmann::ordered_json::array();
  for (const auto& pc : c.cusps) {
    cusps.push_back({{"cusp", pc.cusp},
                     {"N_e", pc.n_e},
                     {"eta_exponent", pc.eta_exponent.get_str()},
                     {"heisenberg_exponent", pc.heisenberg_exponent.get_str()}});
  }
  j["cusps"] = cusps;
  j["center"] = std::to_string(c.center.k) + "/" + std::to_string(c.center.order);
  j["vt_sign"] = c.vt_sign;
  j["eta_order"] = c.eta_order;
  j["heisenberg_order"] = c.heisenberg_order;
  j["order"] = c.order;
  return j.dump();
}

}  // namespace ddforms
