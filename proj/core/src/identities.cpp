#include "ddforms/identities.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>

#include "ddforms/borcherds.hpp"
#include "ddforms/cache.hpp"
#include "ddforms/classification.hpp"
#include "ddforms/lift.hpp"
#include "json.hpp"

namespace ddforms {

namespace {

class Context {
 public:
  explicit Context(const VerifyOptions& o) : max_omega(o.max_omega) {
    if (o.cache_dir) cache_.emplace(*o.cache_dir);
  }

  Rational max_omega;

  // Paramodular level of Lift(phi): q t.
  static std::int64_t lift_level(const std::string& id) {
    const JacobiForm& phi = registry_form(id);
    Rational qt = phi.index() * phi.q_chi;
    if (!is_integer(qt)) throw MathError("q t must be integral: " + id);
    return to_int64(qt);
  }

  static std::int64_t product_level(const std::string& id) {
    Rational t = registry_form(id).index();
    if (!is_integer(t)) throw MathError("product input must have integral index: " + id);
    return to_int64(t);
  }

  SiegelForm lift(const std::string& id, const Window& w) const {
    return cached("lift", id, w, [&] { return arithmetic_lift(registry_form(id), 1, w); });
  }

  SiegelForm product(const std::string& id, const Window& w) const {
    return cached("product", id, w, [&] { return borcherds_expand(id, w); });
  }

 private:
  SiegelForm cached(const std::string& recipe, const std::string& id, const Window& w,
                    const std::function<SiegelForm()>& compute) const {
    if (!cache_) return compute();
    return cache_->get_or_compute(SiegelCache::make_key(recipe, id, w), compute);
  }

  std::optional<SiegelCache> cache_;
};

bool covers(const TriSeries& s, const Window& w) { return s.window().intersect(w) == w; }

IdentityResult compare(const std::string& id, const TriSeries& a, const TriSeries& b, const Window& w) {
  if (!covers(a, w) || !covers(b, w)) throw MathError(id + ": a side is not determined on " + w.to_string());
  TriSeries left = a.truncated(w), right = b.truncated(w);
  if (left.size() == 0 && right.size() == 0)
    throw WindowTooSmall(id + ": no nonzero coefficient on " + w.to_string() + "; raise --prec");
  IdentityResult r;
  r.id = id;
  r.window = w.to_string();
  r.terms = std::max(left.size(), right.size());
  auto m = TriSeries::first_mismatch(left, right);
  r.passed = !m.has_value();
  if (m) r.detail = *m;
  return r;
}

// Later failures do not hide earlier ones.
IdentityResult combine(const std::string& id, const std::vector<IdentityResult>& parts) {
  IdentityResult r;
  r.id = id;
  r.passed = true;
  for (const auto& p : parts) {
    r.terms += p.terms;
    if (r.window.empty()) r.window = p.window;
    if (!p.passed && r.passed) {
      r.passed = false;
      r.detail = p.detail;
    }
  }
  return r;
}

IdentityResult lift_eq_product(const std::string& id, const Context& c, const std::string& lift_id,
                               const std::string& product_id) {
  Window w = siegel_window(c.max_omega, Context::lift_level(lift_id));
  return compare(id, c.lift(lift_id, w).series, c.product(product_id, w).series, w);
}

IdentityResult power_case(const std::string& id, const Context& c, const std::string& power_id,
                          const std::string& base_id, std::int64_t e) {
  Window w = siegel_window(c.max_omega, Context::lift_level(base_id));
  return compare(id, c.lift(power_id, w).series, c.lift(base_id, w).series.pow_int(e), w);
}

IdentityResult scalar_zero(const std::string& id, const std::string& what, const Rational& value) {
  IdentityResult r;
  r.id = id;
  r.window = "exact";
  r.passed = value == 0;
  r.detail = what + " = " + to_string(value);
  return r;
}

TriSeries jacobi_series(const JacobiForm& f, const Window& w) { return expansion_at_infinity(f, w); }

// 4 sum over the three even characteristics of (theta_i(tau, z) / theta_i(tau, 0))^2
TriSeries classical_phi01(const Window& w) {
  XiForm classical{{XiProduct{Rational(4), Phase{}, {make_xi(2, 1, 0), make_xi(2, 1, 0)}},
                    XiProduct{Rational(4), Phase{}, {make_xi(2, 0, 0), make_xi(2, 0, 0)}},
                    XiProduct{Rational(4), Phase{}, {make_xi(2, 0, 1), make_xi(2, 0, 1)}}}};
  return to_rational_series(classical.series(w)).normalized();
}

// (phi_{0,1}^2 - E_4 phi_{-2,1}^2) / 24 with phi_{-2,1} = theta^2 / eta^6
TriSeries classical_phi02(const Window& w) {
  Window wide = Window::box(std::nullopt, *w.max_n + 1);
  TriSeries phi01 = classical_phi01(wide);
  TriSeries e4 = eisenstein_qexpansion(4, CharacterId::dirichlet_values(1, {1}), wide).scaled(Rational(240));
  TriSeries th = theta_series(wide);
  TriSeries phim2 = series_div(series_mul(th, th), eta_qexpansion(1, wide).pow_int(6));
  TriSeries diff = series_mul(phi01, phi01) - series_mul(e4, series_mul(phim2, phim2));
  return diff.scaled(Rational(1, 24)).truncated(w).normalized();
}

Window jacobi_window(const Context& c) { return Window::box(std::nullopt, c.max_omega); }

using Runner = std::function<IdentityResult(const std::string&, const Context&)>;

struct Entry {
  IdentityCase info;
  Runner run;
};

const std::vector<std::string>& siegel_lift_ids() {
  static const std::vector<std::string> ids{"nabla3_in",    "nabla2_in",    "q1_in",    "eta9_theta", "eta3_theta",
                                            "h32_sq",       "nabla3_in_sq", "nabla2_in_sq", "q1_in_sq", "q1_in_4",
                                            "phi2_half_sq", "phi3_1",       "phi1_half"};
  return ids;
}

const std::vector<std::string>& siegel_product_ids() {
  static const std::vector<std::string> ids{"phi2", "phi3", "phi4", "psi", "phi01"};
  return ids;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    auto add = [&](std::string id, std::string left, std::string right, std::string trunc, Runner run) {
      t.push_back(Entry{IdentityCase{std::move(id), std::move(left), std::move(right), std::move(trunc)}, std::move(run)});
    };
    const std::string siegel = "omega <= prec, tau <= prec / t";

    auto lp = [&](std::string id, std::string lift_id, std::string product_id) {
      add(id, "Lift(" + lift_id + ")", "B(" + product_id + ")", siegel,
          [lift_id, product_id](const std::string& i, const Context& c) {
            return lift_eq_product(i, c, lift_id, product_id);
          });
    };
    lp("nabla3_lift_eq_product", "nabla3_in", "phi2");
    lp("nabla2_lift_eq_product", "nabla2_in", "phi3");
    lp("q1_lift_eq_product", "q1_in", "psi");

    add("nabla32_sq_eq_F3", "B(phi4)^2", "Lift(h32_sq)", siegel, [](const std::string& i, const Context& c) {
      Window w = siegel_window(c.max_omega, Context::lift_level("h32_sq"));
      TriSeries b = c.product("phi4", w).series;
      return compare(i, series_mul(b, b), c.lift("h32_sq", w).series, w);
    });

    struct Power {
      const char* id;
      const char* power;
      const char* base;
      std::int64_t e;
    };
    for (auto p : {Power{"dd_powers_1", "nabla3_in_sq", "nabla3_in", 2}, Power{"dd_powers_2", "nabla2_in_sq", "nabla2_in", 2},
                   Power{"dd_powers_3", "q1_in_sq", "q1_in", 2}, Power{"dd_powers_4", "q1_in_4", "q1_in", 4}}) {
      std::string power = p.power, base = p.base;
      std::int64_t e = p.e;
      add(p.id, "Lift(" + power + ")", "Lift(" + base + ")^" + std::to_string(e), siegel,
          [power, base, e](const std::string& i, const Context& c) { return power_case(i, c, power, base, e); });
    }

    lp("delta5_eq_Bphi01", "eta9_theta", "phi01");

    for (const char* f : {"phi2", "phi3", "phi4", "psi"}) {
      std::string form = f;
      add(std::string("lemma_d1_") + f, "t D1 + C - t A for " + form, "0", "q-precision prec",
          [form](const std::string& i, const Context& c) {
            return scalar_zero(i, "t D1 + C - t A", lemma_d1_check(collect_cusp_data(form, c.max_omega)));
          });
    }
    for (const char* f : {"phi01", "phi02"}) {
      std::string form = f;
      add(std::string("eq_zero_") + f, "weight-2 constant term of " + form, "0", "rows n <= 1",
          [form](const std::string& i, const Context&) {
            return scalar_zero(i, "weight-2 constant term", weight2_constant_check(registry_form(form)));
          });
    }

    add("trace_phi2", "Tr_{SL2} phi2", "4 sum_i (theta_i(z) / theta_i(0))^2", "tau <= prec",
        [](const std::string& i, const Context& c) {
          Window w = jacobi_window(c);
          return compare(i, jacobi_series(trace_to(registry_form("phi2"), 1), w), classical_phi01(w), w);
        });
    add("trace_phi4", "Tr_{Gamma0(2)} phi4, Tr_{SL2} phi4", "phi2, 4 sum_i (theta_i(z) / theta_i(0))^2", "tau <= prec",
        [](const std::string& i, const Context& c) {
          Window w = jacobi_window(c);
          const JacobiForm& phi4 = registry_form("phi4");
          return combine(i, {compare(i, jacobi_series(trace_to(phi4, 2), w), jacobi_series(registry_form("phi2"), w), w),
                             compare(i, jacobi_series(trace_to(phi4, 1), w), classical_phi01(w), w)});
        });
    add("trace_psi", "Tr_{SL2} psi", "(phi01^2 - E4 phi_{-2,1}^2) / 24", "tau <= prec",
        [](const std::string& i, const Context& c) {
          Window w = jacobi_window(c);
          return compare(i, jacobi_series(trace_to(registry_form("psi"), 1), w), classical_phi02(w), w);
        });

    add("reflective_5_3", "Delta5(2Z)^2", "Lift(phi2_half_sq) nabla3^2", "omega <= prec, tau <= prec",
        [](const std::string& i, const Context& c) {
          Window w = siegel_window(c.max_omega, 1);
          TriSeries d5 = c.lift("eta9_theta", siegel_window(c.max_omega / 2, 1)).series.rescale(2, 2, 2);
          TriSeries n3 = c.lift("nabla3_in", w).series;
          return compare(i, series_mul(d5, d5), series_mul(c.lift("phi2_half_sq", w).series, series_mul(n3, n3)), w);
        });
    add("reflective_5_2", "Delta5(3Z)", "Lift(phi3_1) nabla2", "omega <= prec, tau <= prec",
        [](const std::string& i, const Context& c) {
          Window w = siegel_window(c.max_omega, 1);
          TriSeries d5 = c.lift("eta9_theta", siegel_window(c.max_omega / 3, 1)).series.rescale(3, 3, 3);
          return compare(i, d5, series_mul(c.lift("phi3_1", w).series, c.lift("nabla2_in", w).series), w);
        });
    add("reflective_q1", "Delta2(2Z)", "Lift(phi1_half) Q1", "omega <= prec, tau <= prec / 2",
        [](const std::string& i, const Context& c) {
          Window w = siegel_window(c.max_omega, 2);
          TriSeries d2 = c.lift("eta3_theta", siegel_window(c.max_omega / 2, 2)).series.rescale(2, 2, 2);
          return compare(i, d2, series_mul(c.lift("phi1_half", w).series, c.lift("q1_in", w).series), w);
        });

    add("vt_symmetry", "c(n, l, m)", "c(m / t, l, n t) on every lift and product", siegel,
        [](const std::string& i, const Context& c) {
          IdentityResult r;
          r.id = i;
          r.window = "omega <= " + to_string(c.max_omega);
          r.passed = true;
          auto check = [&](const SiegelForm& f) {
            r.terms += f.series.size();
            if (!vt_symmetry_check(f)) {
              if (r.passed) r.detail = "not V_t-symmetric: " + f.id;
              r.passed = false;
            }
          };
          for (const auto& id : siegel_lift_ids())
            check(c.lift(id, siegel_window(c.max_omega, Context::lift_level(id))));
          for (const auto& id : siegel_product_ids())
            check(c.product(id, siegel_window(c.max_omega, Context::product_level(id))));
          if (r.terms == 0) throw WindowTooSmall(i + ": every table is empty; raise --prec");
          return r;
        });

    add("q1_nonexistence_slot", "classify m = 1, t, N <= 500", "contains (t, N; k) = (2, 4; 1/2)", "exact",
        [](const std::string& i, const Context&) {
          IdentityResult r;
          r.id = i;
          r.window = "t, N <= 500";
          auto cands = enumerate_dd_candidates(500, 500, 1);
          r.terms = cands.size();
          r.passed = std::find(cands.begin(), cands.end(), Candidate{2, 4, 1, 1}) != cands.end();
          r.detail = r.passed ? "(2, 4; 1/2) is an arithmetic slot; no form of weight 1/2 fills it"
                              : "(2, 4; 1/2) missing from the classification";
          return r;
        });
    return t;
  }();
  return table;
}

const Entry& find_entry(const std::string& id) {
  for (const auto& e : entries())
    if (e.info.id == id) return e;
  throw MathError("unknown identity case: " + id);
}

}  // namespace

const std::vector<IdentityCase>& identity_cases() {
  static const std::vector<IdentityCase> cases = [] {
    std::vector<IdentityCase> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return cases;
}

bool is_identity_id(const std::string& id) {
  return std::any_of(entries().begin(), entries().end(), [&](const Entry& e) { return e.info.id == id; });
}

IdentityResult run_identity(const std::string& id, const VerifyOptions& options) {
  if (options.max_omega <= 0) throw WindowTooSmall("precision must be positive");
  const Entry& e = find_entry(id);
  Context ctx(options);
  auto start = std::chrono::steady_clock::now();
  IdentityResult r = e.run(id, ctx);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<IdentityResult> verify_all(const VerifyOptions& options) {
  std::vector<IdentityResult> out;
  for (const auto& e : entries()) out.push_back(run_identity(e.info.id, options));
  return out;
}

std::string identity_report_json(const std::vector<IdentityResult>& results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["passed"] = r.passed;
    j["window"] = r.window;
    j["terms"] = r.terms;
    j["detail"] = r.detail;
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

}  // namespace ddforms
