// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any criterion fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "series_helpers.hpp"
#include "ddforms/borcherds.hpp"
#include "ddforms/classification.hpp"
#include "ddforms/identities.hpp"
#include "ddforms/lift.hpp"

using namespace ddforms;
using ddforms::testing::qr_series;

namespace {

struct Outcome {
  bool passed = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (ok || !passed) {
      passed = passed && ok;
      return;
    }
    passed = false;
    note = what;
  }
  void equal(const TriSeries& a, const TriSeries& b, const std::string& what) {
    auto m = TriSeries::first_mismatch(a, b);
    require(!m, what + (m ? ": " + *m : std::string()));
  }
};

// Every Siegel table produced below, for the V_t criterion.
std::vector<SiegelForm>& produced() {
  static std::vector<SiegelForm> all;
  return all;
}

SiegelForm keep(SiegelForm f) {
  produced().push_back(f);
  return f;
}

Window upto(const char* n) { return Window::box(std::nullopt, parse_rational(n)); }

std::int64_t lift_level(const std::string& id) {
  const JacobiForm& f = registry_form(id);
  return to_int64(f.index() * f.q_chi);
}

SiegelForm lift_on(const std::string& id, const Window& w) { return keep(arithmetic_lift(registry_form(id), 1, w)); }

// --- 1 ---
Outcome classification() {
  Outcome o;
  std::vector<Candidate> expected{{1, 1, 10, 1}, {1, 2, 6, 1}, {1, 3, 4, 1}, {1, 4, 3, 1}, {2, 1, 4, 1},
                                  {2, 2, 2, 1},  {2, 4, 1, 1}, {3, 1, 2, 1}, {4, 1, 1, 1}};
  auto got = enumerate_dd_candidates(500, 500, 1);
  o.require(got == expected, "classify --m 1 --max 500 returned " + std::to_string(got.size()) + " rows");
  return o;
}

// --- 2 ---
std::int64_t independent_index(std::int64_t n) {
  // N prod_{p | N} (1 + 1/p)
  std::int64_t r = n, m = n;
  for (std::int64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    r = r / p * (p + 1);
    while (m % p == 0) m /= p;
  }
  if (m > 1) r = r / m * (m + 1);
  return r;
}

Outcome cusp_data() {
  Outcome o;
  auto widths = [](std::int64_t n) {
    std::multiset<std::int64_t> w;
    for (const auto& c : cusps_gamma0(n)) w.insert(c.width);
    return w;
  };
  o.require(widths(2) == std::multiset<std::int64_t>{1, 2}, "Gamma_0(2) widths");
  o.require(widths(4) == std::multiset<std::int64_t>{1, 4, 1}, "Gamma_0(4) widths");
  for (std::int64_t n = 1; n <= 200; ++n) {
    std::int64_t sum = 0;
    for (const auto& c : cusps_gamma0(n)) sum += c.width;
    o.require(sum == independent_index(n) && gamma0_index(n) == sum, "sum of widths at N = " + std::to_string(n));
  }
  return o;
}

// --- 3 ---
Outcome reference_expansions() {
  Outcome o;
  auto xi = [](const char* id) { return *registry_form(id).xi; };
  auto series = [](const XiForm& f, const Window& w) { return to_rational_series(f.series(w)).normalized(); };
  auto slashed = [&](const char* id, const Mat2& m, const Window& w) { return series(xi(id).slash(m), w); };

  o.equal(series(xi("phi2"), upto("1")),
          qr_series({{"0", "-1", "1"}, {"0", "0", "2"}, {"0", "1", "1"}, {"1", "-2", "2"}, {"1", "0", "-4"}, {"1", "2", "2"}},
                    upto("1")),
          "phi2");
  o.equal(slashed("phi2", Mat2::S(), upto("1/2")),
          qr_series({{"0", "0", "4"}, {"1/2", "-1", "-8"}, {"1/2", "0", "16"}, {"1/2", "1", "-8"}}, upto("1/2")),
          "phi2 | S");
  o.equal(series(xi("phi3"), upto("1")),
          qr_series({{"0", "-1", "1"}, {"0", "0", "1"}, {"0", "1", "1"}, {"1", "-2", "1"}, {"1", "-1", "-1"},
                     {"1", "1", "-1"}, {"1", "2", "1"}},
                    upto("1")),
          "phi3");
  o.equal(slashed("phi3", Mat2::S(), upto("1/3")),
          qr_series({{"0", "0", "3"}, {"1/3", "-1", "-3"}, {"1/3", "0", "6"}, {"1/3", "1", "-3"}}, upto("1/3")),
          "phi3 | S");
  o.equal(series(xi("phi4"), upto("2")),
          qr_series({{"0", "-1", "1"}, {"0", "1", "1"}, {"2", "-3", "1"}, {"2", "-1", "-1"}, {"2", "1", "-1"}, {"2", "3", "1"}},
                    upto("2")),
          "phi4");
  o.equal(slashed("phi4", Mat2::S(), upto("1/4")),
          qr_series({{"0", "0", "2"}, {"1/4", "-1", "-2"}, {"1/4", "0", "4"}, {"1/4", "1", "-2"}}, upto("1/4")),
          "phi4 | S");
  o.equal(slashed("phi4", Mat2{1, -1, 2, -1}, upto("1")),
          qr_series({{"0", "0", "2"}, {"1", "-2", "2"}, {"1", "0", "-4"}, {"1", "2", "2"}}, upto("1")), "phi4 | M");
  o.equal(series(xi("psi"), upto("1")),
          qr_series({{"0", "-1", "1"}, {"0", "1", "1"}, {"1", "-3", "1"}, {"1", "-1", "-1"}, {"1", "1", "-1"}, {"1", "3", "1"}},
                    upto("1")),
          "psi");
  o.equal(slashed("psi", Mat2::S(), upto("1/2")),
          qr_series({{"0", "0", "2"}, {"1/2", "-2", "-2"}, {"1/2", "0", "4"}, {"1/2", "2", "-2"}}, upto("1/2")),
          "psi | S");
  o.equal(expansion_at_infinity(trace_to(registry_form("phi2"), 1), upto("0")),
          qr_series({{"0", "-1", "1"}, {"0", "0", "10"}, {"0", "1", "1"}}, upto("0")), "Tr phi2 leading row");
  return o;
}

// --- 4 ---
Outcome lift_equals_product() {
  Outcome o;
  std::string sizes;
  const std::array<std::pair<const char*, const char*>, 4> pairs{
      {{"nabla3_in", "phi2"}, {"nabla2_in", "phi3"}, {"q1_in", "psi"}, {"eta9_theta", "phi01"}}};
  for (const auto& [lift_id, product_id] : pairs) {
    std::int64_t t = lift_level(lift_id);
    Window w = siegel_window(Rational(3 * t), t);
    SiegelForm lift = lift_on(lift_id, w);
    SiegelForm prod = keep(borcherds_expand(product_id, w));
    o.require(prod.series.window() == w, std::string("product window for ") + product_id);
    o.equal(lift.series, prod.series, std::string("Lift(") + lift_id + ") vs B(" + product_id + ")");
    o.require(lift.series.size() > 5, std::string("vacuous window for ") + lift_id);
    sizes += (sizes.empty() ? "" : ", ") + std::string(product_id) + " " + std::to_string(lift.series.size());
  }
  if (o.passed) o.note = "nonzero terms " + sizes;
  return o;
}

// --- 5 ---
Outcome closed_formulas() {
  Outcome o;
  Window w3 = siegel_window(Rational(3), 1);
  o.equal(lift_on("nabla2_in", w3).series, closed_form_oracle(ClosedForm::nabla2, w3).series, "nabla2 closed formula");
  Window w6 = siegel_window(Rational(6), 2);
  o.equal(lift_on("q1_in", w6).series, closed_form_oracle(ClosedForm::q1, w6).series, "Q1 closed formula");
  return o;
}

// --- 6 ---
Outcome nabla32_square() {
  Outcome o;
  Window w = siegel_window(Rational(3), 1);
  TriSeries b = keep(borcherds_expand("phi4", w)).series;
  o.equal(series_mul(b, b).truncated(w), lift_on("h32_sq", w).series, "B(phi4)^2 vs Lift(h32_sq)");
  return o;
}

// --- 7 ---
Outcome dd_powers() {
  Outcome o;
  struct Row {
    const char* power;
    const char* base;
    std::int64_t e;
  };
  for (auto r : {Row{"nabla3_in_sq", "nabla3_in", 2}, Row{"nabla2_in_sq", "nabla2_in", 2}, Row{"q1_in_sq", "q1_in", 2},
                 Row{"q1_in_4", "q1_in", 4}}) {
    std::int64_t t = lift_level(r.base);
    Window w = siegel_window(Rational(3 * t), t);
    o.equal(lift_on(r.power, w).series, lift_on(r.base, w).series.pow_int(r.e).truncated(w),
            std::string("Lift(") + r.power + ") vs Lift(" + r.base + ")^" + std::to_string(r.e));
  }
  return o;
}

// --- 8 ---
Outcome lemma() {
  Outcome o;
  for (const char* id : {"phi2", "phi3", "phi4", "psi", "phi01"})
    o.require(lemma_d1_check(collect_cusp_data(id, Rational(3))) == 0, std::string("t D1 + C - t A for ") + id);
  for (const char* id : {"phi01", "phi02"})
    o.require(weight2_constant_check(registry_form(id), 2) == 0, std::string("weight-2 constant term of ") + id);
  return o;
}

// --- 9 ---
Outcome weyl() {
  Outcome o;
  struct Row {
    const char* id;
    const char *A, *B, *C, *k;
  };
  for (auto r : {Row{"phi2", "1/2", "1/2", "1/2", "3"}, Row{"phi3", "1/2", "1/2", "1/2", "2"},
                 Row{"phi4", "1/2", "1/2", "1/2", "3/2"}, Row{"psi", "1/4", "1/2", "1/2", "1"},
                 Row{"phi01", "1/2", "1/2", "1/2", "5"}}) {
    auto w = weyl_data(collect_cusp_data(r.id, Rational(2)));
    o.require(w.A == parse_rational(r.A) && w.B == parse_rational(r.B) && w.C == parse_rational(r.C) &&
                  make_rational(w.k_x2, 2) == parse_rational(r.k),
              std::string("Weyl data of ") + r.id + ": " + weyl_to_json(w));
  }
  return o;
}

// --- 10 ---
Outcome reflective() {
  Outcome o;
  for (int prec : {2, 6})
    for (const char* id : {"reflective_5_2", "reflective_5_3", "reflective_q1"}) {
      auto r = run_identity(id, VerifyOptions{Rational(prec), {}});
      o.require(r.passed, std::string(id) + " at omega <= " + std::to_string(prec) + ": " + r.detail);
    }
  // The rescaled tables, kept for the symmetry criterion.
  Window w = siegel_window(Rational(6), 1);
  TriSeries d5 = arithmetic_lift(registry_form("eta9_theta"), 1, siegel_window(Rational(3), 1)).series.rescale(2, 2, 2);
  SiegelForm lhs{"Delta5(2Z)^2", 1, 1, true, 20, "", series_mul(d5, d5).truncated(w)};
  keep(lhs);
  keep(lift_on("phi2_half_sq", w));
  keep(lift_on("phi3_1", w));
  keep(lift_on("phi1_half", siegel_window(Rational(6), 2)));
  return o;
}

// --- 11 ---
Outcome vt_symmetry() {
  Outcome o;
  o.require(!produced().empty(), "no Siegel tables were produced");
  for (const auto& f : produced()) o.require(vt_symmetry_check(f), "not V_t-symmetric: " + f.id);
  auto r = run_identity("vt_symmetry", VerifyOptions{Rational(3), {}});
  o.require(r.passed, r.detail);
  return o;
}

// --- 12 ---
Outcome numeric_transformations() {
  Outcome o;
  std::mt19937_64 rng(20240612);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.8, 1.6), zr(-0.3, 0.3);
  std::uniform_int_distribution<int> small(-6, 6), level_pick(1, 8), move_pick(0, 3);
  double worst_xi = 0, worst_eta = 0;
  using K = JacobiMove::Kind;
  const std::array<std::pair<K, Mat2>, 4> moves{
      {{K::S, Mat2::S()}, {K::T, Mat2::T(1)}, {K::Tinv, Mat2::T(-1)}, {K::NegI, Mat2::neg_identity()}}};
  for (int point = 0; point < 20; ++point) {
    Complex tau(re(rng), im(rng)), z(zr(rng), zr(rng) * 0.3);
    // xi slash rules
    std::int64_t n = level_pick(rng);
    std::int64_t a = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
    std::int64_t b = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
    if (n % 2 == 0 && a == n / 2 && b == n / 2) b = 0;
    XiSymbol x = make_xi(n, a, b, 1 + point % 2);
    double t = double(x.z_scale * x.z_scale) / 2.0;
    auto f = [&](Complex tt, Complex zz) { return xi_numeric(x, tt, zz); };
    const auto& [kind, m] = moves[static_cast<std::size_t>(move_pick(rng))];
    Complex direct = jacobi_slash_numeric(f, 0.0, t, m, tau, z);
    Complex rule = xi_numeric(xi_move(x, kind), tau, z);
    worst_xi = std::max(worst_xi, std::abs(direct - rule) / (1.0 + std::abs(direct)));
    // eta multiplier cocycle: eta(M tau) = e(v / 24) (c tau + d)^{1/2} eta(tau)
    Mat2 g;
    for (;;) {
      std::int64_t c = small(rng), d = small(rng);
      if (gcd64(c, d) != 1) continue;
      std::int64_t u, v;
      ext_gcd(d, c, u, v);
      g = Mat2{u, -v, c, d};
      break;
    }
    Complex j = double(g.c) * tau + double(g.d);
    Complex mt = (double(g.a) * tau + double(g.b)) / j;
    Complex lhs = eta_numeric(mt);
    Complex rhs = std::exp(2.0 * std::numbers::pi * Complex(0, 1) * double(eta_multiplier(g)) / 24.0) * std::sqrt(j) *
                  eta_numeric(tau);
    worst_eta = std::max(worst_eta, std::abs(lhs - rhs) / std::abs(rhs));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "worst residual xi %.2e, eta %.2e", worst_xi, worst_eta);
  o.require(worst_xi < 1e-9 && worst_eta < 1e-9, buf);
  if (o.passed) o.note = buf;
  return o;
}

// --- 13 ---
Outcome paramodular_index() {
  Outcome o;
  // |Sp_4(F_2)| and its Siegel parabolic, by enumerating all 4x4 matrices over F_2.
  int sp = 0, parabolic = 0;
  for (unsigned bits = 0; bits < (1u << 16); ++bits) {
    std::array<std::array<int, 4>, 4> m{};
    for (int i = 0; i < 16; ++i) m[i / 4][i % 4] = (bits >> i) & 1;
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i)
      for (int k = 0; k < 4 && ok; ++k) {
        int s = 0;
        for (int r = 0; r < 2; ++r) s += m[r][i] * m[r + 2][k] + m[r + 2][i] * m[r][k];
        if ((s & 1) != ((i == k + 2 || k == i + 2) ? 1 : 0)) ok = false;
      }
    if (!ok) continue;
    ++sp;
    if (m[2][0] == 0 && m[2][1] == 0 && m[3][0] == 0 && m[3][1] == 0) ++parabolic;
  }
  o.require(sp == 720 && parabolic == 48, "Sp_4(F_2) enumeration");
  o.require(index_paramodular(1, 2) == 15 && sp / parabolic == 15, "index of Gamma_1(2)");
  for (std::int64_t t = 1; t <= 30; ++t)
    for (std::int64_t n = 1; n <= 30; ++n) o.require(index_paramodular(t, n) > 0, "index at t, N <= 30");
  return o;
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "classification of (t, N; k) for m = 1", 5, classification},
      {2, "cusp widths and their sums", 5, cusp_data},
      {3, "reference expansions of the weight-0 inputs", 30, reference_expansions},
      {4, "lift equals Borcherds product", 300, lift_equals_product},
      {5, "closed-formula oracles", 300, closed_formulas},
      {6, "nabla_{3/2}^2 = F_3", 300, nabla32_square},
      {7, "square and fourth-power lifts", 300, dd_powers},
      {8, "t D1 + C - t A = 0 and vanishing weight-2 constant", 300, lemma},
      {9, "Weyl vectors and weights", 300, weyl},
      {10, "reflective identities", 300, reflective},
      {11, "V_t symmetry of every Siegel table", 300, vt_symmetry},
      {12, "numeric transformation checks", 60, numeric_transformations},
      {13, "paramodular index", 60, paramodular_index},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.note = std::string("exception: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.passed && s > c.budget_s) {
      o.passed = false;
      o.note = "over the time budget";
    }
    if (!o.passed) ++failed;
    std::printf("[%s] %2d %s (%.2f s)%s%s\n", o.passed ? "PASS" : "FAIL", c.number, c.name, s, o.note.empty() ? "" : ": ",
                o.note.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
