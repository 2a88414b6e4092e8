#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ddforms/cyclotomic.hpp"
#include "ddforms/rational.hpp"

namespace ddforms {

// Scaled exponent triple: q^{n_hat/den_tau} r^{l_hat/den_z} s^{m_hat/den_omega}.
struct ExponentKey {
  std::int64_t n_hat = 0;
  std::int64_t l_hat = 0;
  std::int64_t m_hat = 0;

  friend bool operator==(const ExponentKey&, const ExponentKey&) = default;
  friend std::strong_ordering operator<=>(const ExponentKey& a, const ExponentKey& b) {
    if (auto c = a.m_hat <=> b.m_hat; c != 0) return c;
    if (auto c = a.n_hat <=> b.n_hat; c != 0) return c;
    return a.l_hat <=> b.l_hat;
  }
  ExponentKey operator+(const ExponentKey& o) const { return {n_hat + o.n_hat, l_hat + o.l_hat, m_hat + o.m_hat}; }
  ExponentKey operator-(const ExponentKey& o) const { return {n_hat - o.n_hat, l_hat - o.l_hat, m_hat - o.m_hat}; }
};

struct ExponentKeyHash {
  std::size_t operator()(const ExponentKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : {k.n_hat, k.l_hat, k.m_hat}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct Dens {
  std::int64_t tau = 1;
  std::int64_t z = 1;
  std::int64_t omega = 1;
  friend bool operator==(const Dens&, const Dens&) = default;
  Dens lcm_with(const Dens& o) const { return {lcm64(tau, o.tau), lcm64(z, o.z), lcm64(omega, o.omega)}; }
};

// True (unscaled) exponent of a key under given denominators.
struct TrueExponent {
  Rational n, l, m;
};

// Truncation bounds in scaled units of a particular set of denominators.
struct TruncationPolicy {
  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_m_hat = kUnbounded;
  std::int64_t max_n_hat = kUnbounded;
  std::int64_t max_abs_l_hat = kUnbounded;
};

// Truncation window with exact rational bounds; nullopt means unbounded.
// Coefficients at exponents inside the window are exact; everything outside is unknown.
struct Window {
  std::optional<Rational> max_m;
  std::optional<Rational> max_n;
  std::optional<Rational> max_abs_l;

  static Window unbounded() { return {}; }
  static Window box(std::optional<Rational> m, std::optional<Rational> n, std::optional<Rational> abs_l = {}) {
    return Window{std::move(m), std::move(n), std::move(abs_l)};
  }

  bool contains(const Rational& n, const Rational& l, const Rational& m) const {
    if (max_m && m > *max_m) return false;
    if (max_n && n > *max_n) return false;
    if (max_abs_l && abs(l) > *max_abs_l) return false;
    return true;
  }
  Window intersect(const Window& o) const {
    return {min_opt(max_m, o.max_m), min_opt(max_n, o.max_n), min_opt(max_abs_l, o.max_abs_l)};
  }
  TruncationPolicy scaled(const Dens& d) const {
    TruncationPolicy p;
    if (max_m) p.max_m_hat = to_int64(floor_rational(*max_m * d.omega));
    if (max_n) p.max_n_hat = to_int64(floor_rational(*max_n * d.tau));
    if (max_abs_l) p.max_abs_l_hat = to_int64(floor_rational(*max_abs_l * d.z));
    return p;
  }
  static Window from_policy(const TruncationPolicy& p, const Dens& d) {
    Window w;
    if (p.max_m_hat != TruncationPolicy::kUnbounded) w.max_m = make_rational(p.max_m_hat, d.omega);
    if (p.max_n_hat != TruncationPolicy::kUnbounded) w.max_n = make_rational(p.max_n_hat, d.tau);
    if (p.max_abs_l_hat != TruncationPolicy::kUnbounded) w.max_abs_l = make_rational(p.max_abs_l_hat, d.z);
    return w;
  }
  bool operator==(const Window& o) const {
    return max_m == o.max_m && max_n == o.max_n && max_abs_l == o.max_abs_l;
  }
  std::string to_string() const;

  static std::optional<Rational> min_opt(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return *a < *b ? a : b;
  }
  static std::optional<Rational> add_opt(const std::optional<Rational>& a, const Rational& b) {
    if (!a) return a;
    return *a + b;
  }
};

namespace detail {
inline std::string coeff_string(const Rational& c) { return c.get_str(); }
inline std::string coeff_string(const Cyclo& c) { return c.to_string(); }
}  // namespace detail

// Truncated series in q, r, s with exact coefficients of type C.
template <class C>
class BasicSeries {
 public:
  using Term = std::pair<ExponentKey, C>;

  BasicSeries() = default;
  BasicSeries(Dens dens, Window window) : dens_(dens), window_(std::move(window)) { check_dens(); }

  // Builds a series from arbitrary (possibly repeated, unsorted) terms; drops zeros and out-of-window keys.
  static BasicSeries from_terms(Dens dens, Window window, std::vector<Term> terms) {
    BasicSeries s(dens, std::move(window));
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    for (auto& t : terms) {
      if (!s.terms_.empty() && s.terms_.back().first == t.first) {
        s.terms_.back().second += t.second;
      } else {
        s.terms_.push_back(std::move(t));
      }
    }
    s.prune();
    return s;
  }

  static BasicSeries from_map(Dens dens, Window window,
                              const std::unordered_map<ExponentKey, C, ExponentKeyHash>& acc) {
    std::vector<Term> v;
    v.reserve(acc.size());
    for (const auto& [k, c] : acc) v.emplace_back(k, c);
    return from_terms(dens, std::move(window), std::move(v));
  }

  // c * q^n r^l s^m with exponent denominators chosen to represent the exponents exactly.
  static BasicSeries monomial(const C& c, const Rational& n, const Rational& l, const Rational& m,
                              Window window = Window::unbounded()) {
    Dens d{to_int64(BigInt(n.get_den())), to_int64(BigInt(l.get_den())), to_int64(BigInt(m.get_den()))};
    ExponentKey k{to_int64(Rational(n * d.tau)), to_int64(Rational(l * d.z)), to_int64(Rational(m * d.omega))};
    return from_terms(d, std::move(window), {Term{k, c}});
  }
  static BasicSeries one(Window window = Window::unbounded()) {
    return monomial(C(1L), Rational(0), Rational(0), Rational(0), std::move(window));
  }

  const Dens& dens() const { return dens_; }
  const Window& window() const { return window_; }
  TruncationPolicy policy() const { return window_.scaled(dens_); }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  TrueExponent true_exponent(const ExponentKey& k) const {
    return {make_rational(k.n_hat, dens_.tau), make_rational(k.l_hat, dens_.z), make_rational(k.m_hat, dens_.omega)};
  }

  bool key_in_window(const ExponentKey& k) const {
    auto p = policy();
    return k.m_hat <= p.max_m_hat && k.n_hat <= p.max_n_hat &&
           (k.l_hat < 0 ? -k.l_hat : k.l_hat) <= p.max_abs_l_hat;
  }
  bool in_window(const Rational& n, const Rational& l, const Rational& m) const { return window_.contains(n, l, m); }

  // Coefficient at a true exponent; zero when absent. Throws if the exponent is outside the window.
  C coeff(const Rational& n, const Rational& l, const Rational& m) const {
    if (!in_window(n, l, m)) {
      throw MathError("coefficient requested outside the truncation window");
    }
    Rational sn = n * dens_.tau, sl = l * dens_.z, sm = m * dens_.omega;
    if (!is_integer(sn) || !is_integer(sl) || !is_integer(sm)) return C(0L);
    return coeff_hat({to_int64(sn), to_int64(sl), to_int64(sm)});
  }
  C coeff_hat(const ExponentKey& k) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& t, const ExponentKey& key) { return t.first < key; });
    if (it != terms_.end() && it->first == k) return it->second;
    return C(0L);
  }

  // Same series expressed with denominators that are multiples of the current ones.
  BasicSeries with_dens(const Dens& nd) const {
    if (nd == dens_) return *this;
    if (nd.tau % dens_.tau || nd.z % dens_.z || nd.omega % dens_.omega) {
      throw MathError("target denominators must be multiples of the current ones");
    }
    std::int64_t ft = nd.tau / dens_.tau, fz = nd.z / dens_.z, fo = nd.omega / dens_.omega;
    BasicSeries s(nd, window_);
    s.terms_.reserve(terms_.size());
    for (const auto& [k, c] : terms_) s.terms_.emplace_back(ExponentKey{k.n_hat * ft, k.l_hat * fz, k.m_hat * fo}, c);
    return s;
  }

  // Smallest denominators that still represent every exponent exactly.
  BasicSeries normalized() const {
    std::int64_t gt = dens_.tau, gz = dens_.z, go = dens_.omega;
    for (const auto& [k, c] : terms_) {
      gt = gcd64(gt, k.n_hat);
      gz = gcd64(gz, k.l_hat);
      go = gcd64(go, k.m_hat);
    }
    BasicSeries s(Dens{dens_.tau / gt, dens_.z / gz, dens_.omega / go}, window_);
    s.terms_.reserve(terms_.size());
    for (const auto& [k, c] : terms_) s.terms_.emplace_back(ExponentKey{k.n_hat / gt, k.l_hat / gz, k.m_hat / go}, c);
    return s;
  }

  BasicSeries truncated(const Window& w) const {
    BasicSeries s = *this;
    s.window_ = window_.intersect(w);
    s.prune();
    return s;
  }

  BasicSeries operator-() const {
    BasicSeries s = *this;
    for (auto& t : s.terms_) t.second = -t.second;
    return s;
  }

  BasicSeries scaled(const C& c) const {
    BasicSeries s = *this;
    for (auto& t : s.terms_) t.second *= c;
    s.prune();
    return s;
  }

  friend BasicSeries operator+(const BasicSeries& a, const BasicSeries& b) { return add_impl(a, b, false); }
  friend BasicSeries operator-(const BasicSeries& a, const BasicSeries& b) { return add_impl(a, b, true); }
  friend BasicSeries operator*(const BasicSeries& a, const BasicSeries& b) { return mul(a, b); }

  // Exact truncated product. The output window is the largest one on which the product is determined.
  static BasicSeries mul(const BasicSeries& a0, const BasicSeries& b0) {
    Dens d = a0.dens_.lcm_with(b0.dens_);
    BasicSeries a = a0.with_dens(d), b = b0.with_dens(d);
    Window w = product_window(a, b);
    BasicSeries out(d, w);
    if (a.empty() || b.empty()) return out;
    TruncationPolicy p = w.scaled(d);
    std::unordered_map<ExponentKey, C, ExponentKeyHash> acc;
    acc.reserve(a.size() + b.size());
    for (const auto& [ka, ca] : a.terms_) {
      if (sat_add(ka.m_hat, b.terms_.front().first.m_hat) > p.max_m_hat) break;
      for (const auto& [kb, cb] : b.terms_) {
        std::int64_t m = ka.m_hat + kb.m_hat;
        if (m > p.max_m_hat) break;
        std::int64_t n = ka.n_hat + kb.n_hat;
        if (n > p.max_n_hat) continue;
        std::int64_t l = ka.l_hat + kb.l_hat;
        if ((l < 0 ? -l : l) > p.max_abs_l_hat) continue;
        ExponentKey k{n, l, m};
        auto it = acc.find(k);
        if (it == acc.end()) {
          acc.emplace(k, ca * cb);
        } else {
          it->second += ca * cb;
        }
      }
    }
    return from_map(d, std::move(w), acc);
  }

  BasicSeries pow_int(std::int64_t e) const {
    if (e < 0) throw MathError("negative integer power needs series_div or pow_rational");
    BasicSeries result = one(window_).with_dens(dens_);
    BasicSeries base = *this;
    while (e > 0) {
      if (e & 1) result = mul(result, base);
      e >>= 1;
      if (e) base = mul(base, base);
    }
    return result;
  }

  // (1 + v)^alpha for a series with constant term 1; v must have positive valuation.
  BasicSeries pow_rational(const Rational& alpha) const {
    if (is_integer(alpha) && sgn(alpha) >= 0) return pow_int(to_int64(alpha));
    C c0 = coeff_hat({0, 0, 0});
    if (c0 != C(1L)) throw MathError("pow_rational requires constant term 1");
    BasicSeries v = *this - one(window_).with_dens(dens_);
    for (const auto& [k, c] : v.terms_) {
      if (k.m_hat < 0 || k.n_hat < 0 || (k.m_hat == 0 && k.n_hat == 0)) {
        throw MathError("pow_rational requires the non-constant part to have positive valuation");
      }
    }
    if (!v.empty() && !window_.max_m && !window_.max_n) {
      throw MathError("pow_rational with a non-polynomial result needs a bounded window");
    }
    bool has_m = std::any_of(v.terms_.begin(), v.terms_.end(), [](const Term& t) { return t.first.m_hat > 0; });
    bool has_n = std::any_of(v.terms_.begin(), v.terms_.end(), [](const Term& t) { return t.first.n_hat > 0; });
    if ((has_m && !window_.max_m && !window_.max_n) || (has_n && !has_m && !window_.max_n)) {
      throw MathError("pow_rational needs a window bounding the growth direction");
    }
    BasicSeries result = one(window_).with_dens(dens_);
    BasicSeries power = result;
    for (unsigned k = 1;; ++k) {
      power = mul(power, v).truncated(window_);
      if (power.empty()) break;
      result = result + power.scaled(C(binomial(alpha, k)));
    }
    return result;
  }

  // Multiply by (1 - c*x)^e for a monomial x = q^n r^l s^m with (m, n) > 0 and all exponents in scaled units.
  BasicSeries mul_binomial_factor(const ExponentKey& x, const C& c, std::int64_t e) const {
    if (e == 0 || is_zero_coeff(c)) return *this;
    if (x.n_hat < 0 || x.m_hat < 0 || (x.n_hat == 0 && x.m_hat == 0)) {
      throw MathError("binomial factor monomial must have positive (m, n) grade");
    }
    if (window_.max_abs_l && x.l_hat != 0) throw MathError("binomial factor with l-shift needs an unbounded l-window");
    if (!window_.max_m && !window_.max_n && e < 0) throw MathError("geometric factor needs a bounded window");
    BasicSeries cur = *this;
    if (e > 0) {
      for (std::int64_t i = 0; i < e; ++i) cur = cur - cur.shifted(x, c);
      return cur;
    }
    for (std::int64_t i = 0; i < -e; ++i) {
      BasicSeries acc = cur;
      BasicSeries p = cur;
      while (true) {
        p = p.shifted(x, c);
        if (p.empty()) break;
        acc = acc + p;
      }
      cur = std::move(acc);
    }
    return cur;
  }

  // c * x * (*this), truncated to the current window; x in scaled units.
  BasicSeries shifted(const ExponentKey& x, const C& c) const {
    BasicSeries s(dens_, window_);
    TruncationPolicy p = policy();
    s.terms_.reserve(terms_.size());
    for (const auto& [k, v] : terms_) {
      ExponentKey nk = k + x;
      if (nk.m_hat > p.max_m_hat) break;
      if (nk.n_hat > p.max_n_hat) continue;
      if ((nk.l_hat < 0 ? -nk.l_hat : nk.l_hat) > p.max_abs_l_hat) continue;
      s.terms_.emplace_back(nk, v * c);
    }
    if (x.l_hat != 0 || x.n_hat != 0) {
      std::sort(s.terms_.begin(), s.terms_.end(), [](const Term& u, const Term& w) { return u.first < w.first; });
    }
    s.prune();
    return s;
  }

  // Exact quotient a / b; throws if b does not divide a within the window.
  static BasicSeries div(const BasicSeries& a0, const BasicSeries& b0) {
    if (b0.empty()) throw MathError("division by the zero series");
    if (a0.window_.max_abs_l || b0.window_.max_abs_l) throw MathError("series_div requires unbounded l-windows");
    Dens d = a0.dens_.lcm_with(b0.dens_);
    BasicSeries a = a0.with_dens(d), b = b0.with_dens(d);
    // lead grade of b must be minimal in both m and n
    std::int64_t m0 = b.terms_.front().first.m_hat, n0 = std::numeric_limits<std::int64_t>::max();
    for (const auto& [k, c] : b.terms_) {
      if (k.m_hat == m0) n0 = std::min(n0, k.n_hat);
    }
    for (const auto& [k, c] : b.terms_) {
      if (k.n_hat < n0) throw MathError("series_div: divisor has no grade-minimal leading row");
    }
    Rational g0n = make_rational(n0, d.tau), g0m = make_rational(m0, d.omega);
    Window w;
    if (a.empty()) {
      w.max_m = Window::min_opt(Window::add_opt(a.window_.max_m, -g0m), Window::add_opt(b.window_.max_m, -g0m));
      w.max_n = Window::min_opt(Window::add_opt(a.window_.max_n, -g0n), Window::add_opt(b.window_.max_n, -g0n));
    } else {
      Rational amin_m = make_rational(a.terms_.front().first.m_hat, d.omega);
      Rational amin_n = make_rational(min_n(a), d.tau);
      w.max_m = Window::min_opt(Window::add_opt(a.window_.max_m, -g0m),
                                Window::add_opt(b.window_.max_m, amin_m - 2 * g0m));
      w.max_n = Window::min_opt(Window::add_opt(a.window_.max_n, -g0n),
                                Window::add_opt(b.window_.max_n, amin_n - 2 * g0n));
    }
    TruncationPolicy qp = w.scaled(d);
    bool bounded = w.max_m || w.max_n;

    std::vector<Term> lead;
    for (const auto& [k, c] : b.terms_) {
      if (k.m_hat == m0 && k.n_hat == n0) lead.push_back({k, c});
    }
    // remainder keyed by grade (m, n) -> row (l -> coefficient)
    std::map<std::pair<std::int64_t, std::int64_t>, std::map<std::int64_t, C>> rem;
    for (const auto& [k, c] : a.terms_) rem[{k.m_hat, k.n_hat}][k.l_hat] = c;
    std::vector<Term> quotient;
    std::pair<std::int64_t, std::int64_t> last_grade{std::numeric_limits<std::int64_t>::min(), 0};
    if (!a.empty()) last_grade = {a.terms_.back().first.m_hat, max_n(a)};

    while (!rem.empty()) {
      auto it = rem.begin();
      auto [gm, gn] = it->first;
      std::int64_t hm = gm - m0, hn = gn - n0;
      if (hm > qp.max_m_hat) break;
      if (!bounded && (gm > last_grade.first || (gm == last_grade.first && gn > last_grade.second))) {
        throw MathError("series_div: quotient is not a polynomial and the window is unbounded");
      }
      std::map<std::int64_t, C> row = std::move(it->second);
      rem.erase(it);
      std::erase_if(row, [](const auto& kv) { return is_zero_coeff(kv.second); });
      if (row.empty() || hn > qp.max_n_hat) continue;
      // Laurent-polynomial division of the row by the lead row of b
      std::vector<std::pair<std::int64_t, C>> qrow;
      std::int64_t lead_lo = lead.front().first.l_hat;
      std::int64_t lead_span = lead.back().first.l_hat - lead_lo;
      const C& lead_c = lead.front().second;
      while (!row.empty()) {
        auto lr = row.begin()->first;
        if (row.rbegin()->first - lr < lead_span) {
          throw MathError("series_div: divisor does not divide the dividend exactly");
        }
        std::int64_t ql = lr - lead_lo;
        C qc = row.begin()->second / lead_c;
        for (const auto& [kl, cl] : lead) {
          std::int64_t l = ql + kl.l_hat;
          C delta = qc * cl;
          auto jt = row.find(l);
          if (jt == row.end()) {
            row.emplace(l, -delta);
          } else {
            jt->second -= delta;
            if (is_zero_coeff(jt->second)) row.erase(jt);
          }
        }
        qrow.emplace_back(ql, std::move(qc));
      }
      for (auto& [ql, qc] : qrow) {
        ExponentKey qk{hn, ql, hm};
        quotient.push_back({qk, qc});
        for (const auto& [kb, cb] : b.terms_) {
          if (kb.m_hat == m0 && kb.n_hat == n0) continue;
          ExponentKey t = qk + kb;
          rem[{t.m_hat, t.n_hat}][t.l_hat] -= qc * cb;
        }
      }
    }
    return from_terms(d, std::move(w), std::move(quotient));
  }

  // Multiplies every exponent by the given positive factors (q -> q^{ct}, r -> r^{cz}, s -> s^{co}).
  BasicSeries rescale(std::int64_t c_tau, std::int64_t c_z, std::int64_t c_omega) const {
    if (c_tau <= 0 || c_z <= 0 || c_omega <= 0) throw MathError("rescale factors must be positive");
    Window w;
    if (window_.max_m) w.max_m = *window_.max_m * c_omega;
    if (window_.max_n) w.max_n = *window_.max_n * c_tau;
    if (window_.max_abs_l) w.max_abs_l = *window_.max_abs_l * c_z;
    BasicSeries s(dens_, std::move(w));
    s.terms_.reserve(terms_.size());
    for (const auto& [k, c] : terms_) {
      s.terms_.emplace_back(ExponentKey{k.n_hat * c_tau, k.l_hat * c_z, k.m_hat * c_omega}, c);
    }
    return s;
  }

  // Generic exponent substitution; f maps a key to a key under the new denominators.
  template <class F>
  BasicSeries map_keys(Dens nd, Window nw, F&& f) const {
    std::vector<Term> v;
    v.reserve(terms_.size());
    for (const auto& [k, c] : terms_) v.emplace_back(f(k), c);
    return from_terms(nd, std::move(nw), std::move(v));
  }

  template <class D, class F>
  BasicSeries<D> map_coeffs(F&& f) const {
    std::vector<typename BasicSeries<D>::Term> v;
    v.reserve(terms_.size());
    for (const auto& [k, c] : terms_) v.emplace_back(k, f(c));
    return BasicSeries<D>::from_terms(dens_, window_, std::move(v));
  }

  // r -> 1.
  BasicSeries specialize_z_one() const {
    Window w = window_;
    if (w.max_abs_l) throw MathError("r -> 1 specialization needs an unbounded l-window");
    Dens nd{dens_.tau, 1, dens_.omega};
    return map_keys(nd, w, [](const ExponentKey& k) { return ExponentKey{k.n_hat, 0, k.m_hat}; });
  }

  // Layer of s-degree m_hat as an omega-free series.
  BasicSeries slice_omega(std::int64_t m_hat) const {
    if (m_hat > policy().max_m_hat) throw MathError("Fourier-Jacobi slice outside the truncation window");
    Window w = window_;
    w.max_m.reset();
    std::vector<Term> v;
    for (const auto& [k, c] : terms_) {
      if (k.m_hat == m_hat) v.emplace_back(ExponentKey{k.n_hat, k.l_hat, 0}, c);
    }
    return from_terms(Dens{dens_.tau, dens_.z, 1}, std::move(w), std::move(v));
  }

  // Multiplies an omega-free series by s^{m} (true exponent m).
  BasicSeries times_s(const Rational& m) const {
    return mul(*this, monomial(C(1L), Rational(0), Rational(0), m));
  }

  bool is_integral() const {
    if constexpr (std::is_same_v<C, Rational>) {
      for (const auto& t : terms_)
        if (t.second.get_den() != 1) return false;
      return true;
    } else {
      for (const auto& t : terms_) {
        if (!t.second.is_rational() || t.second.rational_part().get_den() != 1) return false;
      }
      return true;
    }
  }

  // Human-readable diff of the first coefficient that differs inside the common window, if any.
  static std::optional<std::string> first_mismatch(const BasicSeries& a0, const BasicSeries& b0) {
    Dens d = a0.dens_.lcm_with(b0.dens_);
    Window w = a0.window_.intersect(b0.window_);
    BasicSeries a = a0.with_dens(d).truncated(w), b = b0.with_dens(d).truncated(w);
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      const Term* ta = i < a.terms_.size() ? &a.terms_[i] : nullptr;
      const Term* tb = j < b.terms_.size() ? &b.terms_[j] : nullptr;
      if (ta && tb && ta->first == tb->first) {
        if (ta->second != tb->second) return a.describe(ta->first, ta->second, tb->second);
        ++i;
        ++j;
      } else if (ta && (!tb || ta->first < tb->first)) {
        return a.describe(ta->first, ta->second, C(0L));
      } else {
        return a.describe(tb->first, C(0L), tb->second);
      }
    }
    return std::nullopt;
  }
  static bool equal_within(const BasicSeries& a, const BasicSeries& b) { return !first_mismatch(a, b).has_value(); }

  std::string describe(const ExponentKey& k, const C& left, const C& right) const {
    auto e = true_exponent(k);
    return "q^" + e.n.get_str() + " r^" + e.l.get_str() + " s^" + e.m.get_str() + ": left " +
           detail::coeff_string(left) + ", right " + detail::coeff_string(right);
  }

  std::string to_string(std::size_t max_terms = 40) const {
    std::string out;
    std::size_t shown = 0;
    for (const auto& [k, c] : terms_) {
      if (shown++ == max_terms) {
        out += " + ...";
        break;
      }
      auto e = true_exponent(k);
      if (!out.empty()) out += " + ";
      out += "(" + detail::coeff_string(c) + ")";
      if (sgn(e.n) != 0) out += "*q^" + e.n.get_str();
      if (sgn(e.l) != 0) out += "*r^" + e.l.get_str();
      if (sgn(e.m) != 0) out += "*s^" + e.m.get_str();
    }
    return out.empty() ? "0" : out;
  }

 private:
  template <class>
  friend class BasicSeries;

  void check_dens() const {
    if (dens_.tau <= 0 || dens_.z <= 0 || dens_.omega <= 0) throw MathError("exponent denominators must be positive");
  }

  void prune() {
    TruncationPolicy p = policy();
    std::erase_if(terms_, [&](const Term& t) {
      const auto& k = t.first;
      return is_zero_coeff(t.second) || k.m_hat > p.max_m_hat || k.n_hat > p.max_n_hat ||
             (k.l_hat < 0 ? -k.l_hat : k.l_hat) > p.max_abs_l_hat;
    });
  }

  static std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) return a > 0 ? std::numeric_limits<std::int64_t>::max()
                                                       : std::numeric_limits<std::int64_t>::min();
    return r;
  }

  static std::int64_t min_n(const BasicSeries& s) {
    std::int64_t v = std::numeric_limits<std::int64_t>::max();
    for (const auto& t : s.terms_) v = std::min(v, t.first.n_hat);
    return v;
  }
  static std::int64_t max_n(const BasicSeries& s) {
    std::int64_t v = std::numeric_limits<std::int64_t>::min();
    for (const auto& t : s.terms_) v = std::max(v, t.first.n_hat);
    return v;
  }
  static std::int64_t max_abs_l(const BasicSeries& s) {
    std::int64_t v = 0;
    for (const auto& t : s.terms_) v = std::max(v, t.first.l_hat < 0 ? -t.first.l_hat : t.first.l_hat);
    return v;
  }

  // Window on which a*b is fully determined by the known parts of a and b.
  static Window product_window(const BasicSeries& a, const BasicSeries& b) {
    const Dens& d = a.dens_;
    auto axis = [](const std::optional<Rational>& wa, const std::optional<Rational>& wb,
                   std::optional<Rational> amin, std::optional<Rational> bmin) {
      // an empty factor is known to vanish below its own bound
      if (!amin) amin = wa;
      if (!bmin) bmin = wb;
      std::optional<Rational> x, y;
      if (wa && bmin) x = *wa + *bmin;
      if (wb && amin) y = *wb + *amin;
      if (wa && !bmin) x = std::nullopt;  // b is exactly zero
      if (!wa && !wb) return std::optional<Rational>{};
      if (wa && !wb && !bmin) return std::optional<Rational>{};
      if (wb && !wa && !amin) return std::optional<Rational>{};
      return Window::min_opt(x, y);
    };
    auto opt = [](bool present, Rational v) { return present ? std::optional<Rational>(v) : std::nullopt; };
    Window w;
    w.max_m = axis(a.window_.max_m, b.window_.max_m,
                   opt(!a.empty(), make_rational(a.empty() ? 0 : a.terms_.front().first.m_hat, d.omega)),
                   opt(!b.empty(), make_rational(b.empty() ? 0 : b.terms_.front().first.m_hat, d.omega)));
    w.max_n = axis(a.window_.max_n, b.window_.max_n, opt(!a.empty(), make_rational(a.empty() ? 0 : min_n(a), d.tau)),
                   opt(!b.empty(), make_rational(b.empty() ? 0 : min_n(b), d.tau)));
    const auto& la = a.window_.max_abs_l;
    const auto& lb = b.window_.max_abs_l;
    if (la && lb) {
      if (!a.empty() && !b.empty()) throw MathError("cannot multiply two series that are both truncated in l");
      w.max_abs_l = Window::min_opt(la, lb);
    } else if (la) {
      w.max_abs_l = *la - make_rational(max_abs_l(b), d.z);
    } else if (lb) {
      w.max_abs_l = *lb - make_rational(max_abs_l(a), d.z);
    }
    return w;
  }

  static BasicSeries add_impl(const BasicSeries& a0, const BasicSeries& b0, bool subtract) {
    Dens d = a0.dens_.lcm_with(b0.dens_);
    BasicSeries a = a0.with_dens(d), b = b0.with_dens(d);
    BasicSeries out(d, a.window_.intersect(b.window_));
    out.terms_.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
        out.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
        out.terms_.emplace_back(b.terms_[j].first, subtract ? C(-b.terms_[j].second) : b.terms_[j].second);
        ++j;
      } else {
        C c = a.terms_[i].second;
        if (subtract) {
          c -= b.terms_[j].second;
        } else {
          c += b.terms_[j].second;
        }
        out.terms_.emplace_back(a.terms_[i].first, std::move(c));
        ++i;
        ++j;
      }
    }
    out.prune();
    return out;
  }

  Dens dens_;
  Window window_;
  std::vector<Term> terms_;
};

using TriSeries = BasicSeries<Rational>;
using CycloSeries = BasicSeries<Cyclo>;

TriSeries series_mul(const TriSeries& a, const TriSeries& b);
TriSeries series_div(const TriSeries& a, const TriSeries& b);
TriSeries series_pow_rational(const TriSeries& u, const Rational& alpha);
TriSeries series_rescale(const TriSeries& a, std::int64_t c_tau, std::int64_t c_z, std::int64_t c_omega);

// Exact rational series from a cyclotomic one; throws if any coefficient is irrational.
TriSeries to_rational_series(const CycloSeries& s);
CycloSeries to_cyclo_series(const TriSeries& s);

// JSON form {"den_tau":..,"den_z":..,"den_omega":..,"coeffs":[[n_hat,l_hat,m_hat,"p/q"],...]}.
std::string series_to_json(const TriSeries& s);
TriSeries series_from_json(const std::string& text, const Window& window);

}  // namespace ddforms
