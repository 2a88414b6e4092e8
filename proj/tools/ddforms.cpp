#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ddforms/borcherds.hpp"
#include "ddforms/cache.hpp"
#include "ddforms/classification.hpp"
#include "ddforms/identities.hpp"
#include "ddforms/jacobi.hpp"
#include "ddforms/lift.hpp"

using namespace ddforms;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  int prec = 2;
  std::string format = "json";
  std::string cache_dir;
  std::string out;
  bool seed_free = false;

  Rational max_omega() const {
    if (prec <= 0) throw UsageError("--prec must be at least 1: the window would be empty");
    return Rational(prec);
  }

  std::optional<SiegelCache> cache() const {
    if (!cache_dir.empty()) return SiegelCache(cache_dir);
    if (auto env = SiegelCache::from_environment()) return SiegelCache(*env);
    return std::nullopt;
  }
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(g.out, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write " + g.out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string monomial_text(const TrueExponent& e) {
  std::string s;
  auto part = [&](const char* var, const Rational& x) {
    if (x == 0) return;
    if (!s.empty()) s += ' ';
    s += var;
    if (x != 1) s += "^" + (is_integer(x) ? to_string(x) : "(" + to_string(x) + ")");
  };
  part("q", e.n);
  part("r", e.l);
  part("s", e.m);
  return s.empty() ? "1" : s;
}

std::string series_csv(const TriSeries& s) {
  std::ostringstream out;
  out << "n,l,m,c\n";
  for (const auto& [k, c] : s.terms()) {
    auto e = s.true_exponent(k);
    out << to_string(e.n) << ',' << to_string(e.l) << ',' << to_string(e.m) << ',' << to_string(c) << '\n';
  }
  return out.str();
}

std::string series_text(const std::string& title, const TriSeries& s, std::size_t limit = 24) {
  std::ostringstream out;
  out << title << "  [" << s.window().to_string() << ", " << s.size() << " terms]\n";
  std::size_t shown = 0;
  for (const auto& [k, c] : s.terms()) {
    if (shown++ == limit) {
      out << "  ...\n";
      break;
    }
    out << "  " << to_string(c) << "  " << monomial_text(s.true_exponent(k)) << '\n';
  }
  return out.str();
}

std::string jacobi_json(const std::string& id, const std::string& cusp, const TriSeries& s) {
  nlohmann::ordered_json j;
  j["form"] = id;
  j["cusp"] = cusp;
  j["window"] = s.window().to_string();
  j["series"] = nlohmann::ordered_json::parse(series_to_json(s));
  return j.dump();
}

std::string format_jacobi(const Globals& g, const std::string& id, const std::string& cusp, const TriSeries& s) {
  if (g.format == "csv") return series_csv(s);
  if (g.format == "text") return series_text(id + " at " + cusp, s);
  return jacobi_json(id, cusp, s);
}

std::string format_siegel(const Globals& g, const SiegelForm& f) {
  if (g.format == "csv") return series_csv(f.series);
  if (g.format == "text") {
    std::string head = f.id + "  weight " + to_string(make_rational(f.weight_x2, 2)) + ", t = " + std::to_string(f.t) +
                       ", N = " + std::to_string(f.level);
    return series_text(head, f.series);
  }
  return siegel_to_json(f);
}

const JacobiForm& form_or_usage(const std::string& id) {
  try {
    return registry_form(id);
  } catch (const MathError&) {
    throw UsageError("unknown form id: " + id);
  }
}

SiegelForm cached(const Globals& g, const std::string& recipe, const std::string& id, const Window& w,
                  const std::function<SiegelForm()>& compute) {
  if (auto c = g.cache()) return c->get_or_compute(SiegelCache::make_key(recipe, id, w), compute);
  return compute();
}

int cmd_cusps(const Globals& g, std::int64_t level) {
  if (level < 1) throw UsageError("--level must be positive");
  auto cusps = cusps_gamma0(level);
  std::ostringstream out;
  if (g.format == "csv") {
    out << "cusp,f,e,width,N_e\n";
    for (const auto& c : cusps) out << c.label() << ',' << c.f << ',' << c.e << ',' << c.width << ',' << c.comp << '\n';
  } else if (g.format == "text") {
    out << "cusps of Gamma_0(" << level << "), index " << gamma0_index(level) << '\n';
    for (const auto& c : cusps) out << "  " << c.label() << "  width " << c.width << "  N_e " << c.comp << '\n';
  } else {
    out << cusps_to_json(cusps);
  }
  emit(g, out.str());
  return kOk;
}

int cmd_classify(const Globals& g, std::int64_t m, std::int64_t max) {
  if (m < 1 || max < 1) throw UsageError("--m and --max must be positive");
  auto cands = enumerate_dd_candidates(max, max, m);
  std::ostringstream out;
  if (g.format == "csv") {
    out << "t,N,k,m\n";
    for (const auto& c : cands) out << c.t << ',' << c.level << ',' << to_string(make_rational(c.k_x2, 2)) << ',' << c.m << '\n';
  } else if (g.format == "text") {
    for (const auto& c : cands)
      out << "(t, N; k) = (" << c.t << ", " << c.level << "; " << to_string(make_rational(c.k_x2, 2)) << ")\n";
  } else {
    out << candidates_to_json(cands);
  }
  emit(g, out.str());
  return kOk;
}

int cmd_expand(const Globals& g, const std::string& id, const std::string& cusp_label) {
  const JacobiForm& f = form_or_usage(id);
  Window w = Window::box(std::nullopt, g.max_omega());
  for (const auto& c : cusps_gamma0(f.level)) {
    if (c.label() != cusp_label) continue;
    emit(g, format_jacobi(g, id, cusp_label, cusp_expansion(f, c, w)));
    return kOk;
  }
  throw UsageError("no cusp " + cusp_label + " for Gamma_0(" + std::to_string(f.level) + ")");
}

int cmd_lift(const Globals& g, const std::string& id, std::int64_t mu) {
  const JacobiForm& f = form_or_usage(id);
  if (f.q_chi <= 0) throw UsageError("form cannot be lifted: " + id);
  Rational qt = f.index() * f.q_chi;
  if (!is_integer(qt)) throw UsageError("q t is not integral for " + id);
  Window w = siegel_window(g.max_omega(), to_int64(qt));
  std::string recipe = mu == 1 ? "lift" : "lift_mu" + std::to_string(mu);
  emit(g, format_siegel(g, cached(g, recipe, id, w, [&] { return arithmetic_lift(f, mu, w); })));
  return kOk;
}

int cmd_borcherds(const Globals& g, const std::string& id) {
  const JacobiForm& f = form_or_usage(id);
  if (!is_integer(f.index())) throw UsageError("product input needs integral index: " + id);
  Window w = siegel_window(g.max_omega(), to_int64(f.index()));
  SiegelForm prod = cached(g, "product", id, w, [&] { return borcherds_expand(id, w); });
  std::string weyl = weyl_to_json(weyl_data(collect_cusp_data(id, g.max_omega())));
  if (!g.out.empty()) {
    emit(g, format_siegel(g, prod));
    Globals side = g;
    side.out = g.out + ".weyl.json";
    emit(side, weyl);
    return kOk;
  }
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["form"] = nlohmann::ordered_json::parse(siegel_to_json(prod));
    j["weyl"] = nlohmann::ordered_json::parse(weyl);
    emit(g, j.dump());
  } else if (g.format == "text") {
    emit(g, format_siegel(g, prod) + "Weyl data " + weyl + '\n');
  } else {
    emit(g, format_siegel(g, prod));
  }
  return kOk;
}

int cmd_trace(const Globals& g, const std::string& id, std::int64_t to) {
  const JacobiForm& f = form_or_usage(id);
  if (to < 1 || f.level % to != 0) throw UsageError("--to must divide the level " + std::to_string(f.level));
  JacobiForm tr = trace_to(f, to);
  Window w = Window::box(std::nullopt, g.max_omega());
  std::string name = "Tr_{Gamma0(" + std::to_string(to) + ")} " + id;
  emit(g, format_jacobi(g, name, "inf", expansion_at_infinity(tr, w)));
  return kOk;
}

int cmd_verify(const Globals& g, const std::string& which, bool list) {
  if (list) {
    std::ostringstream out;
    for (const auto& c : identity_cases())
      out << c.id << "  " << c.left << " = " << c.right << "  [" << c.truncation << "]\n";
    emit(g, out.str());
    return kOk;
  }
  VerifyOptions opt;
  opt.max_omega = g.max_omega();
  if (auto c = g.cache()) opt.cache_dir = c->dir();
  std::vector<IdentityResult> results;
  try {
    if (which == "all") {
      results = verify_all(opt);
    } else {
      if (!is_identity_id(which)) throw UsageError("unknown identity case: " + which);
      results.push_back(run_identity(which, opt));
    }
  } catch (const WindowTooSmall& e) {
    throw UsageError(e.what());
  }
  bool ok = true;
  std::ostringstream out;
  if (g.format == "json") {
    out << identity_report_json(results);
  } else if (g.format == "csv") {
    out << "id,passed,terms,window,detail\n";
    for (const auto& r : results)
      out << r.id << ',' << (r.passed ? "true" : "false") << ',' << r.terms << ",\"" << r.window << "\",\"" << r.detail
          << "\"\n";
  } else {
    for (const auto& r : results) {
      out << (r.passed ? "PASS " : "FAIL ") << r.id << "  (" << r.terms << " terms, " << r.window << ")";
      if (!r.detail.empty()) out << "  " << r.detail;
      out << '\n';
    }
  }
  for (const auto& r : results) {
    if (r.passed) continue;
    ok = false;
    std::cerr << "FAIL " << r.id << ": " << r.detail << '\n';
  }
  emit(g, out.str());
  return ok ? kOk : kVerifyFailed;
}

Complex parse_complex(const std::string& s) {
  auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return Complex(std::stod(s), 0.0);
    return Complex(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
  } catch (const std::exception&) {
    throw UsageError("expected a complex number as re,im: " + s);
  }
}

int cmd_eval(const Globals& g, const std::string& id, const std::string& tau_s, const std::string& z_s) {
  if (id != "eta" && id != "theta") form_or_usage(id);
  Complex tau = parse_complex(tau_s), z = parse_complex(z_s);
  if (tau.imag() <= 0) throw UsageError("tau must lie in the upper half-plane");
  Complex v = eval_numeric(id, tau, z);
  char buf[128];
  if (g.format == "csv") {
    std::snprintf(buf, sizeof buf, "re,im\n%.17g,%.17g\n", v.real(), v.imag());
  } else if (g.format == "text") {
    std::snprintf(buf, sizeof buf, "%s(%s; %s) = %.15g %+.15g i\n", id.c_str(), tau_s.c_str(), z_s.c_str(), v.real(),
                  v.imag());
  } else {
    std::snprintf(buf, sizeof buf, "{\"re\":%.17g,\"im\":%.17g}", v.real(), v.imag());
  }
  emit(g, buf);
  return kOk;
}

SiegelCache cache_or_usage(const Globals& g) {
  auto c = g.cache();
  if (!c) throw UsageError("no cache directory: pass --cache-dir or set DDFORMS_CACHE");
  return *c;
}

int cmd_cache_ls(const Globals& g) {
  SiegelCache c = cache_or_usage(g);
  auto entries = c.list();
  std::ostringstream out;
  if (g.format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : entries)
      arr.push_back({{"key", e.key}, {"file", e.file.filename().string()}, {"bytes", e.bytes}});
    out << arr.dump();
  } else if (g.format == "csv") {
    out << "key,file,bytes\n";
    for (const auto& e : entries) out << '"' << e.key << "\"," << e.file.filename().string() << ',' << e.bytes << '\n';
  } else {
    for (const auto& e : entries) out << e.file.filename().string() << "  " << e.bytes << "  " << e.key << '\n';
  }
  emit(g, out.str());
  return kOk;
}

int cmd_cache_clear(const Globals& g) {
  SiegelCache c = cache_or_usage(g);
  std::size_t n = c.clear();
  emit(g, "removed " + std::to_string(n) + " cache files\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Fourier expansions of dd-modular forms: lifts, Borcherds products and identity checks"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--prec", g.prec, "Largest omega-exponent of Siegel tables; q-precision of Jacobi expansions")
      ->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}))->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, "Coefficient cache directory (default: $DDFORMS_CACHE)");
  app.add_option("-o,--out", g.out, "Write the output to a file instead of stdout");
  app.add_flag("--seed-free", g.seed_free, "Accepted for compatibility; every computation is deterministic");

  std::function<int()> action;

  auto* cusps = app.add_subcommand("cusps", "Cusps of Gamma_0(N) with widths");
  std::int64_t level = 1;
  cusps->add_option("--level", level, "Level N")->required();
  cusps->callback([&] { action = [&] { return cmd_cusps(g, level); }; });

  auto* classify = app.add_subcommand("classify", "Solutions (t, N; k) of the weight identity");
  std::int64_t m = 1, max = 500;
  classify->add_option("--m", m, "Vanishing order along the diagonal")->capture_default_str();
  classify->add_option("--max", max, "Bound on t and N")->capture_default_str();
  classify->callback([&] { action = [&] { return cmd_classify(g, m, max); }; });

  std::string form_id, cusp_label = "inf";
  auto* expand = app.add_subcommand("expand", "Expansion of a registry Jacobi form at a cusp");
  expand->add_option("form", form_id, "Form id")->required();
  expand->add_option("--cusp", cusp_label, "Cusp label")->capture_default_str();
  expand->callback([&] { action = [&] { return cmd_expand(g, form_id, cusp_label); }; });

  std::int64_t mu = 1;
  auto* lift = app.add_subcommand("lift", "Arithmetic lift of a registry Jacobi form");
  lift->add_option("form", form_id, "Form id")->required();
  lift->add_option("--mu", mu, "Character twist mu")->capture_default_str();
  lift->callback([&] { action = [&] { return cmd_lift(g, form_id, mu); }; });

  auto* borch = app.add_subcommand("borcherds", "Borcherds product of a weak Jacobi form, with its Weyl data");
  borch->add_option("form", form_id, "Form id")->required();
  borch->callback([&] { action = [&] { return cmd_borcherds(g, form_id); }; });

  std::int64_t to = 1;
  auto* trace = app.add_subcommand("trace", "Trace of a form down to Gamma_0(d)");
  trace->add_option("form", form_id, "Form id")->required();
  trace->add_option("--to", to, "Target level d")->capture_default_str();
  trace->callback([&] { action = [&] { return cmd_trace(g, form_id, to); }; });

  std::string which = "all";
  bool list = false;
  auto* verify = app.add_subcommand("verify", "Run identity checks (exit 1 on any mismatch)");
  verify->add_option("case", which, "Case id or 'all'")->capture_default_str();
  verify->add_flag("--list", list, "List the registered cases");
  verify->callback([&] { action = [&] { return cmd_verify(g, which, list); }; });

  std::string tau_s = "0,1", z_s = "0,0";
  auto* eval = app.add_subcommand("eval", "Numeric value of a form at (tau, z)");
  eval->add_option("form", form_id, "Form id, or eta / theta")->required();
  eval->add_option("--tau", tau_s, "tau as re,im")->capture_default_str();
  eval->add_option("--z", z_s, "z as re,im")->capture_default_str();
  eval->callback([&] { action = [&] { return cmd_eval(g, form_id, tau_s, z_s); }; });

  auto* cache = app.add_subcommand("cache", "Inspect or empty the coefficient cache");
  cache->require_subcommand(1);
  auto* ls = cache->add_subcommand("ls", "List cached tables");
  ls->callback([&] { action = [&] { return cmd_cache_ls(g); }; });
  auto* clear = cache->add_subcommand("clear", "Delete cached tables");
  clear->callback([&] { action = [&] { return cmd_cache_clear(g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const WindowTooSmall& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const MathError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kVerifyFailed;
  }
}
