#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "series_helpers.hpp"
#include "ddforms/borcherds.hpp"
#include "ddforms/cache.hpp"
#include "ddforms/identities.hpp"

using namespace ddforms;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ddforms_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("registry lists every identity case") {
    std::vector<std::string> expected{"nabla3_lift_eq_product", "nabla2_lift_eq_product", "q1_lift_eq_product",
                                      "nabla32_sq_eq_F3",      "dd_powers_1",            "dd_powers_2",
                                      "dd_powers_3",           "dd_powers_4",            "delta5_eq_Bphi01",
                                      "lemma_d1_phi2",         "lemma_d1_phi3",          "lemma_d1_phi4",
                                      "lemma_d1_psi",          "eq_zero_phi01",          "eq_zero_phi02",
                                      "trace_phi2",            "trace_phi4",             "trace_psi",
                                      "reflective_5_3",        "reflective_5_2",         "reflective_q1",
                                      "vt_symmetry",           "q1_nonexistence_slot"};
    std::vector<std::string> ids;
    for (const auto& c : identity_cases()) ids.push_back(c.id);
    CHECK(ids == expected);
    CHECK(is_identity_id("trace_psi"));
    CHECK_FALSE(is_identity_id("trace_phi3"));
  }

  TEST_CASE("every case passes at the default precision") {
    auto results = verify_all(VerifyOptions{});
    for (const auto& r : results) {
      CAPTURE(r.id);
      CHECK(r.passed);
      CHECK(r.detail.find("left") == std::string::npos);
    }
    auto it = std::find_if(results.begin(), results.end(), [](const IdentityResult& r) { return r.id == "vt_symmetry"; });
    REQUIRE(it != results.end());
    CHECK(it->terms > 100);
  }

  TEST_CASE("precision and id errors") {
    CHECK_THROWS_AS(run_identity("nabla3_lift_eq_product", VerifyOptions{Rational(0), {}}), WindowTooSmall);
    // at omega <= 1 the rescaled Delta_5 has no coefficient left
    CHECK_THROWS_AS(run_identity("reflective_5_2", VerifyOptions{Rational(1), {}}), WindowTooSmall);
    CHECK_THROWS_AS(run_identity("no_such_case", VerifyOptions{}), MathError);
  }

  TEST_CASE("cache round trip equals recomputation") {
    TempDir dir;
    SiegelCache cache(dir.path);
    Window w = siegel_window(Rational(3), 2);
    std::string key = SiegelCache::make_key("lift", "q1_in", w);
    CHECK(key.find(version_string()) != std::string::npos);
    CHECK_FALSE(cache.load(key).has_value());
    int computed = 0;
    auto compute = [&] {
      ++computed;
      return arithmetic_lift(registry_form("q1_in"), 1, w);
    };
    SiegelForm first = cache.get_or_compute(key, compute);
    SiegelForm second = cache.get_or_compute(key, compute);
    CHECK(computed == 1);
    CHECK(siegel_to_json(first) == siegel_to_json(second));
    CHECK(testing::mismatch_or_empty(second.series, compute().series) == "");
    // nothing but the hashed file is left behind
    auto entries = cache.list();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].key == key);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++files;
    CHECK(files == 1);
    CHECK(cache.clear() == 1);
    CHECK(cache.list().empty());
  }

  TEST_CASE("a corrupted cache entry makes its case fail with a coefficient diff") {
    TempDir dir;
    VerifyOptions opt{Rational(2), dir.path};
    CHECK(run_identity("nabla3_lift_eq_product", opt).passed);
    SiegelCache cache(dir.path);
    Window w = siegel_window(Rational(2), 1);
    std::string key = SiegelCache::make_key("lift", "nabla3_in", w);
    SiegelForm f = *cache.load(key);
    auto terms = f.series.terms();
    terms[0].second += 1;
    f.series = TriSeries::from_terms(f.series.dens(), f.series.window(), terms);
    cache.store(key, f);
    auto r = run_identity("nabla3_lift_eq_product", opt);
    CHECK_FALSE(r.passed);
    CHECK(r.detail.find("q^1/2 r^-1/2 s^1/2") != std::string::npos);
    // recomputation after clearing restores the identity
    cache.clear();
    CHECK(run_identity("nabla3_lift_eq_product", opt).passed);
  }

  TEST_CASE("a cache file holding another key is a miss") {
    TempDir dir;
    SiegelCache cache(dir.path);
    Window w = siegel_window(Rational(1), 1);
    std::string key = SiegelCache::make_key("lift", "nabla3_in", w);
    cache.store(key, arithmetic_lift(registry_form("nabla3_in"), 1, w));
    std::string text = slurp(cache.path_for(key));
    auto pos = text.find("lift:nabla3_in");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, "LIFT");
    std::ofstream(cache.path_for(key)) << text;
    CHECK_FALSE(cache.load(key).has_value());
  }

  TEST_CASE("exports are byte-deterministic") {
    Window w = siegel_window(Rational(2), 1);
    CHECK(siegel_to_json(borcherds_expand("phi2", w)) == siegel_to_json(borcherds_expand("phi2", w)));
    VerifyOptions opt;
    CHECK(identity_report_json({run_identity("trace_psi", opt)}) ==
          identity_report_json({run_identity("trace_psi", opt)}));
  }
}
