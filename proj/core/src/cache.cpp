#include "ddforms/cache.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#ifndef DDFORMS_VERSION
#define DDFORMS_VERSION "0.0.0"
#endif

namespace ddforms {

namespace fs = std::filesystem;

const char* version_string() { return "ddforms-" DDFORMS_VERSION; }

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MathError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Cache files are named <16 hex digits>.json; temporaries add .tmp.<pid>.
bool is_cache_name(const std::string& name, bool allow_tmp) {
  if (name.size() < 21 || name.compare(16, 5, ".json") != 0) return false;
  for (std::size_t i = 0; i < 16; ++i)
    if (!std::isxdigit(static_cast<unsigned char>(name[i]))) return false;
  if (name.size() == 21) return true;
  return allow_tmp && name.compare(21, 5, ".tmp.") == 0;
}

}  // namespace

SiegelCache::SiegelCache(fs::path dir) : dir_(std::move(dir)) {}

std::optional<fs::path> SiegelCache::from_environment() {
  const char* env = std::getenv("DDFORMS_CACHE");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return fs::path(env);
}

std::string SiegelCache::make_key(const std::string& recipe, const std::string& form_id, const Window& window) {
  return recipe + ":" + form_id + "|" + window.to_string() + "|" + version_string();
}

fs::path SiegelCache::path_for(const std::string& key) const {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.json", static_cast<unsigned long long>(fnv1a(key)));
  return dir_ / name;
}

std::optional<SiegelForm> SiegelCache::load(const std::string& key) const {
  fs::path p = path_for(key);
  if (!fs::exists(p)) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw MathError("corrupt cache file " + p.string() + ": " + e.what());
  }
  // A hash collision or a stale file with another key is treated as a miss.
  if (!j.is_object() || j.value("key", std::string()) != key || !j.contains("form")) return std::nullopt;
  return siegel_from_json(j.at("form").dump());
}

void SiegelCache::store(const std::string& key, const SiegelForm& form) const {
  fs::create_directories(dir_);
  nlohmann::ordered_json j;
  j["key"] = key;
  j["form"] = nlohmann::ordered_json::parse(siegel_to_json(form));
  fs::path target = path_for(key);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw MathError("cannot write " + tmp.string());
    out << j.dump() << '\n';
    if (!out.flush()) throw MathError("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

SiegelForm SiegelCache::get_or_compute(const std::string& key, const std::function<SiegelForm()>& compute) const {
  if (auto hit = load(key)) return *hit;
  SiegelForm f = compute();
  store(key, f);
  return f;
}

std::vector<SiegelCache::Entry> SiegelCache::list() const {
  std::vector<Entry> out;
  if (!fs::is_directory(dir_)) return out;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (!e.is_regular_file() || !is_cache_name(e.path().filename().string(), false)) continue;
    Entry entry{"", e.path(), e.file_size()};
    try {
      auto j = nlohmann::json::parse(read_file(e.path()));
      entry.key = j.value("key", std::string());
    } catch (const nlohmann::json::exception&) {
      entry.key = "<unreadable>";
    }
    out.push_back(std::move(entry));
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
  return out;
}

std::size_t SiegelCache::clear() const {
  std::size_t removed = 0;
  if (!fs::is_directory(dir_)) return 0;
  std::vector<fs::path> victims;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.is_regular_file() && is_cache_name(e.path().filename().string(), true)) victims.push_back(e.path());
  }
  for (const auto& p : victims) removed += fs::remove(p) ? 1 : 0;
  return removed;
}

}  // namespace ddforms
