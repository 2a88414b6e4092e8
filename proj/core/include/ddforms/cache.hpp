#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddforms/lift.hpp"

namespace ddforms {

// Library version, part of every cache key.
const char* version_string();

// Content-addressed store of Siegel tables: one JSON file per key, named by a hash of the key.
class SiegelCache {
 public:
  struct Entry {
    std::string key;
    std::filesystem::path file;
    std::uintmax_t bytes = 0;
  };

  explicit SiegelCache(std::filesystem::path dir);

  // Directory from DDFORMS_CACHE, or nullopt when unset or empty.
  static std::optional<std::filesystem::path> from_environment();

  // (recipe, form id, window policy, version)
  static std::string make_key(const std::string& recipe, const std::string& form_id, const Window& window);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const;

  std::optional<SiegelForm> load(const std::string& key) const;
  // Writes to a temporary file in the cache directory and renames it into place.
  void store(const std::string& key, const SiegelForm& form) const;
  SiegelForm get_or_compute(const std::string& key, const std::function<SiegelForm()>& compute) const;

  std::vector<Entry> list() const;
  std::size_t clear() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace ddforms
