#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ddforms/rational.hpp"

namespace ddforms {

// A verification case compares two recipes by exact equality on a truncation window.
struct IdentityCase {
  std::string id;
  std::string left;
  std::string right;
  std::string truncation;
};

struct IdentityResult {
  std::string id;
  bool passed = false;
  std::string window;
  std::size_t terms = 0;   // nonzero coefficients compared (largest side)
  std::string detail;      // first mismatching coefficient, or a note
  double seconds = 0;
};

struct VerifyOptions {
  Rational max_omega{2};  // bound on the omega-exponent of every Siegel table
  std::optional<std::filesystem::path> cache_dir;
};

// Thrown when a case's window holds no nonzero coefficient on either side.
class WindowTooSmall : public MathError {
 public:
  using MathError::MathError;
};

const std::vector<IdentityCase>& identity_cases();
bool is_identity_id(const std::string& id);

// Throws MathError for an unknown id and WindowTooSmall for a vacuous window.
IdentityResult run_identity(const std::string& id, const VerifyOptions& options);
std::vector<IdentityResult> verify_all(const VerifyOptions& options);

std::string identity_report_json(const std::vector<IdentityResult>& results);

}  // namespace ddforms
