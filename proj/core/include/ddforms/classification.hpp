#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddforms/rational.hpp"

namespace ddforms {

struct Candidate {
  std::int64_t t = 1;
  std::int64_t level = 1;
  std::int64_t k_x2 = 0;
  std::int64_t m = 1;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// k N prod_{p | N, p !| t} (p^2 + 1) / (p (p + 1)) * t^2 prod_{p | t} (p^2 + 1) / p^2
Rational weight_identity_lhs(std::int64_t t, std::int64_t level, std::int64_t k_x2);

// 2^{[t > 1]} 5 m
Rational weight_identity_rhs(std::int64_t t, std::int64_t m);

// All (t, N, k) with t <= t_max, N <= n_max and 2k a positive integer solving lhs = rhs, ordered by (t, N).
std::vector<Candidate> enumerate_dd_candidates(std::int64_t t_max, std::int64_t n_max, std::int64_t m);

std::string candidates_to_json(const std::vector<Candidate>& cs);

}  // namespace ddforms
