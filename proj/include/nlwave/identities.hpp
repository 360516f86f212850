#pragma once

// Randomized self-test of the block-matrix determinant identities.

#include <cstdint>
#include <string>
#include <vector>

namespace nlwave::identities {

struct IdentityCheck {
  std::string name;
  int instances = 0;
  double max_error = 0.0;  // relative, or max-norm residual for the inverse update
  double tolerance = 0.0;
  bool passed = false;
};

inline constexpr double kIdentityTol = 1e-9;

/// Each identity on `instances` seeded draws with sizes 1..8.
std::vector<IdentityCheck> run_suite(std::uint64_t seed, int instances = 1000);

std::string format_suite(const std::vector<IdentityCheck>& checks);

}  // namespace nlwave::identities
