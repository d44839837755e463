#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace delayflock {

struct SelftestResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Fast invariant checks on seeded random states and small runs.
std::vector<SelftestResult> run_selftest(std::uint64_t seed = 20240607);

}  // namespace delayflock
