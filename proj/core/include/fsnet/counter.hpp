#pragma once

#include <cstdint>

namespace fsnet {

/// Floating-point operation tally for one kernel run.
struct MultCounter {
  std::uint64_t multiplies = 0;
  std::uint64_t additions = 0;

  MultCounter& operator+=(const MultCounter& other) noexcept {
    multiplies += other.multiplies;
    additions += other.additions;
    return *this;
  }
  friend MultCounter operator+(MultCounter a, const MultCounter& b) noexcept { return a += b; }
  friend bool operator==(const MultCounter&, const MultCounter&) = default;
};

}  // namespace fsnet
