#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace fsnet {

/// Exact non-negative rational number with 64-bit parts, always stored in
/// lowest terms with a positive denominator.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den = 1);

  /// Accepts "4", "3.7" or "7/2".
  static Ratio parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// Shortest decimal form when the denominator is a power of ten,
  /// otherwise "num/den".
  std::string to_string() const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

  friend Ratio operator*(const Ratio& a, const Ratio& b);
  friend Ratio operator/(const Ratio& a, const Ratio& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// floor(value / r) for a non-negative integer value.
std::int64_t floor_div(std::int64_t value, const Ratio& r);

}  // namespace fsnet
