#pragma once

#include <span>

#include "fsnet/counter.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet {

/// Output activations; same unwrapped layout as the input map.
template <typename T>
using ConvOutput = FeatureMap<T>;

struct ExecOptions {
  /// Number of worker threads; 0 or 1 runs on the calling thread.
  unsigned workers = 1;
};

/// Leading zero rows of "same" padding along a kernel axis of size s.
constexpr std::int64_t pad_before(std::int64_t s) noexcept { return (s - 1) / 2; }

/// Zero pad to (d1 + s1 - 1, d2 + s2 - 1), content offset by
/// ((s1 - 1) / 2, (s2 - 1) / 2).
template <typename T>
FeatureMap<T> pad_same(const FeatureMap<T>& map, std::int64_t s1, std::int64_t s2);

/// Brute-force stride-1 same-padded cross-correlation:
///   out(o, m, n) = sum_{i,j,k} filter_o(i, j, k) * padded(i, m + j, n + k)
/// Summation runs i fastest, then j, then k. Throws ShapeMismatch.
template <typename T>
ConvOutput<T> naive_conv(const FilterSummary<T>& fs, const FeatureMap<T>& map,
                         MultCounter* counter = nullptr, const ExecOptions& exec = {});

/// max |a - b| / max |reference|, or the absolute deviation when the
/// reference is identically zero. Throws ShapeMismatch.
template <typename T>
double max_relative_deviation(std::span<const T> value, std::span<const T> reference);

template <typename T>
double max_relative_deviation(const FeatureMap<T>& value, const FeatureMap<T>& reference) {
  return max_relative_deviation(std::span<const T>(value.data()),
                                std::span<const T>(reference.data()));
}

}  // namespace fsnet
