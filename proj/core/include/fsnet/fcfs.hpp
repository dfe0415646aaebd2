#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsnet/conv_oracle.hpp"
#include "fsnet/counter.hpp"
#include "fsnet/geometry.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet {

// Fast convolution over a filter summary.
//
// With M the unwrapped padded input and F the summary, the product matrix
// A(a, t) = M[a] * F[t] is never formed. A slice inner product between the
// feature slice starting at a and the filter slice starting at b is a sum
// along the diagonal d = a - b of A over columns [b, b + c_in * s1). Only
// the column runs that some (filter, output position, slice) triple touches
// are multiplied; each run carries a prefix sum so any slice product is one
// subtraction.

/// Half-open column range [begin, end) of the summary.
struct ColumnRun {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const noexcept { return end - begin; }
  friend bool operator==(const ColumnRun&, const ColumnRun&) = default;
};

struct DiagonalRuns {
  std::int64_t offset = 0;  // row index of M minus column index of F
  std::vector<ColumnRun> runs;  // sorted, disjoint, non-adjacent
};

struct DiagonalPlan {
  ConvGeometry geom;
  Layout layout;
  std::int64_t d1 = 0;
  std::int64_t d2 = 0;
  std::int64_t padded_d1 = 0;
  std::int64_t padded_d2 = 0;
  /// s is a multiple of c_in, so every offset is too.
  bool channel_aligned = false;
  std::vector<DiagonalRuns> diagonals;  // sorted by offset

  /// Number of A entries the plan materialises.
  std::int64_t total_entries() const noexcept;
  std::int64_t run_count() const noexcept;
};

/// Enumerates every (filter o, output (m, n), slice k) triple and records
/// the diagonal offset and column run it reads. Throws UnsupportedGeometry
/// when s2 == 1 and ShapeMismatch when the map channels disagree.
DiagonalPlan required_diagonals(const ConvGeometry& geom, std::int64_t d1, std::int64_t d2);

template <typename T>
DiagonalPlan required_diagonals(const FilterSummary<T>& fs, const FeatureMap<T>& map);

/// One materialised run of a critical line and its running sum:
///   integral[q] = sum_{t = start_col}^{start_col + q} M[t + offset] * F[t]
template <typename T>
struct DiagonalIntegral {
  std::int64_t offset = 0;
  std::int64_t start_col = 0;
  std::int64_t end_col = 0;  // exclusive
  std::vector<T> integral;

  /// sum_{t = first}^{last - 1} M[t + offset] * F[t]; [first, last) must
  /// lie inside [start_col, end_col).
  T range_sum(std::int64_t first, std::int64_t last) const noexcept {
    const auto hi = integral[static_cast<std::size_t>(last - 1 - start_col)];
    if (first == start_col) return hi;
    return hi - integral[static_cast<std::size_t>(first - 1 - start_col)];
  }
};

template <typename T>
class IntegralLines {
 public:
  IntegralLines() = default;
  IntegralLines(std::vector<std::int64_t> offsets, std::vector<std::size_t> first_run,
                std::vector<DiagonalIntegral<T>> lines);

  std::span<const DiagonalIntegral<T>> lines() const noexcept { return lines_; }

  /// The run on diagonal `offset` containing column `col`; nullptr if none.
  const DiagonalIntegral<T>* find(std::int64_t offset, std::int64_t col) const noexcept;

 private:
  std::vector<std::int64_t> offsets_;
  std::vector<std::size_t> first_run_;  // size offsets_.size() + 1
  std::vector<DiagonalIntegral<T>> lines_;
};

/// Materialises every planned run: one multiply per A entry, then a
/// left-to-right prefix sum (additions only). `padded` is the same-padded
/// unwrapped input.
template <typename T>
IntegralLines<T> build_integrals(const FilterSummary<T>& fs, const FeatureMap<T>& padded,
                                 const DiagonalPlan& plan, MultCounter* counter = nullptr,
                                 const ExecOptions& exec = {});

template <typename T>
struct FcfsResult {
  ConvOutput<T> output;
  MultCounter counter;
  /// Set when the stride is not channel aligned and the brute-force path
  /// produced the output instead.
  bool fell_back = false;
  std::string note;
};

/// Same result as naive_conv computed from integral lines. Stage three sums
/// s2 slice products per (filter, position) in order k = 0..s2-1.
template <typename T>
FcfsResult<T> fcfs_conv(const FilterSummary<T>& fs, const FeatureMap<T>& map,
                        const ExecOptions& exec = {});

template <typename T>
struct AccelerationMeasurement {
  MultCounter naive;
  MultCounter fcfs;
  double ratio = 0.0;  // naive.multiplies / fcfs.multiplies
  AccelerationPrediction predicted;
  double max_relative_deviation = 0.0;
  bool fell_back = false;
};

template <typename T>
AccelerationMeasurement<T> measured_acceleration(const FilterSummary<T>& fs,
                                                 const FeatureMap<T>& map,
                                                 const ExecOptions& exec = {});

}  // namespace fsnet
