#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsnet/error.hpp"
#include "fsnet/geometry.hpp"

namespace fsnet {

/// Dense 3D array indexed (channel, row, column), stored row-major.
template <typename T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::int64_t c, std::int64_t d1, std::int64_t d2, T fill = T{});
  Tensor3(std::int64_t c, std::int64_t d1, std::int64_t d2, std::vector<T> data);

  std::int64_t channels() const noexcept { return c_; }
  std::int64_t d1() const noexcept { return d1_; }
  std::int64_t d2() const noexcept { return d2_; }
  std::int64_t size() const noexcept { return c_ * d1_ * d2_; }

  T& operator()(std::int64_t i, std::int64_t j, std::int64_t k) noexcept {
    return data_[static_cast<std::size_t>((i * d1_ + j) * d2_ + k)];
  }
  const T& operator()(std::int64_t i, std::int64_t j, std::int64_t k) const noexcept {
    return data_[static_cast<std::size_t>((i * d1_ + j) * d2_ + k)];
  }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::int64_t c_ = 0;
  std::int64_t d1_ = 0;
  std::int64_t d2_ = 0;
  std::vector<T> data_;
};

/// Flat position of (channel i, row j, column k) in the channel-major
/// unwrapped vector: k * c_in * d1 + j * c_in + i.
constexpr std::int64_t unwrap_offset(std::int64_t i, std::int64_t j, std::int64_t k,
                                     std::int64_t c_in, std::int64_t d1) noexcept {
  return k * c_in * d1 + j * c_in + i;
}

/// Bounds-checked unwrap_offset. Throws OutOfRange.
std::int64_t unwrap_index(std::int64_t i, std::int64_t j, std::int64_t k,
                          std::int64_t c_in, std::int64_t d1, std::int64_t d2);

/// Activation tensor held in channel-major unwrapped order.
template <typename T>
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::int64_t c_in, std::int64_t d1, std::int64_t d2, T fill = T{});
  /// `data` must already be in unwrapped order. Throws ShapeMismatch.
  FeatureMap(std::int64_t c_in, std::int64_t d1, std::int64_t d2, std::vector<T> data);

  std::int64_t channels() const noexcept { return c_in_; }
  std::int64_t d1() const noexcept { return d1_; }
  std::int64_t d2() const noexcept { return d2_; }
  std::int64_t size() const noexcept { return c_in_ * d1_ * d2_; }

  T& at(std::int64_t i, std::int64_t j, std::int64_t k) noexcept {
    return data_[static_cast<std::size_t>(unwrap_offset(i, j, k, c_in_, d1_))];
  }
  const T& at(std::int64_t i, std::int64_t j, std::int64_t k) const noexcept {
    return data_[static_cast<std::size_t>(unwrap_offset(i, j, k, c_in_, d1_))];
  }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::int64_t c_in_ = 0;
  std::int64_t d1_ = 0;
  std::int64_t d2_ = 0;
  std::vector<T> data_;
};

template <typename T>
FeatureMap<T> unwrap(const Tensor3<T>& tensor);

template <typename T>
Tensor3<T> wrap(const FeatureMap<T>& map);

/// Shared-weight vector plus the layout that places c_out filters in it.
/// Filter i is weights[i*s, i*s + K).
template <typename T>
class FilterSummary {
 public:
  FilterSummary() = default;
  /// Zero-initialised summary of length l_phys.
  explicit FilterSummary(const ConvGeometry& geom);
  /// Throws ShapeMismatch when weights.size() != l_phys.
  FilterSummary(const ConvGeometry& geom, std::vector<T> weights);

  const ConvGeometry& geometry() const noexcept { return geom_; }
  const Layout& layout() const noexcept { return layout_; }

  std::span<const T> weights() const noexcept { return weights_; }
  std::span<T> weights() noexcept { return weights_; }

  std::int64_t filter_size() const noexcept { return geom_.filter_size(); }
  std::int64_t filter_count() const noexcept { return geom_.c_out; }
  std::int64_t stride() const noexcept { return layout_.stride; }

 private:
  ConvGeometry geom_;
  Layout layout_;
  std::vector<T> weights_;
};

/// View of filter i inside the summary (no copy). Throws OutOfRange.
template <typename T>
std::span<const T> extract_filter(const FilterSummary<T>& fs, std::int64_t i);

/// Filter i reshaped to (c_in, s1, s2); the filter segment is its
/// channel-major flattening. Throws OutOfRange.
template <typename T>
Tensor3<T> filter_as_3d(const FilterSummary<T>& fs, std::int64_t i);

/// Channel-major flattening of a filter-shaped tensor.
template <typename T>
std::vector<T> flatten_filter(const Tensor3<T>& filter);

/// Deterministic fan-in initialisation: uniform in [-b, b], b = sqrt(6 / K),
/// drawn from a 64-bit Mersenne Twister seeded with `seed`.
template <typename T>
FilterSummary<T> random_filter_summary(const ConvGeometry& geom, std::uint64_t seed);

/// Uniform [-1, 1) activations from the same generator family.
template <typename T>
FeatureMap<T> random_feature_map(std::int64_t c_in, std::int64_t d1, std::int64_t d2,
                                 std::uint64_t seed);

}  // namespace fsnet
