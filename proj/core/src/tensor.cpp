#include "fsnet/tensor.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fsnet {

namespace {

void check_dims(std::int64_t c, std::int64_t d1, std::int64_t d2) {
  if (c < 1 || d1 < 1 || d2 < 1) {
    throw Error(ErrorCode::ShapeMismatch, "tensor dimensions must be positive");
  }
}

std::string shape_text(std::int64_t c, std::int64_t d1, std::int64_t d2) {
  return std::to_string(c) + "x" + std::to_string(d1) + "x" + std::to_string(d2);
}

// 53 random mantissa bits mapped to [0, 1); identical on every platform,
// unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

template <typename T>
Tensor3<T>::Tensor3(std::int64_t c, std::int64_t d1, std::int64_t d2, T fill)
    : c_(c), d1_(d1), d2_(d2) {
  check_dims(c, d1, d2);
  data_.assign(static_cast<std::size_t>(c * d1 * d2), fill);
}

template <typename T>
Tensor3<T>::Tensor3(std::int64_t c, std::int64_t d1, std::int64_t d2, std::vector<T> data)
    : c_(c), d1_(d1), d2_(d2), data_(std::move(data)) {
  check_dims(c, d1, d2);
  if (static_cast<std::int64_t>(data_.size()) != c * d1 * d2) {
    throw Error(ErrorCode::ShapeMismatch, "tensor " + shape_text(c, d1, d2) + " given " +
                                              std::to_string(data_.size()) + " values");
  }
}

std::int64_t unwrap_index(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t c_in,
                          std::int64_t d1, std::int64_t d2) {
  if (i < 0 || i >= c_in || j < 0 || j >= d1 || k < 0 || k >= d2) {
    throw Error(ErrorCode::OutOfRange, "index (" + std::to_string(i) + ", " +
                                           std::to_string(j) + ", " + std::to_string(k) +
                                           ") outside " + shape_text(c_in, d1, d2));
  }
  return unwrap_offset(i, j, k, c_in, d1);
}

template <typename T>
FeatureMap<T>::FeatureMap(std::int64_t c_in, std::int64_t d1, std::int64_t d2, T fill)
    : c_in_(c_in), d1_(d1), d2_(d2) {
  check_dims(c_in, d1, d2);
  data_.assign(static_cast<std::size_t>(c_in * d1 * d2), fill);
}

template <typename T>
FeatureMap<T>::FeatureMap(std::int64_t c_in, std::int64_t d1, std::int64_t d2,
                          std::vector<T> data)
    : c_in_(c_in), d1_(d1), d2_(d2), data_(std::move(data)) {
  check_dims(c_in, d1, d2);
  if (static_cast<std::int64_t>(data_.size()) != c_in * d1 * d2) {
    throw Error(ErrorCode::ShapeMismatch, "feature map " + shape_text(c_in, d1, d2) +
                                              " given " + std::to_string(data_.size()) +
                                              " values");
  }
}

template <typename T>
FeatureMap<T> unwrap(const Tensor3<T>& tensor) {
  FeatureMap<T> map(tensor.channels(), tensor.d1(), tensor.d2());
  for (std::int64_t i = 0; i < tensor.channels(); ++i)
    for (std::int64_t j = 0; j < tensor.d1(); ++j)
      for (std::int64_t k = 0; k < tensor.d2(); ++k) map.at(i, j, k) = tensor(i, j, k);
  return map;
}

template <typename T>
Tensor3<T> wrap(const FeatureMap<T>& map) {
  Tensor3<T> tensor(map.channels(), map.d1(), map.d2());
  for (std::int64_t i = 0; i < map.channels(); ++i)
    for (std::int64_t j = 0; j < map.d1(); ++j)
      for (std::int64_t k = 0; k < map.d2(); ++k) tensor(i, j, k) = map.at(i, j, k);
  return tensor;
}

template <typename T>
FilterSummary<T>::FilterSummary(const ConvGeometry& geom)
    : geom_(geom), layout_(derive_layout(geom)) {
  weights_.assign(static_cast<std::size_t>(layout_.l_phys), T{});
}

template <typename T>
FilterSummary<T>::FilterSummary(const ConvGeometry& geom, std::vector<T> weights)
    : geom_(geom), layout_(derive_layout(geom)), weights_(std::move(weights)) {
  if (static_cast<std::int64_t>(weights_.size()) != layout_.l_phys) {
    throw Error(ErrorCode::ShapeMismatch, "summary needs " + std::to_string(layout_.l_phys) +
                                              " weights, given " +
                                              std::to_string(weights_.size()));
  }
}

template <typename T>
std::span<const T> extract_filter(const FilterSummary<T>& fs, std::int64_t i) {
  if (i < 0 || i >= fs.filter_count()) {
    throw Error(ErrorCode::OutOfRange, "filter " + std::to_string(i) + " of " +
                                           std::to_string(fs.filter_count()));
  }
  const auto start = static_cast<std::size_t>(i * fs.stride());
  return fs.weights().subspan(start, static_cast<std::size_t>(fs.filter_size()));
}

template <typename T>
Tensor3<T> filter_as_3d(const FilterSummary<T>& fs, std::int64_t i) {
  const auto& g = fs.geometry();
  const auto segment = extract_filter(fs, i);
  Tensor3<T> filter(g.c_in, g.s1, g.s2);
  for (std::int64_t c = 0; c < g.c_in; ++c)
    for (std::int64_t j = 0; j < g.s1; ++j)
      for (std::int64_t k = 0; k < g.s2; ++k)
        filter(c, j, k) = segment[static_cast<std::size_t>(unwrap_offset(c, j, k, g.c_in, g.s1))];
  return filter;
}

template <typename T>
std::vector<T> flatten_filter(const Tensor3<T>& filter) {
  const auto map = unwrap(filter);
  return std::vector<T>(map.data().begin(), map.data().end());
}

template <typename T>
FilterSummary<T> random_filter_summary(const ConvGeometry& geom, std::uint64_t seed) {
  FilterSummary<T> fs(geom);
  std::mt19937_64 rng(seed);
  const double bound = std::sqrt(6.0 / static_cast<double>(geom.filter_size()));
  for (auto& w : fs.weights()) w = static_cast<T>(bound * (2.0 * unit_uniform(rng) - 1.0));
  return fs;
}

template <typename T>
FeatureMap<T> random_feature_map(std::int64_t c_in, std::int64_t d1, std::int64_t d2,
                                 std::uint64_t seed) {
  FeatureMap<T> map(c_in, d1, d2);
  std::mt19937_64 rng(seed);
  for (auto& x : map.data()) x = static_cast<T>(2.0 * unit_uniform(rng) - 1.0);
  return map;
}

#define FSNET_INSTANTIATE(T)                                                               \
  template class Tensor3<T>;                                                               \
  template class FeatureMap<T>;                                                            \
  template class FilterSummary<T>;                                                         \
  template FeatureMap<T> unwrap(const Tensor3<T>&);                                        \
  template Tensor3<T> wrap(const FeatureMap<T>&);                                          \
  template std::span<const T> extract_filter(const FilterSummary<T>&, std::int64_t);       \
  template Tensor3<T> filter_as_3d(const FilterSummary<T>&, std::int64_t);                 \
  template std::vector<T> flatten_filter(const Tensor3<T>&);                               \
  template FilterSummary<T> random_filter_summary(const ConvGeometry&, std::uint64_t);     \
  template FeatureMap<T> random_feature_map(std::int64_t, std::int64_t, std::int64_t,      \
                                            std::uint64_t);

FSNET_INSTANTIATE(float)
FSNET_INSTANTIATE(double)

#undef FSNET_INSTANTIATE

}  // namespace fsnet
