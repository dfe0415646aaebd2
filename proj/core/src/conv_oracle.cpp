#include "fsnet/conv_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"

namespace fsnet {

template <typename T>
FeatureMap<T> pad_same(const FeatureMap<T>& map, std::int64_t s1, std::int64_t s2) {
  if (s1 < 1 || s2 < 1) throw Error(ErrorCode::InvalidGeometry, "kernel size must be positive");
  FeatureMap<T> padded(map.channels(), map.d1() + s1 - 1, map.d2() + s2 - 1);
  const auto top = pad_before(s1);
  const auto left = pad_before(s2);
  for (std::int64_t k = 0; k < map.d2(); ++k)
    for (std::int64_t j = 0; j < map.d1(); ++j)
      for (std::int64_t i = 0; i < map.channels(); ++i)
        padded.at(i, j + top, k + left) = map.at(i, j, k);
  return padded;
}

template <typename T>
ConvOutput<T> naive_conv(const FilterSummary<T>& fs, const FeatureMap<T>& map,
                         MultCounter* counter, const ExecOptions& exec) {
  const auto& g = fs.geometry();
  if (map.channels() != g.c_in) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(map.channels()) +
                                              " channels, filters expect " +
                                              std::to_string(g.c_in));
  }
  const auto padded = pad_same(map, g.s1, g.s2);
  ConvOutput<T> out(g.c_out, map.d1(), map.d2());

  std::vector<MultCounter> partial(std::max(1u, exec.workers));
  detail::parallel_chunks(g.c_out, exec.workers, [&](std::int64_t begin, std::int64_t end,
                                                     unsigned worker) {
    MultCounter local;
    for (std::int64_t o = begin; o < end; ++o) {
      const auto filter = filter_as_3d(fs, o);
      for (std::int64_t n = 0; n < map.d2(); ++n) {
        for (std::int64_t m = 0; m < map.d1(); ++m) {
          T acc{};
          for (std::int64_t k = 0; k < g.s2; ++k)
            for (std::int64_t j = 0; j < g.s1; ++j)
              for (std::int64_t i = 0; i < g.c_in; ++i)
                acc += filter(i, j, k) * padded.at(i, m + j, n + k);
          out.at(o, m, n) = acc;
          local.multiplies += static_cast<std::uint64_t>(g.filter_size());
          local.additions += static_cast<std::uint64_t>(g.filter_size() - 1);
        }
      }
    }
    partial[worker] += local;
  });

  if (counter) {
    for (const auto& p : partial) *counter += p;
  }
  return out;
}

template <typename T>
double max_relative_deviation(std::span<const T> value, std::span<const T> reference) {
  if (value.size() != reference.size()) {
    throw Error(ErrorCode::ShapeMismatch, "deviation between sizes " +
                                              std::to_string(value.size()) + " and " +
                                              std::to_string(reference.size()));
  }
  double max_diff = 0.0;
  double max_ref = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double a = static_cast<double>(value[i]);
    const double b = static_cast<double>(reference[i]);
    if (std::isnan(a) != std::isnan(b)) return INFINITY;
    max_diff = std::max(max_diff, std::abs(a - b));
    max_ref = std::max(max_ref, std::abs(b));
  }
  return max_ref > 0.0 ? max_diff / max_ref : max_diff;
}

template FeatureMap<float> pad_same(const FeatureMap<float>&, std::int64_t, std::int64_t);
template FeatureMap<double> pad_same(const FeatureMap<double>&, std::int64_t, std::int64_t);
template ConvOutput<float> naive_conv(const FilterSummary<float>&, const FeatureMap<float>&,
                                      MultCounter*, const ExecOptions&);
template ConvOutput<double> naive_conv(const FilterSummary<double>&, const FeatureMap<double>&,
                                       MultCounter*, const ExecOptions&);
template double max_relative_deviation(std::span<const float>, std::span<const float>);
template double max_relative_deviation(std::span<const double>, std::span<const double>);

}  // namespace fsnet
