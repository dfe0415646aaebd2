#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fsnet/ratio.hpp"

namespace fsnet {

/// How the filter stride inside the summary is chosen.
///
///  - PaperGeneric:   s = floor((L - 1) / c_out)
///  - PaperAligned:   s rounded down to a multiple of c_in * s1
///  - ChannelAligned: s rounded down to a multiple of c_in
///
/// The fast convolution path needs s to be a multiple of c_in, so
/// ChannelAligned is the default.
enum class StridePolicy { PaperGeneric, PaperAligned, ChannelAligned };

std::string_view to_string(StridePolicy policy) noexcept;
StridePolicy parse_stride_policy(std::string_view text);

/// Static shape of one convolution layer whose filters live in a summary.
struct ConvGeometry {
  std::int64_t c_in = 1;
  std::int64_t s1 = 1;
  std::int64_t s2 = 1;
  std::int64_t c_out = 1;
  Ratio r{1};
  StridePolicy stride_policy = StridePolicy::ChannelAligned;

  /// Elements per filter (c_in * s1 * s2).
  std::int64_t filter_size() const noexcept { return c_in * s1 * s2; }
  /// Length of one S2-slice of a filter (c_in * s1).
  std::int64_t slice_size() const noexcept { return c_in * s1; }

  /// Throws InvalidGeometry / InvalidRatio.
  void validate() const;

  friend bool operator==(const ConvGeometry&, const ConvGeometry&) = default;
};

struct Layout {
  std::int64_t L = 0;       // nominal summary length floor(K * c_out / r)
  std::int64_t stride = 0;  // filter stride s
  Ratio l_prime;            // L / (c_in * s1)
  std::int64_t l_phys = 0;  // padded physical length

  /// One past the last index that any filter reads: (c_out - 1) * s + K.
  std::int64_t span = 0;

  friend bool operator==(const Layout&, const Layout&) = default;
};

/// floor((L - 1) / c_out), the unaligned stride every policy starts from.
std::int64_t generic_stride(std::int64_t L, std::int64_t c_out) noexcept;

/// Stride under the given policy; nullopt when PaperAligned rounds to zero.
std::optional<std::int64_t> policy_stride(const ConvGeometry& geom,
                                          std::int64_t L,
                                          StridePolicy policy) noexcept;

Layout derive_layout(const ConvGeometry& geom);

struct ParamCount {
  std::int64_t baseline = 0;  // K * c_out
  std::int64_t fs = 0;        // l_phys
  std::int64_t nominal = 0;   // L, the count that ignores padding
  Ratio cr;                   // baseline / fs
  Ratio nominal_cr;           // baseline / L

  std::int64_t padding() const noexcept { return fs - nominal; }
};

ParamCount count_params(const ConvGeometry& geom, const Layout& layout);

/// Multiply counts of the closed-form complexity model.
struct AccelerationPrediction {
  std::int64_t naive_mults = 0;
  double paper_fcfs_mults = 0.0;  // c_in*d1*d2*L' + c_out*d1*d2*s2
  double ratio = 0.0;
  /// False for s2 == 1, where the fast path does not accelerate anything.
  bool accelerable = false;
};

AccelerationPrediction predicted_acceleration(const ConvGeometry& geom,
                                              const Layout& layout,
                                              std::int64_t d1, std::int64_t d2);

}  // namespace fsnet
