#include "fsnet/geometry.hpp"

#include <algorithm>

#include "fsnet/error.hpp"

namespace fsnet {

std::string_view to_string(StridePolicy policy) noexcept {
  switch (policy) {
    case StridePolicy::PaperGeneric: return "paper_generic";
    case StridePolicy::PaperAligned: return "paper_aligned";
    case StridePolicy::ChannelAligned: return "channel_aligned";
  }
  return "unknown";
}

StridePolicy parse_stride_policy(std::string_view text) {
  if (text == "paper_generic") return StridePolicy::PaperGeneric;
  if (text == "paper_aligned") return StridePolicy::PaperAligned;
  if (text == "channel_aligned") return StridePolicy::ChannelAligned;
  throw Error(ErrorCode::ParseError, "unknown stride policy '" + std::string(text) + "'");
}

void ConvGeometry::validate() const {
  if (c_in < 1 || s1 < 1 || s2 < 1 || c_out < 1) {
    throw Error(ErrorCode::InvalidGeometry,
                "c_in, s1, s2, c_out must be positive (got " + std::to_string(c_in) + ", " +
                    std::to_string(s1) + ", " + std::to_string(s2) + ", " +
                    std::to_string(c_out) + ")");
  }
  if (r < Ratio(1)) {
    throw Error(ErrorCode::InvalidRatio, "compression ratio " + r.to_string() + " < 1");
  }
}

std::int64_t generic_stride(std::int64_t L, std::int64_t c_out) noexcept {
  return (L - 1) / c_out;
}

std::optional<std::int64_t> policy_stride(const ConvGeometry& geom, std::int64_t L,
                                          StridePolicy policy) noexcept {
  const auto base = generic_stride(L, geom.c_out);
  switch (policy) {
    case StridePolicy::PaperGeneric:
      return base;
    case StridePolicy::PaperAligned: {
      const auto unit = geom.slice_size();
      const auto s = base / unit * unit;
      if (s == 0) return std::nullopt;
      return s;
    }
    case StridePolicy::ChannelAligned:
      return base / geom.c_in * geom.c_in;
  }
  return base;
}

Layout derive_layout(const ConvGeometry& geom) {
  geom.validate();
  const auto K = geom.filter_size();
  Layout layout;
  layout.L = floor_div(K * geom.c_out, geom.r);
  if (layout.L < K) {
    throw Error(ErrorCode::InvalidRatio, "summary length " + std::to_string(layout.L) +
                                             " shorter than one filter (K = " +
                                             std::to_string(K) + ")");
  }
  const auto stride = policy_stride(geom, layout.L, geom.stride_policy);
  if (!stride) {
    throw Error(ErrorCode::DegenerateStride,
                "stride aligned to c_in*s1 = " + std::to_string(geom.slice_size()) +
                    " rounds floor((L-1)/c_out) = " +
                    std::to_string(generic_stride(layout.L, geom.c_out)) + " down to 0");
  }
  layout.stride = *stride;
  layout.l_prime = Ratio(layout.L, geom.slice_size());
  layout.span = (geom.c_out - 1) * layout.stride + K;
  layout.l_phys = std::max(layout.L, layout.span);
  return layout;
}

ParamCount count_params(const ConvGeometry& geom, const Layout& layout) {
  ParamCount count;
  count.baseline = geom.filter_size() * geom.c_out;
  count.fs = layout.l_phys;
  count.nominal = layout.L;
  count.cr = Ratio(count.baseline, count.fs);
  count.nominal_cr = Ratio(count.baseline, count.nominal);
  return count;
}

AccelerationPrediction predicted_acceleration(const ConvGeometry& geom, const Layout& layout,
                                              std::int64_t d1, std::int64_t d2) {
  if (d1 < 1 || d2 < 1) {
    throw Error(ErrorCode::InvalidGeometry, "spatial size must be positive");
  }
  AccelerationPrediction p;
  const auto positions = d1 * d2;
  p.naive_mults = geom.c_out * positions * geom.filter_size();
  p.paper_fcfs_mults = static_cast<double>(geom.c_in * positions) * layout.l_prime.to_double() +
                       static_cast<double>(geom.c_out * positions * geom.s2);
  p.ratio = static_cast<double>(p.naive_mults) / p.paper_fcfs_mults;
  p.accelerable = geom.s2 > 1;
  return p;
}

}  // namespace fsnet
