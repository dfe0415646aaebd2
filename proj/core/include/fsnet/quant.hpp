#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsnet/counter.hpp"
#include "fsnet/ratio.hpp"

namespace fsnet {

/// Linear n-bit codes with one (min, max) pair for the whole layer.
struct QuantizedSummary {
  std::vector<std::uint8_t> codes;
  int nbits = 8;
  double w_min = 0.0;
  double w_max = 0.0;
  double tau = 0.0;  // (w_max - w_min) / (2^nbits - 1)

  int max_code() const noexcept { return (1 << nbits) - 1; }

  friend bool operator==(const QuantizedSummary&, const QuantizedSummary&) = default;
};

/// Step between adjacent levels.
double quant_step(double w_min, double w_max, int nbits) noexcept;

/// Maps each weight to its nearest of 2^nbits evenly spaced levels between
/// the extrema; exact halves round up (away from zero in code space).
/// Throws EmptyInput, and InvalidGeometry for nbits other than 4 or 8.
QuantizedSummary quantize(std::span<const double> weights, int nbits);
QuantizedSummary quantize(std::span<const float> weights, int nbits);

/// Rebuilds a summary from stored codes and extrema. Throws FormatError on
/// a code outside the level range.
QuantizedSummary make_quantized(std::vector<std::uint8_t> codes, int nbits, double w_min,
                                double w_max);

/// w_min + tau * code; the top code returns w_max exactly.
double dequantize_code(const QuantizedSummary& q, std::uint8_t code) noexcept;
std::vector<double> dequantize(const QuantizedSummary& q);

/// Row-major affine layer y = W x + b quantized with one shared range over
/// the weights and the bias.
struct QuantizedAffine {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  QuantizedSummary weights;  // rows * cols codes
  QuantizedSummary bias;     // rows codes, same w_min / tau as weights
};

/// Throws ShapeMismatch / EmptyInput.
QuantizedAffine quantize_affine(std::span<const double> w, std::span<const double> b,
                                std::int64_t rows, std::int64_t cols, int nbits);

/// Dense reference: dequantize, then W~ x + b~.
std::vector<double> dequantized_affine_forward(const QuantizedSummary& q_w,
                                               const QuantizedSummary& q_b,
                                               std::span<const double> x,
                                               MultCounter* counter = nullptr);

/// Integer-code path: y0 = W0 x + b0 on the codes, then
///   y~_i = tau * y0_i + s0 * (sum(x) + 1)
/// when weights and bias share (s0, tau). Mixed ranges fall back to
///   y~_i = tau_w (W0 x)_i + tau_b b0_i + s0_w sum(x) + s0_b.
/// Rows are x.size() wide. Throws ShapeMismatch.
std::vector<double> quantized_affine_forward(const QuantizedSummary& q_w,
                                             const QuantizedSummary& q_b,
                                             std::span<const double> x,
                                             MultCounter* counter = nullptr);

enum class WeightPrecision { F32, Q8, Q4 };

struct LayerStorage {
  std::int64_t weights = 0;
  WeightPrecision precision = WeightPrecision::F32;
};

/// Storage-normalised parameter count: an 8-bit weight is 1/4 parameter, a
/// 4-bit weight 1/8, and every quantized layer adds its two float extrema.
Ratio effective_params(std::span<const LayerStorage> layers);

}  // namespace fsnet
