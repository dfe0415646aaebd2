#include "fsnet/quant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsnet/error.hpp"

namespace fsnet {

namespace {

void check_bits(int nbits) {
  if (nbits != 4 && nbits != 8) {
    throw Error(ErrorCode::InvalidGeometry, "unsupported bit width " + std::to_string(nbits));
  }
}

template <typename T>
QuantizedSummary quantize_impl(std::span<const T> weights, int nbits) {
  check_bits(nbits);
  if (weights.empty()) throw Error(ErrorCode::EmptyInput, "nothing to quantize");
  const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());

  QuantizedSummary q;
  q.nbits = nbits;
  q.w_min = static_cast<double>(*lo);
  q.w_max = static_cast<double>(*hi);
  q.tau = quant_step(q.w_min, q.w_max, nbits);
  q.codes.resize(weights.size());
  if (q.w_max == q.w_min) return q;

  const int top = q.max_code();
  const double range = q.w_max - q.w_min;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double level = (static_cast<double>(weights[i]) - q.w_min) * top / range;
    // level >= 0, so floor(x + 0.5) rounds halves away from zero.
    const auto code = static_cast<int>(std::floor(level + 0.5));
    q.codes[i] = static_cast<std::uint8_t>(std::clamp(code, 0, top));
  }
  return q;
}

}  // namespace

double quant_step(double w_min, double w_max, int nbits) noexcept {
  return (w_max - w_min) / static_cast<double>((1 << nbits) - 1);
}

QuantizedSummary quantize(std::span<const double> weights, int nbits) {
  return quantize_impl(weights, nbits);
}

QuantizedSummary quantize(std::span<const float> weights, int nbits) {
  return quantize_impl(weights, nbits);
}

QuantizedSummary make_quantized(std::vector<std::uint8_t> codes, int nbits, double w_min,
                                double w_max) {
  check_bits(nbits);
  if (!(w_min <= w_max)) throw Error(ErrorCode::FormatError, "quantization range inverted");
  QuantizedSummary q;
  q.nbits = nbits;
  q.w_min = w_min;
  q.w_max = w_max;
  q.tau = quant_step(w_min, w_max, nbits);
  for (auto c : codes) {
    if (c > q.max_code()) {
      throw Error(ErrorCode::FormatError, "code " + std::to_string(c) + " exceeds " +
                                              std::to_string(q.max_code()));
    }
  }
  q.codes = std::move(codes);
  return q;
}

double dequantize_code(const QuantizedSummary& q, std::uint8_t code) noexcept {
  // std::lerp is exact at both ends, so the extrema round-trip bit-exactly.
  return std::lerp(q.w_min, q.w_max, static_cast<double>(code) / q.max_code());
}

std::vector<double> dequantize(const QuantizedSummary& q) {
  std::vector<double> out(q.codes.size());
  std::transform(q.codes.begin(), q.codes.end(), out.begin(),
                 [&](std::uint8_t c) { return dequantize_code(q, c); });
  return out;
}

QuantizedAffine quantize_affine(std::span<const double> w, std::span<const double> b,
                                std::int64_t rows, std::int64_t cols, int nbits) {
  if (rows < 1 || cols < 1 || static_cast<std::int64_t>(w.size()) != rows * cols ||
      static_cast<std::int64_t>(b.size()) != rows) {
    throw Error(ErrorCode::ShapeMismatch, "affine layer shape mismatch");
  }
  std::vector<double> joint(w.begin(), w.end());
  joint.insert(joint.end(), b.begin(), b.end());
  auto all = quantize(std::span<const double>(joint), nbits);

  QuantizedAffine layer;
  layer.rows = rows;
  layer.cols = cols;
  layer.weights = all;
  layer.weights.codes.resize(w.size());
  layer.bias = all;
  layer.bias.codes.assign(all.codes.begin() + static_cast<std::ptrdiff_t>(w.size()),
                          all.codes.end());
  return layer;
}

namespace {

std::size_t checked_rows(const QuantizedSummary& q_w, const QuantizedSummary& q_b,
                         std::span<const double> x) {
  if (x.empty() || q_w.codes.size() != q_b.codes.size() * x.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                "affine forward: " + std::to_string(q_w.codes.size()) + " weights, " +
                    std::to_string(q_b.codes.size()) + " outputs, " +
                    std::to_string(x.size()) + " inputs");
  }
  return q_b.codes.size();
}

}  // namespace

std::vector<double> dequantized_affine_forward(const QuantizedSummary& q_w,
                                               const QuantizedSummary& q_b,
                                               std::span<const double> x,
                                               MultCounter* counter) {
  const auto rows = checked_rows(q_w, q_b, x);
  const auto w = dequantize(q_w);
  const auto b = dequantize(q_b);
  std::vector<double> y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[i * x.size() + j] * x[j];
    y[i] = acc + b[i];
  }
  if (counter) {
    counter->multiplies += rows * x.size();
    counter->additions += rows * x.size();
  }
  return y;
}

std::vector<double> quantized_affine_forward(const QuantizedSummary& q_w,
                                             const QuantizedSummary& q_b,
                                             std::span<const double> x, MultCounter* counter) {
  const auto rows = checked_rows(q_w, q_b, x);
  const auto cols = x.size();

  double sx = 0.0;
  for (double v : x) sx += v;

  std::vector<double> y(rows);
  std::vector<double> wx(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += static_cast<double>(q_w.codes[i * cols + j]) * x[j];
    wx[i] = acc;
  }

  MultCounter ops;
  ops.multiplies = rows * cols;
  ops.additions = rows * cols + cols;
  if (q_w.w_min == q_b.w_min && q_w.tau == q_b.tau) {
    const double shift = q_w.w_min * (sx + 1.0);
    for (std::size_t i = 0; i < rows; ++i) {
      y[i] = q_w.tau * (wx[i] + static_cast<double>(q_b.codes[i])) + shift;
    }
    ops.multiplies += 1 + rows;
    ops.additions += 1 + 2 * rows;
  } else {
    const double shift = q_w.w_min * sx + q_b.w_min;
    for (std::size_t i = 0; i < rows; ++i) {
      y[i] = q_w.tau * wx[i] + q_b.tau * static_cast<double>(q_b.codes[i]) + shift;
    }
    ops.multiplies += 1 + 2 * rows;
    ops.additions += 2 + 2 * rows;
  }
  if (counter) *counter += ops;
  return y;
}

Ratio effective_params(std::span<const LayerStorage> layers) {
  // Accumulate in eighths so 4-bit layers stay exact.
  std::int64_t eighths = 0;
  for (const auto& layer : layers) {
    switch (layer.precision) {
      case WeightPrecision::F32: eighths += 8 * layer.weights; break;
      case WeightPrecision::Q8: eighths += 2 * layer.weights + 16; break;
      case WeightPrecision::Q4: eighths += layer.weights + 16; break;
    }
  }
  return Ratio(eighths, 8);
}

}  // namespace fsnet
