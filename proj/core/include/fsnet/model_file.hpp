#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsnet/geometry.hpp"
#include "fsnet/quant.hpp"
#include "fsnet/tensor.hpp"

namespace fsnet {

// Binary model container, little-endian throughout.
//
//   "FSN1"  u32 layer_count
//   per layer:
//     u8 kind (0 conv, 1 affine)   u16 name_len   name bytes
//     conv:   u32 c_in s1 s2 c_out   i64 r_num r_den   u8 stride_policy
//     affine: u32 rows cols
//     u8 dtype (0 f32, 1 q8, 2 q4)   u64 weight_count
//     payload: f32 -> weight_count f32
//              qN  -> f64 w_min  f64 w_max  packed codes (q4: low nibble first)
//     u8 has_alpha   [u32 n   n x f64]
//     u32 crc32 of payload and alpha bytes

enum class LayerKind : std::uint8_t { Conv = 0, Affine = 1 };
enum class DType : std::uint8_t { F32 = 0, Q8 = 1, Q4 = 2 };

std::string_view to_string(DType dtype) noexcept;
int dtype_bits(DType dtype) noexcept;

struct ModelLayer {
  LayerKind kind = LayerKind::Conv;
  std::string name;
  ConvGeometry geom;      // conv only
  std::int64_t rows = 0;  // affine only
  std::int64_t cols = 0;
  DType dtype = DType::F32;
  std::vector<float> weights;  // F32 payload
  QuantizedSummary quantized;  // Q8 / Q4 payload
  std::optional<std::vector<double>> alphas;

  /// l_phys for conv layers, rows * cols + rows (weights then bias) for
  /// affine layers.
  std::int64_t expected_weight_count() const;
  std::int64_t weight_count() const noexcept;

  std::vector<double> weights_as_double() const;

  /// Conv layers only; quantized payloads are dequantized.
  FilterSummary<float> summary_f32() const;
  FilterSummary<double> summary_f64() const;

  friend bool operator==(const ModelLayer&, const ModelLayer&) = default;
};

struct Model {
  std::vector<ModelLayer> layers;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Throws FormatError on any inconsistency (bad magic, counts, codes,
/// checksum, trailing bytes).
Model parse_model(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_model(const Model& model);

Model read_model_file(const std::filesystem::path& path);
void write_model_file(const std::filesystem::path& path, const Model& model);

// Activation tensor file:
//   "FST1"  u32 c d1 d2   c*d1*d2 x f32 in unwrapped order   u32 crc32
FeatureMap<float> parse_tensor(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_tensor(const FeatureMap<float>& map);

FeatureMap<float> read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const std::filesystem::path& path, const FeatureMap<float>& map);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace fsnet
