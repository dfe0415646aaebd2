#include "fsnet/model_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "fsnet/error.hpp"

namespace fsnet {

static_assert(std::endian::native == std::endian::little,
              "model files are written with a raw memcpy of little-endian values");

namespace {

constexpr char kModelMagic[4] = {'F', 'S', 'N', '1'};
constexpr char kTensorMagic[4] = {'F', 'S', 'T', '1'};

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto pos = bytes_.size();
    bytes_.resize(pos + sizeof(T));
    std::memcpy(bytes_.data() + pos, &value, sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::size_t size() const noexcept { return bytes_.size(); }
  std::uint32_t crc_from(std::size_t pos) const {
    return static_cast<std::uint32_t>(
        crc32(0L, bytes_.data() + pos, static_cast<uInt>(bytes_.size() - pos)));
  }
  std::vector<std::uint8_t> take() && { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::span<const std::uint8_t> get_bytes(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t pos() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }
  std::uint32_t crc_from(std::size_t from) const {
    return static_cast<std::uint32_t>(
        crc32(0L, bytes_.data() + from, static_cast<uInt>(pos_ - from)));
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::FormatError, std::string("truncated file reading ") + what);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t to_u32(std::int64_t v, const char* what) {
  if (v < 0 || v > 0xffffffffLL) {
    throw Error(ErrorCode::FormatError, std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void write_codes(Writer& w, const QuantizedSummary& q) {
  if (q.nbits == 8) {
    w.put_bytes(q.codes.data(), q.codes.size());
    return;
  }
  for (std::size_t i = 0; i < q.codes.size(); i += 2) {
    std::uint8_t byte = q.codes[i] & 0x0f;
    if (i + 1 < q.codes.size()) byte |= static_cast<std::uint8_t>((q.codes[i + 1] & 0x0f) << 4);
    w.put(byte);
  }
}

std::vector<std::uint8_t> read_codes(Reader& r, std::uint64_t count, int nbits) {
  if (nbits == 8) {
    const auto raw = r.get_bytes(count, "q8 codes");
    return {raw.begin(), raw.end()};
  }
  const auto raw = r.get_bytes((count + 1) / 2, "q4 codes");
  std::vector<std::uint8_t> codes(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto byte = raw[i / 2];
    codes[i] = (i % 2 == 0) ? (byte & 0x0f) : (byte >> 4);
  }
  if (count % 2 == 1 && (raw.back() >> 4) != 0) {
    throw Error(ErrorCode::FormatError, "nonzero padding nibble in q4 payload");
  }
  return codes;
}

}  // namespace

std::string_view to_string(DType dtype) noexcept {
  switch (dtype) {
    case DType::F32: return "f32";
    case DType::Q8: return "q8";
    case DType::Q4: return "q4";
  }
  return "unknown";
}

int dtype_bits(DType dtype) noexcept {
  switch (dtype) {
    case DType::F32: return 32;
    case DType::Q8: return 8;
    case DType::Q4: return 4;
  }
  return 0;
}

std::int64_t ModelLayer::expected_weight_count() const {
  if (kind == LayerKind::Conv) return derive_layout(geom).l_phys;
  return rows * cols + rows;
}

std::int64_t ModelLayer::weight_count() const noexcept {
  return dtype == DType::F32 ? static_cast<std::int64_t>(weights.size())
                             : static_cast<std::int64_t>(quantized.codes.size());
}

std::vector<double> ModelLayer::weights_as_double() const {
  if (dtype == DType::F32) return {weights.begin(), weights.end()};
  return dequantize(quantized);
}

FilterSummary<float> ModelLayer::summary_f32() const {
  if (kind != LayerKind::Conv) throw Error(ErrorCode::ShapeMismatch, name + " is not a conv layer");
  if (dtype == DType::F32) return FilterSummary<float>(geom, weights);
  const auto w = dequantize(quantized);
  return FilterSummary<float>(geom, std::vector<float>(w.begin(), w.end()));
}

FilterSummary<double> ModelLayer::summary_f64() const {
  if (kind != LayerKind::Conv) throw Error(ErrorCode::ShapeMismatch, name + " is not a conv layer");
  return FilterSummary<double>(geom, weights_as_double());
}

std::vector<std::uint8_t> serialize_model(const Model& model) {
  Writer w;
  w.put_bytes(kModelMagic, 4);
  w.put(to_u32(static_cast<std::int64_t>(model.layers.size()), "layer count"));
  for (const auto& layer : model.layers) {
    w.put(static_cast<std::uint8_t>(layer.kind));
    if (layer.name.size() > 0xffff) throw Error(ErrorCode::FormatError, "layer name too long");
    w.put(static_cast<std::uint16_t>(layer.name.size()));
    w.put_bytes(layer.name.data(), layer.name.size());
    if (layer.kind == LayerKind::Conv) {
      w.put(to_u32(layer.geom.c_in, "c_in"));
      w.put(to_u32(layer.geom.s1, "s1"));
      w.put(to_u32(layer.geom.s2, "s2"));
      w.put(to_u32(layer.geom.c_out, "c_out"));
      w.put(layer.geom.r.num());
      w.put(layer.geom.r.den());
      w.put(static_cast<std::uint8_t>(layer.geom.stride_policy));
    } else {
      w.put(to_u32(layer.rows, "rows"));
      w.put(to_u32(layer.cols, "cols"));
    }
    if (layer.weight_count() != layer.expected_weight_count()) {
      throw Error(ErrorCode::FormatError,
                  layer.name + ": payload has " + std::to_string(layer.weight_count()) +
                      " weights, layout needs " + std::to_string(layer.expected_weight_count()));
    }
    w.put(static_cast<std::uint8_t>(layer.dtype));
    w.put(static_cast<std::uint64_t>(layer.weight_count()));

    const auto payload_start = w.size();
    if (layer.dtype == DType::F32) {
      w.put_bytes(layer.weights.data(), layer.weights.size() * sizeof(float));
    } else {
      if (layer.quantized.nbits != dtype_bits(layer.dtype)) {
        throw Error(ErrorCode::FormatError, layer.name + ": code width disagrees with dtype");
      }
      w.put(layer.quantized.w_min);
      w.put(layer.quantized.w_max);
      write_codes(w, layer.quantized);
    }
    w.put(static_cast<std::uint8_t>(layer.alphas ? 1 : 0));
    if (layer.alphas) {
      w.put(to_u32(static_cast<std::int64_t>(layer.alphas->size()), "alpha count"));
      w.put_bytes(layer.alphas->data(), layer.alphas->size() * sizeof(double));
    }
    w.put(w.crc_from(payload_start));
  }
  return std::move(w).take();
}

Model parse_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.get_bytes(4, "magic");
  if (std::memcmp(magic.data(), kModelMagic, 4) != 0) {
    throw Error(ErrorCode::FormatError, "not a model file (bad magic)");
  }
  const auto count = r.get<std::uint32_t>("layer count");
  Model model;
  for (std::uint32_t li = 0; li < count; ++li) {
    ModelLayer layer;
    const auto kind = r.get<std::uint8_t>("layer kind");
    if (kind > 1) throw Error(ErrorCode::FormatError, "unknown layer kind " + std::to_string(kind));
    layer.kind = static_cast<LayerKind>(kind);
    const auto name_len = r.get<std::uint16_t>("name length");
    const auto name = r.get_bytes(name_len, "name");
    layer.name.assign(name.begin(), name.end());

    if (layer.kind == LayerKind::Conv) {
      layer.geom.c_in = r.get<std::uint32_t>("c_in");
      layer.geom.s1 = r.get<std::uint32_t>("s1");
      layer.geom.s2 = r.get<std::uint32_t>("s2");
      layer.geom.c_out = r.get<std::uint32_t>("c_out");
      const auto num = r.get<std::int64_t>("r");
      const auto den = r.get<std::int64_t>("r");
      if (den <= 0) throw Error(ErrorCode::FormatError, layer.name + ": bad ratio denominator");
      layer.geom.r = Ratio(num, den);
      if (layer.geom.r.num() != num || layer.geom.r.den() != den) {
        throw Error(ErrorCode::FormatError, layer.name + ": ratio not in lowest terms");
      }
      const auto policy = r.get<std::uint8_t>("stride policy");
      if (policy > 2) throw Error(ErrorCode::FormatError, layer.name + ": bad stride policy");
      layer.geom.stride_policy = static_cast<StridePolicy>(policy);
    } else {
      layer.rows = r.get<std::uint32_t>("rows");
      layer.cols = r.get<std::uint32_t>("cols");
      if (layer.rows < 1 || layer.cols < 1) {
        throw Error(ErrorCode::FormatError, layer.name + ": empty affine layer");
      }
    }

    std::int64_t expected = 0;
    try {
      expected = layer.expected_weight_count();
    } catch (const Error& e) {
      throw Error(ErrorCode::FormatError, layer.name + ": " + e.what());
    }
    const auto dtype = r.get<std::uint8_t>("dtype");
    if (dtype > 2) throw Error(ErrorCode::FormatError, layer.name + ": unknown dtype");
    layer.dtype = static_cast<DType>(dtype);
    const auto n = r.get<std::uint64_t>("weight count");
    if (static_cast<std::int64_t>(n) != expected) {
      throw Error(ErrorCode::FormatError, layer.name + ": payload has " + std::to_string(n) +
                                              " weights, layout needs " +
                                              std::to_string(expected));
    }

    const auto payload_start = r.pos();
    if (layer.dtype == DType::F32) {
      const auto raw = r.get_bytes(n * sizeof(float), "f32 payload");
      layer.weights.resize(n);
      std::memcpy(layer.weights.data(), raw.data(), raw.size());
    } else {
      const auto w_min = r.get<double>("w_min");
      const auto w_max = r.get<double>("w_max");
      auto codes = read_codes(r, n, dtype_bits(layer.dtype));
      layer.quantized = make_quantized(std::move(codes), dtype_bits(layer.dtype), w_min, w_max);
    }
    const auto has_alpha = r.get<std::uint8_t>("alpha flag");
    if (has_alpha > 1) throw Error(ErrorCode::FormatError, layer.name + ": bad alpha flag");
    if (has_alpha) {
      const auto alpha_count = r.get<std::uint32_t>("alpha count");
      if (layer.kind != LayerKind::Conv || alpha_count != layer.geom.c_out) {
        throw Error(ErrorCode::FormatError, layer.name + ": alpha vector needs one entry per filter");
      }
      const auto raw = r.get_bytes(alpha_count * sizeof(double), "alphas");
      std::vector<double> alphas(alpha_count);
      std::memcpy(alphas.data(), raw.data(), raw.size());
      layer.alphas = std::move(alphas);
    }
    const auto computed = r.crc_from(payload_start);
    const auto stored = r.get<std::uint32_t>("checksum");
    if (computed != stored) throw Error(ErrorCode::FormatError, layer.name + ": checksum mismatch");
    model.layers.push_back(std::move(layer));
  }
  if (!r.done()) throw Error(ErrorCode::FormatError, "trailing bytes after last layer");
  return model;
}

std::vector<std::uint8_t> serialize_tensor(const FeatureMap<float>& map) {
  Writer w;
  w.put_bytes(kTensorMagic, 4);
  w.put(to_u32(map.channels(), "channels"));
  w.put(to_u32(map.d1(), "d1"));
  w.put(to_u32(map.d2(), "d2"));
  const auto start = w.size();
  w.put_bytes(map.data().data(), map.data().size() * sizeof(float));
  w.put(w.crc_from(start));
  return std::move(w).take();
}

FeatureMap<float> parse_tensor(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.get_bytes(4, "magic");
  if (std::memcmp(magic.data(), kTensorMagic, 4) != 0) {
    throw Error(ErrorCode::FormatError, "not a tensor file (bad magic)");
  }
  const std::int64_t c = r.get<std::uint32_t>("channels");
  const std::int64_t d1 = r.get<std::uint32_t>("d1");
  const std::int64_t d2 = r.get<std::uint32_t>("d2");
  if (c < 1 || d1 < 1 || d2 < 1) throw Error(ErrorCode::FormatError, "empty tensor");
  const auto start = r.pos();
  const auto n = static_cast<std::size_t>(c * d1 * d2);
  const auto raw = r.get_bytes(n * sizeof(float), "tensor data");
  std::vector<float> data(n);
  std::memcpy(data.data(), raw.data(), raw.size());
  const auto computed = r.crc_from(start);
  if (computed != r.get<std::uint32_t>("checksum")) {
    throw Error(ErrorCode::FormatError, "tensor checksum mismatch");
  }
  if (!r.done()) throw Error(ErrorCode::FormatError, "trailing bytes after tensor");
  return FeatureMap<float>(c, d1, d2, std::move(data));
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Model read_model_file(const std::filesystem::path& path) { return parse_model(read_bytes(path)); }

void write_model_file(const std::filesystem::path& path, const Model& model) {
  write_bytes(path, serialize_model(model));
}

FeatureMap<float> read_tensor_file(const std::filesystem::path& path) {
  return parse_tensor(read_bytes(path));
}

void write_tensor_file(const std::filesystem::path& path, const FeatureMap<float>& map) {
  write_bytes(path, serialize_tensor(map));
}

}  // namespace fsnet
