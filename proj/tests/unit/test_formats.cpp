#include <fsnet/arch_spec.hpp>
#include <fsnet/error.hpp>
#include <fsnet/model_file.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"

namespace fsnet {
namespace {

ErrorCode parse_error(std::vector<std::uint8_t> bytes) {
  try {
    parse_model(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

TEST(ModelFile, RandomRoundTripsAreByteIdentical) {
  std::mt19937_64 rng(61);
  for (int n = 0; n < 100; ++n) {
    const auto model = testing::random_model(rng);
    const auto bytes = serialize_model(model);
    const auto parsed = parse_model(bytes);
    ASSERT_EQ(parsed, model);
    ASSERT_EQ(serialize_model(parsed), bytes);
  }
}

TEST(ModelFile, HeaderLayout) {
  Model m;
  ModelLayer l;
  l.name = "a";
  l.geom = ConvGeometry{1, 1, 1, 1, Ratio(1)};
  l.weights = {1.0f};
  m.layers.push_back(l);
  const auto b = serialize_model(m);
  ASSERT_GE(b.size(), 8u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "FSN1");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5] | b[6] | b[7], 0);
}

TEST(ModelFile, RejectsCorruption) {
  std::mt19937_64 rng(62);
  auto model = testing::random_model(rng);
  const auto bytes = serialize_model(model);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(parse_error(bad_magic), ErrorCode::FormatError);

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(parse_error(trailing), ErrorCode::FormatError);

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_EQ(parse_error(truncated), ErrorCode::FormatError);

  // Flip a byte inside the first layer's payload; the checksum catches it.
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x5a;
  EXPECT_EQ(parse_error(flipped), ErrorCode::FormatError);
}

TEST(ModelFile, RejectsWrongWeightCount) {
  Model m;
  ModelLayer l;
  l.name = "a";
  l.geom = ConvGeometry{2, 3, 3, 4, Ratio(2)};
  l.weights = std::vector<float>(5);
  m.layers.push_back(l);
  EXPECT_THROW(serialize_model(m), Error);
}

TEST(ModelFile, FilePathRoundTrip) {
  std::mt19937_64 rng(63);
  const auto model = testing::random_model(rng);
  const auto path = std::filesystem::temp_directory_path() / "fsnet_test_model.fsn";
  write_model_file(path, model);
  EXPECT_EQ(read_model_file(path), model);
  EXPECT_EQ(read_bytes(path), serialize_model(model));
  std::filesystem::remove(path);
  try {
    read_model_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(ModelFile, QuantizedLayerDequantizesIntoSummary) {
  ModelLayer l;
  l.geom = ConvGeometry{2, 1, 2, 3, Ratio(3, 2)};
  const auto n = static_cast<std::size_t>(l.expected_weight_count());
  std::vector<double> w(n);
  for (std::size_t t = 0; t < n; ++t) w[t] = static_cast<double>(t) / static_cast<double>(n);
  l.dtype = DType::Q8;
  l.quantized = quantize(w, 8);
  const auto fs = l.summary_f64();
  const auto back = dequantize(l.quantized);
  ASSERT_EQ(fs.weights().size(), n);
  for (std::size_t t = 0; t < n; ++t) EXPECT_EQ(fs.weights()[t], back[t]);
}

TEST(TensorFile, RoundTrip) {
  const auto map = random_feature_map<float>(3, 4, 5, 1);
  const auto bytes = serialize_tensor(map);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FST1");
  EXPECT_EQ(bytes.size(), 4 + 12 + 60 * 4 + 4u);
  EXPECT_EQ(parse_tensor(bytes), map);
  auto bad = bytes;
  bad[20] ^= 1;
  EXPECT_THROW(parse_tensor(bad), Error);
}

TEST(ArchSpec, RandomRoundTripsAreByteIdentical) {
  std::mt19937_64 rng(64);
  for (int n = 0; n < 100; ++n) {
    const auto spec = testing::random_arch(rng);
    const auto text = format_arch(spec);
    const auto parsed = parse_arch(text);
    ASSERT_EQ(parsed, spec) << text;
    ASSERT_EQ(format_arch(parsed), text);
  }
}

TEST(ArchSpec, BundledResNetIsCanonical) {
  const std::filesystem::path path = std::filesystem::path(FSNET_DATA_DIR) / "resnet110.arch.json";
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto spec = parse_arch(ss.str());
  EXPECT_EQ(format_arch(spec), ss.str());
  EXPECT_EQ(spec.layers.size(), 219u);
  std::int64_t total = 0, conv = 0, convs = 0;
  for (const auto& l : spec.layers) {
    total += l.baseline_params();
    if (l.type == ArchLayerType::Conv) {
      conv += l.baseline_params();
      ++convs;
    }
  }
  // Independent count from the generator script.
  EXPECT_EQ(convs, 109);
  EXPECT_EQ(conv, 1719216);
  EXPECT_EQ(total, 1727962);
}

TEST(ArchSpec, StrictParsing) {
  auto code = [](const std::string& text) {
    try {
      parse_arch(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code("{"), ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"layers": [{"type": "conv", "name": "a", "c_in": 1, "s1": 1, "s2": 1}]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"layers": [{"type": "conv", "name": "a", "c_in": 0, "s1": 1, "s2": 1, "c_out": 1}]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"layers": [], "extra": 1})"), ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"layers": [{"type": "pool", "name": "p"}]})"), ErrorCode::ParseError);
  const auto ok = parse_arch(
      R"({"r": "3.7", "layers": [{"type": "conv", "name": "a", "c_in": 2, "s1": 3, "s2": 3, "c_out": 4, "r": 2}]})");
  EXPECT_EQ(ok.r, Ratio(37, 10));
  EXPECT_EQ(ok.conv_geometry(ok.layers[0]).r, Ratio(2));
  EXPECT_EQ(ok.conv_geometry(ok.layers[0]).stride_policy, StridePolicy::ChannelAligned);
}

}  // namespace
}  // namespace fsnet
