#include <fsnet/conv_oracle.hpp>
#include <fsnet/error.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

namespace fsnet {
namespace {

// Spatial-domain reference written from the definition, independent of
// pad_same and the unwrapped layout arithmetic in the library.
template <typename T>
Tensor3<double> direct_correlation(const FilterSummary<T>& fs, const Tensor3<T>& x) {
  const auto& g = fs.geometry();
  const auto p1 = (g.s1 - 1) / 2, p2 = (g.s2 - 1) / 2;
  Tensor3<double> out(g.c_out, x.d1(), x.d2());
  for (std::int64_t o = 0; o < g.c_out; ++o) {
    const auto w = filter_as_3d(fs, o);
    for (std::int64_t m = 0; m < x.d1(); ++m)
      for (std::int64_t n = 0; n < x.d2(); ++n) {
        double acc = 0;
        for (std::int64_t i = 0; i < g.c_in; ++i)
          for (std::int64_t j = 0; j < g.s1; ++j)
            for (std::int64_t k = 0; k < g.s2; ++k) {
              const auto r = m + j - p1, c = n + k - p2;
              if (r < 0 || r >= x.d1() || c < 0 || c >= x.d2()) continue;
              acc += static_cast<double>(w(i, j, k)) * static_cast<double>(x(i, r, c));
            }
        out(o, m, n) = acc;
      }
  }
  return out;
}

TEST(PadSame, Shapes) {
  const auto m = random_feature_map<double>(2, 2, 2, 1);
  const auto p = pad_same(m, 3, 3);
  EXPECT_EQ(p.channels(), 2);
  EXPECT_EQ(p.d1(), 4);
  EXPECT_EQ(p.d2(), 4);
  EXPECT_EQ(p.at(1, 1, 1), m.at(1, 0, 0));
  EXPECT_EQ(p.at(0, 2, 2), m.at(0, 1, 1));
  EXPECT_EQ(p.at(0, 0, 0), 0.0);
  EXPECT_EQ(p.at(0, 3, 3), 0.0);
  EXPECT_EQ(pad_same(m, 1, 1), m);
}

TEST(PadSame, EvenKernelPutsExtraZeroAfter) {
  const auto m = random_feature_map<double>(1, 3, 3, 2);
  const auto p = pad_same(m, 4, 2);
  EXPECT_EQ(p.d1(), 6);
  EXPECT_EQ(p.d2(), 4);
  // floor((4-1)/2) = 1 leading row, floor((2-1)/2) = 0 leading columns.
  EXPECT_EQ(p.at(0, 1, 0), m.at(0, 0, 0));
  EXPECT_EQ(p.at(0, 3, 2), m.at(0, 2, 2));
  for (std::int64_t k = 0; k < 4; ++k) {
    EXPECT_EQ(p.at(0, 0, k), 0.0);
    EXPECT_EQ(p.at(0, 4, k), 0.0);
    EXPECT_EQ(p.at(0, 5, k), 0.0);
  }
}

TEST(NaiveConv, IdentityFilter) {
  const ConvGeometry g{1, 1, 1, 1, Ratio(1), StridePolicy::PaperGeneric};
  FilterSummary<double> fs(g, {1.0});
  const auto m = random_feature_map<double>(1, 5, 4, 3);
  EXPECT_EQ(naive_conv(fs, m), m);
}

TEST(NaiveConv, OnesFilterOnDelta) {
  // K = 9, c_out = 1, r = 1: L = 9, the filter is the whole summary.
  const ConvGeometry g{1, 3, 3, 1, Ratio(1), StridePolicy::PaperGeneric};
  FilterSummary<double> fs(g, std::vector<double>(9, 1.0));
  FeatureMap<double> m(1, 4, 4);
  m.at(0, 0, 1) = 1.0;
  const auto out = naive_conv(fs, m);
  for (std::int64_t j = 0; j < 4; ++j)
    for (std::int64_t k = 0; k < 4; ++k) {
      const double expected = (j <= 1 && k <= 2) ? 1.0 : 0.0;
      EXPECT_EQ(out.at(0, j, k), expected) << j << "," << k;
    }
}

TEST(NaiveConv, ZeroStrideDuplicatesChannels) {
  const ConvGeometry g{3, 1, 1, 2, Ratio(2)};
  const auto fs = random_filter_summary<double>(g, 4);
  ASSERT_EQ(fs.stride(), 0);
  const auto out = naive_conv(fs, random_feature_map<double>(3, 4, 4, 4));
  for (std::int64_t j = 0; j < 4; ++j)
    for (std::int64_t k = 0; k < 4; ++k) EXPECT_EQ(out.at(0, j, k), out.at(1, j, k));
}

TEST(NaiveConv, ShapeMismatch) {
  const ConvGeometry g{3, 3, 3, 4, Ratio(2)};
  const auto fs = random_filter_summary<double>(g, 1);
  try {
    naive_conv(fs, random_feature_map<double>(2, 4, 4, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(NaiveConv, MatchesSpatialDefinition) {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 60; ++n) {
    auto d = testing::random_fcfs_geometry(rng);
    d.geom.s2 = testing::uniform_int(rng, 1, 5);
    if (floor_div(d.geom.filter_size() * d.geom.c_out, d.geom.r) < d.geom.filter_size()) continue;
    const auto fs = random_filter_summary<double>(d.geom, n);
    const auto x = random_feature_map<double>(d.geom.c_in, d.d1, d.d2, n + 1000);
    const auto out = naive_conv(fs, x);
    const auto ref = direct_correlation(fs, wrap(x));
    const auto got = wrap(out);
    for (std::int64_t t = 0; t < ref.size(); ++t) {
      ASSERT_NEAR(got.data()[t], ref.data()[t], 1e-12);
    }
  }
}

TEST(NaiveConv, CountsOneMultiplyPerFilterElement) {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 40; ++n) {
    auto d = testing::random_fcfs_geometry(rng);
    const auto fs = random_filter_summary<float>(d.geom, n);
    MultCounter c;
    naive_conv(fs, random_feature_map<float>(d.geom.c_in, d.d1, d.d2, n), &c);
    const auto K = d.geom.filter_size();
    EXPECT_EQ(c.multiplies, static_cast<std::uint64_t>(d.geom.c_out * d.d1 * d.d2 * K));
    EXPECT_EQ(c.additions, static_cast<std::uint64_t>(d.geom.c_out * d.d1 * d.d2 * (K - 1)));
  }
}

TEST(NaiveConv, Linearity) {
  const ConvGeometry g{5, 3, 3, 7, Ratio(5, 2)};
  const auto fs = random_filter_summary<double>(g, 2);
  const auto x = random_feature_map<double>(5, 6, 7, 10);
  const auto y = random_feature_map<double>(5, 6, 7, 11);
  const double a = 0.75, b = -2.5;
  FeatureMap<double> z(5, 6, 7);
  for (std::int64_t t = 0; t < z.size(); ++t) z.data()[t] = a * x.data()[t] + b * y.data()[t];
  const auto lhs = naive_conv(fs, z);
  const auto cx = naive_conv(fs, x), cy = naive_conv(fs, y);
  FeatureMap<double> rhs(7, 6, 7);
  for (std::int64_t t = 0; t < rhs.size(); ++t)
    rhs.data()[t] = a * cx.data()[t] + b * cy.data()[t];
  EXPECT_LE(max_relative_deviation(lhs, rhs), 1e-12);
}

TEST(NaiveConv, TranslationEquivarianceAwayFromBorders) {
  const ConvGeometry g{2, 3, 3, 3, Ratio(2)};
  const auto fs = random_filter_summary<double>(g, 6);
  FeatureMap<double> a(2, 9, 9), b(2, 9, 9);
  a.at(1, 3, 3) = 1.0;
  b.at(1, 5, 4) = 1.0;
  const auto oa = naive_conv(fs, a), ob = naive_conv(fs, b);
  for (std::int64_t o = 0; o < 3; ++o)
    for (std::int64_t j = 2; j <= 4; ++j)
      for (std::int64_t k = 2; k <= 4; ++k) EXPECT_EQ(oa.at(o, j, k), ob.at(o, j + 2, k + 1));
}

TEST(NaiveConv, WorkerCountDoesNotChangeBits) {
  const ConvGeometry g{6, 3, 3, 13, Ratio(3)};
  const auto fs = random_filter_summary<float>(g, 5);
  const auto x = random_feature_map<float>(6, 9, 8, 5);
  const auto one = naive_conv(fs, x);
  for (unsigned w : {2u, 3u, 7u}) {
    MultCounter c;
    EXPECT_EQ(naive_conv(fs, x, &c, ExecOptions{w}), one);
    EXPECT_EQ(c.multiplies, 13u * 72u * 54u);
  }
}

TEST(MaxRelativeDeviation, Definition) {
  const std::vector<double> ref{1, -4, 2}, val{1.5, -4, 2};
  EXPECT_DOUBLE_EQ(max_relative_deviation<double>(val, ref), 0.5 / 4);
  const std::vector<double> zero{0, 0}, small{1e-3, 0};
  EXPECT_DOUBLE_EQ(max_relative_deviation<double>(small, zero), 1e-3);
  const std::vector<double> short_v{1};
  EXPECT_THROW(max_relative_deviation<double>(short_v, ref), Error);
}

}  // namespace
}  // namespace fsnet
