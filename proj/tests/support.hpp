#pragma once

#include <fsnet/arch_spec.hpp>
#include <fsnet/error.hpp>
#include <fsnet/geometry.hpp>
#include <fsnet/model_file.hpp>
#include <fsnet/quant.hpp>

#include <cstdint>
#include <random>
#include <string>

namespace fsnet::testing {

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// r drawn as a tenth in [lo, hi].
inline Ratio random_ratio(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return Ratio(uniform_int(rng, lo * 10, hi * 10), 10);
}

struct GeometryDraw {
  ConvGeometry geom;
  std::int64_t d1 = 0;
  std::int64_t d2 = 0;
};

/// Sweep domain used by the exactness checks: c_in in [1,16], s1 in [1,5],
/// s2 in [2,5], c_out in [1,32], r in [1,6], d in [2,12]. Draws whose
/// summary would be shorter than one filter are redrawn.
inline GeometryDraw random_fcfs_geometry(std::mt19937_64& rng,
                                         StridePolicy policy = StridePolicy::ChannelAligned) {
  for (;;) {
    GeometryDraw g;
    g.geom.c_in = uniform_int(rng, 1, 16);
    g.geom.s1 = uniform_int(rng, 1, 5);
    g.geom.s2 = uniform_int(rng, 2, 5);
    g.geom.c_out = uniform_int(rng, 1, 32);
    g.geom.r = random_ratio(rng, 1, 6);
    g.geom.stride_policy = policy;
    g.d1 = uniform_int(rng, 2, 12);
    g.d2 = uniform_int(rng, 2, 12);
    const auto K = g.geom.filter_size();
    if (floor_div(K * g.geom.c_out, g.geom.r) < K) continue;
    return g;
  }
}

/// Mixed conv/affine layers in f32, q8 and q4, some carrying alphas.
inline ModelLayer random_layer(std::mt19937_64& rng, int index) {
  ModelLayer layer;
  layer.name = "layer" + std::to_string(index);
  if (uniform_int(rng, 0, 3) == 0) {
    layer.kind = LayerKind::Affine;
    layer.rows = uniform_int(rng, 1, 12);
    layer.cols = uniform_int(rng, 1, 12);
  } else {
    layer.kind = LayerKind::Conv;
    layer.geom = random_fcfs_geometry(rng).geom;
    layer.geom.s2 = uniform_int(rng, 1, 5);
    layer.geom.stride_policy = static_cast<StridePolicy>(uniform_int(rng, 0, 2));
    // Keep only layouts that exist.
    try {
      derive_layout(layer.geom);
    } catch (const Error&) {
      layer.geom.stride_policy = StridePolicy::ChannelAligned;
      layer.geom.r = Ratio(1);
    }
  }
  const auto n = static_cast<std::size_t>(layer.expected_weight_count());
  std::vector<double> w(n);
  for (auto& v : w) v = uniform_real(rng, -1, 1);
  switch (uniform_int(rng, 0, 2)) {
    case 0:
      layer.dtype = DType::F32;
      layer.weights.assign(w.begin(), w.end());
      break;
    case 1:
      layer.dtype = DType::Q8;
      layer.quantized = quantize(w, 8);
      break;
    default:
      layer.dtype = DType::Q4;
      layer.quantized = quantize(w, 4);
      break;
  }
  if (layer.kind == LayerKind::Conv && uniform_int(rng, 0, 1)) {
    std::vector<double> a(static_cast<std::size_t>(layer.geom.c_out));
    for (auto& v : a) v = uniform_real(rng, -5, 5);
    layer.alphas = a;
  }
  return layer;
}

inline Model random_model(std::mt19937_64& rng) {
  Model m;
  const auto n = uniform_int(rng, 1, 5);
  for (int i = 0; i < n; ++i) m.layers.push_back(random_layer(rng, i));
  return m;
}

inline ArchSpec random_arch(std::mt19937_64& rng) {
  ArchSpec spec;
  spec.name = "net" + std::to_string(uniform_int(rng, 0, 999));
  spec.r = random_ratio(rng, 1, 6);
  spec.stride_policy = static_cast<StridePolicy>(uniform_int(rng, 0, 2));
  const auto n = uniform_int(rng, 1, 12);
  for (int i = 0; i < n; ++i) {
    ArchLayer l;
    l.name = "l" + std::to_string(i);
    switch (uniform_int(rng, 0, 2)) {
      case 0:
        l.type = ArchLayerType::Conv;
        l.c_in = uniform_int(rng, 1, 64);
        l.s1 = uniform_int(rng, 1, 7);
        l.s2 = uniform_int(rng, 1, 7);
        l.c_out = uniform_int(rng, 1, 64);
        if (uniform_int(rng, 0, 1)) l.r = Ratio(uniform_int(rng, 7, 40), 7);
        if (uniform_int(rng, 0, 1))
          l.stride_policy = static_cast<StridePolicy>(uniform_int(rng, 0, 2));
        if (uniform_int(rng, 0, 1)) {
          l.d1 = uniform_int(rng, 1, 64);
          l.d2 = uniform_int(rng, 1, 64);
        }
        break;
      case 1:
        l.type = ArchLayerType::BatchNorm;
        l.channels = uniform_int(rng, 1, 256);
        break;
      default:
        l.type = ArchLayerType::Dense;
        l.inputs = uniform_int(rng, 1, 512);
        l.outputs = uniform_int(rng, 1, 100);
        l.bias = uniform_int(rng, 0, 1) == 1;
        break;
    }
    spec.layers.push_back(l);
  }
  return spec;
}

}  // namespace fsnet::testing
