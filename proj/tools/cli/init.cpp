#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "commands.hpp"
#include "report.hpp"

#include "fsnet/arch_spec.hpp"
#include "fsnet/dfs.hpp"
#include "fsnet/error.hpp"
#include "fsnet/model_file.hpp"

namespace fsnet::cli {

namespace {

ModelLayer conv_layer(const std::string& name, const ConvGeometry& g, std::uint64_t seed,
                      const InitOptions& opts, std::ostream& err) {
  ModelLayer layer;
  layer.kind = LayerKind::Conv;
  layer.name = name;
  layer.geom = g;
  const auto fs = random_filter_summary<float>(g, seed);
  layer.weights.assign(fs.weights().begin(), fs.weights().end());
  if (opts.constant) std::fill(layer.weights.begin(), layer.weights.end(), 0.5f);
  if (opts.alphas) {
    try {
      layer.alphas = initial_alphas(fs.layout().l_phys, g.filter_size(), fs.stride(), g.c_out);
    } catch (const Error& e) {
      err << "warning: " << name << ": no alphas (" << e.what() << ")\n";
    }
  }
  return layer;
}

}  // namespace

int run_init(const InitOptions& opts, std::ostream& out, std::ostream& err) {
  Model model;
  std::uint64_t seed = opts.seed;
  if (opts.arch) {
    const auto spec = read_arch_file(*opts.arch);
    for (const auto& a : spec.layers) {
      if (a.type == ArchLayerType::Conv) {
        model.layers.push_back(conv_layer(a.name, spec.conv_geometry(a), seed++, opts, err));
      } else if (a.type == ArchLayerType::Dense && opts.affine) {
        ModelLayer layer;
        layer.kind = LayerKind::Affine;
        layer.name = a.name;
        layer.rows = a.outputs;
        layer.cols = a.inputs;
        std::mt19937_64 rng(seed++);
        const double bound = std::sqrt(6.0 / static_cast<double>(a.inputs));
        std::uniform_real_distribution<double> dist(-bound, bound);
        layer.weights.resize(static_cast<std::size_t>(a.outputs * a.inputs + a.outputs));
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
          const bool is_bias = i >= static_cast<std::size_t>(a.outputs * a.inputs);
          layer.weights[i] = is_bias && !a.bias ? 0.0f : static_cast<float>(dist(rng));
        }
        if (opts.constant) std::fill(layer.weights.begin(), layer.weights.end(), 0.5f);
        model.layers.push_back(std::move(layer));
      }
    }
  } else {
    ConvGeometry g;
    g.c_in = opts.c_in;
    g.s1 = opts.s1;
    g.s2 = opts.s2;
    g.c_out = opts.c_out;
    g.r = Ratio::parse(opts.r);
    g.stride_policy = parse_stride_policy(opts.stride_policy);
    model.layers.push_back(conv_layer("conv", g, seed, opts, err));
  }
  write_model_file(opts.output, model);

  Json layers = Json::array();
  for (const auto& l : model.layers) {
    layers.push_back(Json{{"name", l.name},
                          {"kind", l.kind == LayerKind::Conv ? "conv" : "affine"},
                          {"weights", l.weight_count()},
                          {"alphas", l.alphas.has_value()}});
  }
  emit(out, Json{{"command", "init"},
                 {"output_file", opts.output.string()},
                 {"layers", std::move(layers)}});
  return kExitOk;
}

int run_make_input(const MakeInputOptions& opts, std::ostream& out, std::ostream&) {
  auto map = opts.zeros ? FeatureMap<float>(opts.channels, opts.d1, opts.d2)
                        : random_feature_map<float>(opts.channels, opts.d1, opts.d2, opts.seed);
  write_tensor_file(opts.output, map);
  emit(out, Json{{"command", "make-input"},
                 {"output_file", opts.output.string()},
                 {"shape", {opts.channels, opts.d1, opts.d2}}});
  return kExitOk;
}

}  // namespace fsnet::cli
