#include <ostream>

#include "commands.hpp"
#include "report.hpp"

#include "fsnet/arch_spec.hpp"
#include "fsnet/error.hpp"
#include "fsnet/geometry.hpp"
#include "fsnet/quant.hpp"

namespace fsnet::cli {

namespace {

Json stride_table(const ConvGeometry& g, std::int64_t L) {
  Json strides = Json::object();
  for (auto policy : {StridePolicy::PaperGeneric, StridePolicy::PaperAligned,
                      StridePolicy::ChannelAligned}) {
    const auto s = policy_stride(g, L, policy);
    strides[std::string(to_string(policy))] = s ? Json(*s) : Json(nullptr);
  }
  return strides;
}

}  // namespace

int run_plan(const PlanOptions& opts, std::ostream& out, std::ostream& err) {
  auto spec = read_arch_file(opts.arch);
  if (opts.r) {
    spec.r = Ratio::parse(*opts.r);
    for (auto& layer : spec.layers) layer.r.reset();
  }

  std::int64_t conv_baseline = 0, conv_fs = 0, conv_nominal = 0;
  std::int64_t bn = 0, fc = 0, failed = 0;
  std::vector<LayerStorage> wq;  // storage after 8-bit quantization

  Json layers = Json::array();
  for (const auto& layer : spec.layers) {
    Json entry{{"name", layer.name}};
    switch (layer.type) {
      case ArchLayerType::Conv: {
        const auto g = spec.conv_geometry(layer);
        const auto K = g.filter_size();
        const auto baseline = layer.baseline_params();
        entry["type"] = "conv";
        entry["K"] = K;
        entry["r"] = g.r.to_string();
        entry["stride_policy"] = to_string(g.stride_policy);
        entry["params_baseline"] = baseline;
        conv_baseline += baseline;
        try {
          const auto layout = derive_layout(g);
          const auto params = count_params(g, layout);
          entry["L"] = layout.L;
          entry["stride"] = layout.stride;
          entry["strides"] = stride_table(g, layout.L);
          entry["l_phys"] = layout.l_phys;
          entry["span"] = layout.span;
          entry["params_fs"] = params.fs;
          entry["params_fs_nominal"] = params.nominal;
          entry["cr"] = params.cr.to_double();
          entry["cr_nominal"] = params.nominal_cr.to_double();
          conv_fs += params.fs;
          conv_nominal += params.nominal;
          wq.push_back({params.fs, WeightPrecision::Q8});
          if (layer.d1) {
            const auto p = predicted_acceleration(g, layout, *layer.d1, *layer.d2);
            entry["predicted_acceleration"] =
                Json{{"d1", *layer.d1},           {"d2", *layer.d2},
                     {"naive_mults", p.naive_mults}, {"paper_fcfs_mults", p.paper_fcfs_mults},
                     {"ratio", p.accelerable ? Json(p.ratio) : Json(nullptr)},
                     {"accelerable", p.accelerable}};
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateStride && e.code() != ErrorCode::InvalidRatio) throw;
          // The layer stays uncompressed; the planner keeps going.
          entry["error"] = std::string(to_string(e.code()));
          entry["message"] = e.what();
          entry["params_fs"] = baseline;
          conv_fs += baseline;
          conv_nominal += baseline;
          wq.push_back({baseline, WeightPrecision::Q8});
          ++failed;
          err << "warning: " << layer.name << ": " << e.what() << '\n';
        }
        break;
      }
      case ArchLayerType::BatchNorm:
        entry["type"] = "bn";
        entry["params"] = layer.baseline_params();
        bn += layer.baseline_params();
        wq.push_back({layer.baseline_params(), WeightPrecision::F32});
        break;
      case ArchLayerType::Dense:
        entry["type"] = "fc";
        entry["params"] = layer.baseline_params();
        fc += layer.baseline_params();
        wq.push_back({layer.baseline_params(), WeightPrecision::Q8});
        break;
    }
    layers.push_back(std::move(entry));
  }

  const auto baseline = conv_baseline + bn + fc;
  const auto fsnet = conv_fs + bn + fc;
  const auto effective = effective_params(wq);
  Json totals{{"params_baseline", baseline},
              {"params_fsnet", fsnet},
              {"params_fsnet_nominal", conv_nominal + bn + fc},
              {"cr", static_cast<double>(baseline) / static_cast<double>(fsnet)},
              {"conv_baseline", conv_baseline},
              {"conv_fs", conv_fs},
              {"conv_fs_nominal", conv_nominal},
              {"fs_padding", conv_fs - conv_nominal},
              {"bn", bn},
              {"fc", fc},
              {"effective_params_wq8", effective.to_double()},
              {"cr_wq8", static_cast<double>(baseline) / effective.to_double()},
              {"layers_uncompressed", failed}};

  emit(out, Json{{"command", "plan"},
                 {"arch", spec.name},
                 {"r", spec.r.to_string()},
                 {"layers", std::move(layers)},
                 {"totals", std::move(totals)}});
  return kExitOk;
}

}  // namespace fsnet::cli
