#include <array>
#include <ostream>

#include "commands.hpp"
#include "report.hpp"

#include "fsnet/error.hpp"
#include "fsnet/model_file.hpp"
#include "fsnet/quant.hpp"

namespace fsnet::cli {

int run_quantize(const QuantizeOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.bits != 4 && opts.bits != 8) {
    throw Error(ErrorCode::InvalidGeometry, "--bits must be 4 or 8");
  }
  auto model = read_model_file(opts.model);
  const auto dtype = opts.bits == 8 ? DType::Q8 : DType::Q4;
  const auto precision = opts.bits == 8 ? WeightPrecision::Q8 : WeightPrecision::Q4;

  std::vector<LayerStorage> before, after;
  Json layers = Json::array();
  for (auto& layer : model.layers) {
    const auto count = layer.weight_count();
    Json entry{{"name", layer.name},
               {"kind", layer.kind == LayerKind::Conv ? "conv" : "affine"},
               {"weights", count}};
    if (layer.dtype != DType::F32) {
      // Re-quantizing would compound rounding; keep the stored codes.
      err << "warning: " << layer.name << " is already " << to_string(layer.dtype)
          << "; left unchanged\n";
      const auto p = layer.dtype == DType::Q8 ? WeightPrecision::Q8 : WeightPrecision::Q4;
      before.push_back({count, p});
      after.push_back({count, p});
      entry["dtype"] = to_string(layer.dtype);
      entry["tau"] = layer.quantized.tau;
      entry["skipped"] = true;
      layers.push_back(std::move(entry));
      continue;
    }
    layer.quantized = quantize(std::span<const float>(layer.weights), opts.bits);
    layer.weights.clear();
    layer.dtype = dtype;
    before.push_back({count, WeightPrecision::F32});
    after.push_back({count, precision});
    const std::array one{LayerStorage{count, precision}};
    entry["dtype"] = to_string(dtype);
    entry["w_min"] = layer.quantized.w_min;
    entry["w_max"] = layer.quantized.w_max;
    entry["tau"] = layer.quantized.tau;
    entry["effective_params"] = effective_params(one).to_double();
    layers.push_back(std::move(entry));
  }
  write_model_file(opts.output, model);

  const auto float_params = effective_params(before);
  const auto effective = effective_params(after);
  emit(out, Json{{"command", "quantize"},
                 {"bits", opts.bits},
                 {"output_file", opts.output.string()},
                 {"layers", std::move(layers)},
                 {"totals",
                  {{"params_float", float_params.to_double()},
                   {"effective_params", effective.to_double()},
                   {"effective_params_exact", effective.to_string()},
                   {"ratio", effective.num() == 0
                                 ? 0.0
                                 : float_params.to_double() / effective.to_double()}}}});
  return kExitOk;
}

}  // namespace fsnet::cli
