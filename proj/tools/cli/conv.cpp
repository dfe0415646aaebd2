#include <ostream>

#include "commands.hpp"
#include "model_select.hpp"
#include "report.hpp"

#include "fsnet/conv_oracle.hpp"
#include "fsnet/fcfs.hpp"
#include "fsnet/model_file.hpp"

namespace fsnet::cli {

int run_conv(const ConvOptions& opts, std::ostream& out, std::ostream& err) {
  const auto model = read_model_file(opts.model);
  const auto& layer = select_conv_layer(model, opts.layer);
  const auto input = read_tensor_file(opts.input);
  const auto fs = layer.summary_f32();
  if (input.channels() != fs.geometry().c_in) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(input.channels()) +
                                              " channels, layer " + layer.name + " expects " +
                                              std::to_string(fs.geometry().c_in));
  }
  const ExecOptions exec{opts.workers};

  Json report{{"command", "conv"},
              {"layer", layer.name},
              {"dtype", to_string(layer.dtype)},
              {"input", {input.channels(), input.d1(), input.d2()}}};

  ConvOutput<float> result;
  const bool want_naive = opts.engine != Engine::Fcfs;
  const bool want_fcfs = opts.engine != Engine::Naive;
  ConvOutput<float> reference;

  if (want_naive) {
    MultCounter counter;
    reference = naive_conv(fs, input, &counter, exec);
    report["naive"] = to_json(counter);
    result = reference;
  }
  if (want_fcfs) {
    if (fs.geometry().s2 < 2) {
      err << "warning: " << layer.name
          << ": s2 = 1, the integral-line path cannot accelerate this layer; using brute force\n";
      report["fcfs"] = Json{{"fell_back", true}, {"reason", "s2 = 1"}};
      if (!want_naive) {
        MultCounter counter;
        result = naive_conv(fs, input, &counter, exec);
        report["naive"] = to_json(counter);
      }
    } else {
      auto fast = fcfs_conv(fs, input, exec);
      Json entry = to_json(fast.counter);
      entry["fell_back"] = fast.fell_back;
      if (fast.fell_back) {
        err << "warning: " << layer.name << ": " << fast.note << '\n';
        entry["reason"] = fast.note;
      }
      report["fcfs"] = std::move(entry);
      if (want_naive) {
        const auto dev = max_relative_deviation(fast.output, reference);
        report["max_relative_deviation"] = dev;
        report["tolerance"] = opts.tolerance;
        report["within_tolerance"] = dev <= opts.tolerance;
        const auto& n = report["naive"]["multiplies"];
        const auto f = report["fcfs"]["multiplies"].get<std::uint64_t>();
        report["measured_ratio"] = f == 0 ? 0.0 : n.get<double>() / static_cast<double>(f);
      }
      result = std::move(fast.output);
    }
  }

  report["output"] = {result.channels(), result.d1(), result.d2()};
  if (opts.output) {
    write_tensor_file(*opts.output, result);
    report["output_file"] = opts.output->string();
  }
  emit(out, report);

  if (report.contains("within_tolerance") && !report["within_tolerance"].get<bool>()) {
    err << "error: engines disagree beyond tolerance " << opts.tolerance << '\n';
    return kExitVerificationFailed;
  }
  return kExitOk;
}

}  // namespace fsnet::cli
