#include <iostream>

#include "CLI11.hpp"

#include "cli/commands.hpp"
#include "fsnet/error.hpp"

namespace cli = fsnet::cli;

int main(int argc, char** argv) {
  CLI::App app{"Filter-summary convolution toolkit"};
  app.require_subcommand(1);

  cli::PlanOptions plan;
  auto* plan_cmd = app.add_subcommand("plan", "Per-layer summary layout and parameter report");
  plan_cmd->add_option("arch", plan.arch, "Architecture file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--r", plan.r, "Compression ratio for every conv layer, e.g. 4 or 3.7");

  cli::ConvOptions conv;
  std::string engine = "both";
  auto* conv_cmd = app.add_subcommand("conv", "Run one conv layer with the chosen engine(s)");
  conv_cmd->add_option("model", conv.model, "Model file")->required()->check(CLI::ExistingFile);
  conv_cmd->add_option("input", conv.input, "Input tensor file")->required()->check(CLI::ExistingFile);
  conv_cmd->add_option("--engine", engine, "naive, fcfs or both")
      ->check(CLI::IsMember({"naive", "fcfs", "both"}));
  conv_cmd->add_option("-o,--output", conv.output, "Write the output tensor here");
  conv_cmd->add_option("--layer", conv.layer, "Layer name or index (default: first conv)");
  conv_cmd->add_option("--tolerance", conv.tolerance, "Max relative deviation for --engine both");
  conv_cmd->add_option("--workers", conv.workers, "Worker threads");

  cli::QuantizeOptions quant;
  auto* quant_cmd = app.add_subcommand("quantize", "Linear n-bit quantization of every layer");
  quant_cmd->add_option("model", quant.model, "Model file")->required()->check(CLI::ExistingFile);
  quant_cmd->add_option("-o,--output", quant.output, "Quantized model file")->required();
  quant_cmd->add_option("--bits", quant.bits, "4 or 8")->check(CLI::IsMember({4, 8}));

  cli::GradcheckOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of location gradients");
  grad_cmd->add_option("model", grad.model, "Model file")->required()->check(CLI::ExistingFile);
  grad_cmd->add_option("--seed", grad.seed, "Sampling seed");
  grad_cmd->add_option("--points", grad.points, "Random points per layer");
  grad_cmd->add_option("--tolerance", grad.tolerance, "Max relative error");

  cli::BenchOptions bench;
  std::vector<std::int64_t> spatial;
  auto* bench_cmd = app.add_subcommand("bench", "Time and count naive vs integral-line conv");
  bench_cmd->add_option("arch", bench.arch, "Architecture file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--spatial", spatial, "d1 d2 for every layer")->expected(2);
  bench_cmd->add_option("--repeat", bench.repeat, "Timing repetitions (best is kept)");
  bench_cmd->add_option("--seed", bench.seed, "Weight/input seed");
  bench_cmd->add_option("--workers", bench.workers, "Worker threads");

  cli::InitOptions init;
  std::string init_arch;
  auto* init_cmd = app.add_subcommand("init", "Write a randomly initialised model file");
  init_cmd->add_option("--arch", init_arch, "Architecture file")->check(CLI::ExistingFile);
  init_cmd->add_option("--c-in", init.c_in, "Input channels (single-layer model)");
  init_cmd->add_option("--s1", init.s1, "Kernel rows");
  init_cmd->add_option("--s2", init.s2, "Kernel columns");
  init_cmd->add_option("--c-out", init.c_out, "Filter count");
  init_cmd->add_option("--r", init.r, "Compression ratio");
  init_cmd->add_option("--policy", init.stride_policy,
                       "paper_generic, paper_aligned or channel_aligned");
  init_cmd->add_option("-o,--output", init.output, "Model file")->required();
  init_cmd->add_option("--seed", init.seed, "Initialisation seed");
  init_cmd->add_flag("--alphas", init.alphas, "Store per-filter location parameters");
  init_cmd->add_flag("--constant", init.constant, "Use the constant weight 0.5");

  cli::MakeInputOptions input;
  auto* input_cmd = app.add_subcommand("make-input", "Write a random input tensor file");
  input_cmd->add_option("--channels", input.channels, "Channels")->required();
  input_cmd->add_option("--d1", input.d1, "Rows")->required();
  input_cmd->add_option("--d2", input.d2, "Columns")->required();
  input_cmd->add_option("--seed", input.seed, "Seed");
  input_cmd->add_flag("--zeros", input.zeros, "All-zero tensor");
  input_cmd->add_option("-o,--output", input.output, "Tensor file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  return cli::guarded(std::cerr, [&]() -> int {
    if (*plan_cmd) return cli::run_plan(plan, std::cout, std::cerr);
    if (*conv_cmd) {
      conv.engine = engine == "naive" ? cli::Engine::Naive
                    : engine == "fcfs" ? cli::Engine::Fcfs
                                       : cli::Engine::Both;
      return cli::run_conv(conv, std::cout, std::cerr);
    }
    if (*quant_cmd) return cli::run_quantize(quant, std::cout, std::cerr);
    if (*grad_cmd) return cli::run_gradcheck(grad, std::cout, std::cerr);
    if (*bench_cmd) {
      if (spatial.size() == 2) {
        bench.d1 = spatial[0];
        bench.d2 = spatial[1];
      }
      return cli::run_bench(bench, std::cout, std::cerr);
    }
    if (*init_cmd) {
      if (!init_arch.empty()) init.arch = init_arch;
      else if (init.c_in < 1 || init.c_out < 1) {
        std::cerr << "error: init needs --arch or --c-in/--c-out\n";
        return cli::kExitInputError;
      }
      return cli::run_init(init, std::cout, std::cerr);
    }
    if (*input_cmd) return cli::run_make_input(input, std::cout, std::cerr);
    std::cerr << "error: no command given\n";
    return cli::kExitInputError;
  });
}
