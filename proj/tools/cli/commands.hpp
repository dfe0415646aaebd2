#pragma once

#include <cstdint>
#include <filesystem>
#include <exception>
#include <ostream>
#include <optional>
#include <string>

namespace fsnet::cli {

// Every command writes a JSON report to `out`, diagnostics to `err`, and
// returns the process exit code.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInputError = 2;

struct PlanOptions {
  std::filesystem::path arch;
  std::optional<std::string> r;  // overrides every layer when set
};
int run_plan(const PlanOptions& opts, std::ostream& out, std::ostream& err);

enum class Engine { Naive, Fcfs, Both };

struct ConvOptions {
  std::filesystem::path model;
  std::filesystem::path input;
  std::optional<std::filesystem::path> output;
  Engine engine = Engine::Both;
  std::string layer;  // name or index; empty selects the first conv layer
  double tolerance = 1e-5;
  unsigned workers = 1;
};
int run_conv(const ConvOptions& opts, std::ostream& out, std::ostream& err);

struct QuantizeOptions {
  std::filesystem::path model;
  std::filesystem::path output;
  int bits = 8;
};
int run_quantize(const QuantizeOptions& opts, std::ostream& out, std::ostream& err);

struct GradcheckOptions {
  std::filesystem::path model;
  std::uint64_t seed = 0;
  int points = 100;
  double tolerance = 1e-6;
  double alpha_step = 1e-5;
  double fs_step = 1e-6;
};
int run_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::filesystem::path arch;
  std::optional<std::int64_t> d1;
  std::optional<std::int64_t> d2;
  int repeat = 3;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};
int run_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

struct InitOptions {
  std::optional<std::filesystem::path> arch;
  // Single-layer geometry when no architecture file is given.
  std::int64_t c_in = 0;
  std::int64_t s1 = 3;
  std::int64_t s2 = 3;
  std::int64_t c_out = 0;
  std::string r = "4";
  std::string stride_policy = "channel_aligned";
  std::filesystem::path output;
  std::uint64_t seed = 0;
  bool alphas = false;
  bool affine = true;  // emit fc layers from the architecture
  bool constant = false;  // every weight 0.5 instead of random
};
int run_init(const InitOptions& opts, std::ostream& out, std::ostream& err);

struct MakeInputOptions {
  std::int64_t channels = 1;
  std::int64_t d1 = 1;
  std::int64_t d2 = 1;
  std::uint64_t seed = 0;
  bool zeros = false;
  std::filesystem::path output;
};
int run_make_input(const MakeInputOptions& opts, std::ostream& out, std::ostream& err);

/// Runs a command, reporting any exception on `err` as an input error.
template <typename F>
int guarded(std::ostream& err, F&& command) {
  try {
    return command();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace fsnet::cli
