#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <tuple>

#include "commands.hpp"
#include "report.hpp"

#include "fsnet/arch_spec.hpp"
#include "fsnet/conv_oracle.hpp"
#include "fsnet/error.hpp"
#include "fsnet/fcfs.hpp"

namespace fsnet::cli {

namespace {

template <typename Fn>
double best_seconds(int repeat, Fn&& fn) {
  double best = 0.0;
  for (int i = 0; i < std::max(1, repeat); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t1 - t0).count();
    best = i == 0 ? s : std::min(best, s);
  }
  return best;
}

}  // namespace

int run_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  const auto spec = read_arch_file(opts.arch);
  if (opts.d1.has_value() != opts.d2.has_value()) {
    throw Error(ErrorCode::ParseError, "--spatial takes both d1 and d2");
  }
  const ExecOptions exec{opts.workers};

  // Identical layers are measured once.
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t, std::int64_t,
                         std::int64_t, int, std::int64_t, std::int64_t>;
  std::map<Key, std::size_t> seen;
  Json layers = Json::array();
  std::uint64_t case_index = 0;

  for (const auto& layer : spec.layers) {
    if (layer.type != ArchLayerType::Conv) continue;
    const auto g = spec.conv_geometry(layer);
    const auto d1 = opts.d1 ? *opts.d1 : layer.d1.value_or(0);
    const auto d2 = opts.d2 ? *opts.d2 : layer.d2.value_or(0);
    if (d1 < 1 || d2 < 1) {
      throw Error(ErrorCode::ParseError,
                  layer.name + ": no spatial size in the architecture; pass --spatial d1 d2");
    }
    const Key key{g.c_in, g.s1, g.s2, g.c_out, g.r.num(), g.r.den(),
                  static_cast<int>(g.stride_policy), d1, d2};
    if (auto it = seen.find(key); it != seen.end()) {
      layers[it->second]["instances"] = layers[it->second]["instances"].get<int>() + 1;
      continue;
    }

    Json entry{{"name", layer.name},
               {"geometry", {g.c_in, g.s1, g.s2, g.c_out}},
               {"r", g.r.to_string()},
               {"spatial", {d1, d2}},
               {"instances", 1}};
    Layout layout;
    try {
      layout = derive_layout(g);
    } catch (const Error& e) {
      entry["skipped"] = e.what();
      seen.emplace(key, layers.size());
      layers.push_back(std::move(entry));
      continue;
    }
    const auto predicted = predicted_acceleration(g, layout, d1, d2);
    entry["stride"] = layout.stride;
    entry["predicted_ratio"] = predicted.accelerable ? Json(predicted.ratio) : Json(nullptr);
    entry["predicted_fcfs_mults"] = predicted.paper_fcfs_mults;

    if (g.s2 < 2) {
      entry["skipped"] = "s2 = 1: not accelerable by integral lines";
    } else if (d1 * d2 == 1) {
      entry["skipped"] = "1x1 output: nothing to share";
    } else {
      const auto fs = random_filter_summary<float>(g, opts.seed + case_index);
      const auto map = random_feature_map<float>(g.c_in, d1, d2, opts.seed + case_index + 1);
      MultCounter naive_count;
      ConvOutput<float> reference;
      FcfsResult<float> fast;
      const double t_naive = best_seconds(opts.repeat, [&] {
        naive_count = {};
        reference = naive_conv(fs, map, &naive_count, exec);
      });
      const double t_fcfs = best_seconds(opts.repeat, [&] { fast = fcfs_conv(fs, map, exec); });
      entry["naive"] = to_json(naive_count);
      entry["fcfs"] = to_json(fast.counter);
      entry["fell_back"] = fast.fell_back;
      entry["measured_ratio"] = static_cast<double>(naive_count.multiplies) /
                                static_cast<double>(std::max<std::uint64_t>(1, fast.counter.multiplies));
      entry["naive_seconds"] = t_naive;
      entry["fcfs_seconds"] = t_fcfs;
      entry["wall_clock_ratio"] = t_fcfs > 0.0 ? t_naive / t_fcfs : 0.0;
      entry["max_relative_deviation"] = max_relative_deviation(fast.output, reference);
      if (fast.fell_back) err << "warning: " << layer.name << ": " << fast.note << '\n';
    }
    case_index += 2;
    seen.emplace(key, layers.size());
    layers.push_back(std::move(entry));
  }

  emit(out, Json{{"command", "bench"},
                 {"arch", spec.name},
                 {"repeat", opts.repeat},
                 {"layers", std::move(layers)}});
  return kExitOk;
}

}  // namespace fsnet::cli
