#include "fsnet/fcfs.hpp"

#include <algorithm>
#include <utility>

#include "parallel.hpp"

namespace fsnet {

std::int64_t DiagonalPlan::total_entries() const noexcept {
  std::int64_t total = 0;
  for (const auto& d : diagonals)
    for (const auto& r : d.runs) total += r.length();
  return total;
}

std::int64_t DiagonalPlan::run_count() const noexcept {
  std::int64_t total = 0;
  for (const auto& d : diagonals) total += static_cast<std::int64_t>(d.runs.size());
  return total;
}

DiagonalPlan required_diagonals(const ConvGeometry& geom, std::int64_t d1, std::int64_t d2) {
  if (d1 < 1 || d2 < 1) throw Error(ErrorCode::ShapeMismatch, "spatial size must be positive");
  if (geom.s2 < 2) {
    throw Error(ErrorCode::UnsupportedGeometry,
                "integral-line convolution needs s2 > 1 (got s2 = " + std::to_string(geom.s2) +
                    ")");
  }
  DiagonalPlan plan;
  plan.geom = geom;
  plan.layout = derive_layout(geom);
  plan.d1 = d1;
  plan.d2 = d2;
  plan.padded_d1 = d1 + geom.s1 - 1;
  plan.padded_d2 = d2 + geom.s2 - 1;
  plan.channel_aligned = plan.layout.stride % geom.c_in == 0;

  const auto c = geom.c_in;
  const auto width = geom.slice_size();
  const auto column_step = c * plan.padded_d1;

  // (offset, slice start in F) for every filter slice paired with every
  // feature slice it meets.
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  pairs.reserve(static_cast<std::size_t>(geom.c_out * geom.s2 * d1 * d2));
  for (std::int64_t o = 0; o < geom.c_out; ++o) {
    for (std::int64_t k = 0; k < geom.s2; ++k) {
      const auto b = o * plan.layout.stride + k * width;
      for (std::int64_t n = 0; n < d2; ++n) {
        for (std::int64_t m = 0; m < d1; ++m) {
          const auto a = (n + k) * column_step + m * c;
          pairs.emplace_back(a - b, b);
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  for (std::size_t i = 0; i < pairs.size();) {
    DiagonalRuns diag;
    diag.offset = pairs[i].first;
    for (; i < pairs.size() && pairs[i].first == diag.offset; ++i) {
      const auto b = pairs[i].second;
      if (!diag.runs.empty() && b <= diag.runs.back().end) {
        diag.runs.back().end = std::max(diag.runs.back().end, b + width);
      } else {
        diag.runs.push_back({b, b + width});
      }
    }
    plan.diagonals.push_back(std::move(diag));
  }
  return plan;
}

template <typename T>
DiagonalPlan required_diagonals(const FilterSummary<T>& fs, const FeatureMap<T>& map) {
  if (map.channels() != fs.geometry().c_in) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(map.channels()) +
                                              " channels, filters expect " +
                                              std::to_string(fs.geometry().c_in));
  }
  return required_diagonals(fs.geometry(), map.d1(), map.d2());
}

template <typename T>
IntegralLines<T>::IntegralLines(std::vector<std::int64_t> offsets,
                                std::vector<std::size_t> first_run,
                                std::vector<DiagonalIntegral<T>> lines)
    : offsets_(std::move(offsets)), first_run_(std::move(first_run)), lines_(std::move(lines)) {}

template <typename T>
const DiagonalIntegral<T>* IntegralLines<T>::find(std::int64_t offset,
                                                  std::int64_t col) const noexcept {
  const auto it = std::lower_bound(offsets_.begin(), offsets_.end(), offset);
  if (it == offsets_.end() || *it != offset) return nullptr;
  const auto d = static_cast<std::size_t>(it - offsets_.begin());
  const auto first = lines_.begin() + static_cast<std::ptrdiff_t>(first_run_[d]);
  const auto last = lines_.begin() + static_cast<std::ptrdiff_t>(first_run_[d + 1]);
  // First run whose end is past col.
  const auto run = std::upper_bound(first, last, col, [](std::int64_t c, const auto& line) {
    return c < line.end_col;
  });
  if (run == last || run->start_col > col) return nullptr;
  return &*run;
}

template <typename T>
IntegralLines<T> build_integrals(const FilterSummary<T>& fs, const FeatureMap<T>& padded,
                                 const DiagonalPlan& plan, MultCounter* counter,
                                 const ExecOptions& exec) {
  if (padded.channels() != plan.geom.c_in || padded.d1() != plan.padded_d1 ||
      padded.d2() != plan.padded_d2) {
    throw Error(ErrorCode::ShapeMismatch, "padded map does not match the diagonal plan");
  }
  if (!(fs.geometry() == plan.geom)) {
    throw Error(ErrorCode::ShapeMismatch, "summary does not match the diagonal plan");
  }

  std::vector<std::int64_t> offsets;
  std::vector<std::size_t> first_run;
  offsets.reserve(plan.diagonals.size());
  first_run.reserve(plan.diagonals.size() + 1);
  std::size_t run_total = 0;
  for (const auto& d : plan.diagonals) {
    offsets.push_back(d.offset);
    first_run.push_back(run_total);
    run_total += d.runs.size();
  }
  first_run.push_back(run_total);

  std::vector<DiagonalIntegral<T>> lines(run_total);
  const auto m = padded.data();
  const auto f = fs.weights();
  const auto diag_count = static_cast<std::int64_t>(plan.diagonals.size());

  std::vector<MultCounter> partial(std::max(1u, exec.workers));
  detail::parallel_chunks(diag_count, exec.workers, [&](std::int64_t begin, std::int64_t end,
                                                        unsigned worker) {
    MultCounter local;
    for (std::int64_t di = begin; di < end; ++di) {
      const auto& diag = plan.diagonals[static_cast<std::size_t>(di)];
      auto slot = first_run[static_cast<std::size_t>(di)];
      for (const auto& run : diag.runs) {
        auto& line = lines[slot++];
        line.offset = diag.offset;
        line.start_col = run.begin;
        line.end_col = run.end;
        line.integral.resize(static_cast<std::size_t>(run.length()));
        T sum{};
        for (std::int64_t t = run.begin; t < run.end; ++t) {
          sum += m[static_cast<std::size_t>(t + diag.offset)] * f[static_cast<std::size_t>(t)];
          line.integral[static_cast<std::size_t>(t - run.begin)] = sum;
        }
        local.multiplies += static_cast<std::uint64_t>(run.length());
        local.additions += static_cast<std::uint64_t>(run.length() - 1);
      }
    }
    partial[worker] += local;
  });

  if (counter) {
    for (const auto& p : partial) *counter += p;
  }
  return IntegralLines<T>(std::move(offsets), std::move(first_run), std::move(lines));
}

template <typename T>
FcfsResult<T> fcfs_conv(const FilterSummary<T>& fs, const FeatureMap<T>& map,
                        const ExecOptions& exec) {
  const auto& g = fs.geometry();
  const auto plan = required_diagonals(fs, map);

  FcfsResult<T> result;
  if (!plan.channel_aligned) {
    result.fell_back = true;
    result.note = "stride " + std::to_string(fs.stride()) + " is not a multiple of c_in = " +
                  std::to_string(g.c_in) + "; used brute-force convolution";
    result.output = naive_conv(fs, map, &result.counter, exec);
    return result;
  }

  const auto padded = pad_same(map, g.s1, g.s2);
  const auto lines = build_integrals(fs, padded, plan, &result.counter, exec);

  const auto c = g.c_in;
  const auto width = g.slice_size();
  const auto column_step = c * plan.padded_d1;
  result.output = ConvOutput<T>(g.c_out, map.d1(), map.d2());
  auto& out = result.output;

  std::vector<MultCounter> partial(std::max(1u, exec.workers));
  detail::parallel_chunks(g.c_out, exec.workers, [&](std::int64_t begin, std::int64_t end,
                                                     unsigned worker) {
    MultCounter local;
    for (std::int64_t o = begin; o < end; ++o) {
      const auto base = o * fs.stride();
      for (std::int64_t n = 0; n < map.d2(); ++n) {
        for (std::int64_t m = 0; m < map.d1(); ++m) {
          T acc{};
          for (std::int64_t k = 0; k < g.s2; ++k) {
            const auto a = (n + k) * column_step + m * c;
            const auto b = base + k * width;
            const auto* line = lines.find(a - b, b);
            acc += line->range_sum(b, b + width);
            local.additions += b > line->start_col ? 2 : 1;
          }
          out.at(o, m, n) = acc;
        }
      }
    }
    partial[worker] += local;
  });
  for (const auto& p : partial) result.counter += p;
  return result;
}

template <typename T>
AccelerationMeasurement<T> measured_acceleration(const FilterSummary<T>& fs,
                                                 const FeatureMap<T>& map,
                                                 const ExecOptions& exec) {
  AccelerationMeasurement<T> report;
  const auto reference = naive_conv(fs, map, &report.naive, exec);
  const auto fast = fcfs_conv(fs, map, exec);
  report.fcfs = fast.counter;
  report.fell_back = fast.fell_back;
  report.ratio = report.fcfs.multiplies == 0
                     ? 0.0
                     : static_cast<double>(report.naive.multiplies) /
                           static_cast<double>(report.fcfs.multiplies);
  report.predicted = predicted_acceleration(fs.geometry(), fs.layout(), map.d1(), map.d2());
  report.max_relative_deviation =
      max_relative_deviation(fast.output, reference);
  return report;
}

#define FSNET_INSTANTIATE(T)                                                                 \
  template DiagonalPlan required_diagonals(const FilterSummary<T>&, const FeatureMap<T>&);   \
  template class IntegralLines<T>;                                                           \
  template IntegralLines<T> build_integrals(const FilterSummary<T>&, const FeatureMap<T>&,   \
                                            const DiagonalPlan&, MultCounter*,               \
                                            const ExecOptions&);                             \
  template FcfsResult<T> fcfs_conv(const FilterSummary<T>&, const FeatureMap<T>&,            \
                                   const ExecOptions&);                                      \
  template AccelerationMeasurement<T> measured_acceleration(                                 \
      const FilterSummary<T>&, const FeatureMap<T>&, const ExecOptions&);

FSNET_INSTANTIATE(float)
FSNET_INSTANTIATE(double)

#undef FSNET_INSTANTIATE

}  // namespace fsnet
