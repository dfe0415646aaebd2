#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "commands.hpp"
#include "report.hpp"

#include "fsnet/dfs.hpp"
#include "fsnet/model_file.hpp"

namespace fsnet::cli {

namespace {

// <upstream, g>; accumulated in extended precision so the difference
// quotients are not swamped by summation roundoff.
long double objective(std::span<const double> fs, double alpha,
                      std::span<const double> upstream) {
  const auto K = static_cast<std::int64_t>(upstream.size());
  const auto loc = locate(alpha, static_cast<std::int64_t>(fs.size()), K);
  const auto g = extract_fractional(fs, loc.l, K);
  long double acc = 0.0L;
  for (std::size_t t = 0; t < g.size(); ++t) {
    acc += static_cast<long double>(g[t]) * static_cast<long double>(upstream[t]);
  }
  return acc;
}

double rel_error(double a, double b, double scale) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale});
}

struct PointResult {
  double alpha_err = 0.0;
  double fs_err = 0.0;
};

// Central differences in alpha and in each summary weight the filter reads.
PointResult check_point(std::vector<double>& fs, double alpha, std::span<const double> upstream,
                        const GradcheckOptions& opts) {
  const auto K = static_cast<std::int64_t>(upstream.size());
  const auto L = static_cast<std::int64_t>(fs.size());
  const auto loc = locate(alpha, L, K);
  const auto start = static_cast<std::size_t>(std::floor(loc.l));

  PointResult res;
  const auto analytic = grad_alpha(fs, alpha, upstream).value;
  const auto fd = static_cast<double>((objective(fs, alpha + opts.alpha_step, upstream) -
                                       objective(fs, alpha - opts.alpha_step, upstream)) /
                                      (2.0L * opts.alpha_step));
  double scale = 0.0;
  for (std::size_t t = 0; t < upstream.size(); ++t) {
    scale += std::abs(upstream[t]) * (std::abs(fs[start + t]) + std::abs(fs[start + t + 1]));
  }
  scale *= loc.dl_dalpha;
  res.alpha_err = rel_error(analytic, fd, std::max(scale, 1e-300));

  const auto sparse = grad_fs(L, loc.l, upstream);
  // Per-entry magnitude before the two blend contributions cancel.
  std::vector<double> magnitude_up(upstream.size());
  std::transform(upstream.begin(), upstream.end(), magnitude_up.begin(),
                 [](double u) { return std::abs(u); });
  const auto magnitude = grad_fs(L, loc.l, magnitude_up);
  for (std::size_t t = 0; t < sparse.values.size(); ++t) {
    auto& w = fs[static_cast<std::size_t>(sparse.start) + t];
    const double saved = w;
    w = saved + opts.fs_step;
    const auto step_up = static_cast<long double>(w) - saved;
    const auto up = objective(fs, alpha, upstream);
    w = saved - opts.fs_step;
    const auto step_down = saved - static_cast<long double>(w);
    const auto down = objective(fs, alpha, upstream);
    w = saved;
    const auto fd_w = static_cast<double>((up - down) / (step_up + step_down));
    res.fs_err = std::max(res.fs_err, rel_error(sparse.values[t], fd_w,
                                                 std::max(magnitude.values[t], 1e-300)));
  }
  return res;
}

}  // namespace

int run_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err) {
  const auto model = read_model_file(opts.model);
  bool ok = true;
  Json layers = Json::array();

  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    const auto& layer = model.layers[li];
    if (layer.kind != LayerKind::Conv) continue;
    auto fs = layer.weights_as_double();
    const auto L = static_cast<std::int64_t>(fs.size());
    const auto K = layer.geom.filter_size();
    const auto range = locate(0.0, L, K).max_l;  // throws FSTooShort

    std::mt19937_64 rng(opts.seed * 1000003ULL + li);
    std::uniform_real_distribution<double> alpha_dist(-4.0, 4.0);
    std::uniform_real_distribution<double> up_dist(-1.0, 1.0);
    std::vector<double> upstream(static_cast<std::size_t>(K));

    double worst_alpha = 0.0, worst_fs = 0.0;
    int checked = 0;
    for (int p = 0; p < opts.points; ++p) {
      double alpha = 0.0;
      double frac = 0.0;
      do {
        alpha = alpha_dist(rng);
        const auto l = sigmoid(alpha) * range;
        frac = l - std::floor(l);
      } while (frac < 0.05 || frac > 0.95);
      for (auto& u : upstream) u = up_dist(rng);
      const auto r = check_point(fs, alpha, upstream, opts);
      worst_alpha = std::max(worst_alpha, r.alpha_err);
      worst_fs = std::max(worst_fs, r.fs_err);
      ++checked;
    }

    int flagged = 0;
    Json flags = Json::array();
    if (layer.alphas) {
      for (std::size_t f = 0; f < layer.alphas->size(); ++f) {
        const double alpha = (*layer.alphas)[f];
        const auto loc = locate(alpha, L, K);
        const double dist = std::abs(loc.l - std::round(loc.l));
        for (auto& u : upstream) u = up_dist(rng);
        // Roundoff in l and in the objective over the step in l; on the sigmoid
        // tails this swamps any difference quotient.
        const double fd_noise = std::numeric_limits<double>::epsilon() * (std::abs(loc.l) + 1.0) /
                                (opts.alpha_step * loc.dl_dalpha);
        const char* reason = nullptr;
        if (loc.l == std::floor(loc.l)) {
          reason = "integer location";
        } else if (dist < 4.0 * opts.alpha_step * loc.dl_dalpha + 1e-12) {
          reason = "near-integer location";
        } else if (fd_noise > 0.05 * opts.tolerance) {
          reason = "saturated location";
        }
        if (reason) {
          ++flagged;
          flags.push_back(Json{{"filter", f}, {"l", loc.l}, {"reason", reason}});
          continue;
        }
        const auto r = check_point(fs, alpha, upstream, opts);
        worst_alpha = std::max(worst_alpha, r.alpha_err);
        worst_fs = std::max(worst_fs, r.fs_err);
        ++checked;
      }
    }

    const bool pass = worst_alpha <= opts.tolerance && worst_fs <= opts.tolerance;
    ok = ok && pass;
    if (!pass) err << "error: " << layer.name << ": gradient check failed\n";
    layers.push_back(Json{{"name", layer.name},
                          {"points", checked},
                          {"flagged", flagged},
                          {"flags", std::move(flags)},
                          {"max_rel_error_alpha", worst_alpha},
                          {"max_rel_error_fs", worst_fs},
                          {"pass", pass}});
  }

  emit(out, Json{{"command", "gradcheck"},
                 {"seed", opts.seed},
                 {"tolerance", opts.tolerance},
                 {"layers", std::move(layers)},
                 {"pass", ok}});
  return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace fsnet::cli
