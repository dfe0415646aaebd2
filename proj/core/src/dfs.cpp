#include "fsnet/dfs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsnet/error.hpp"

namespace fsnet {

namespace {

std::int64_t max_start(std::int64_t L, std::int64_t K) {
  if (K < 1 || L <= K + 1) {
    throw Error(ErrorCode::FSTooShort, "summary length " + std::to_string(L) +
                                           " leaves no room to move a filter of length " +
                                           std::to_string(K));
  }
  return L - K - 1;
}

void check_location(double l, std::int64_t L, std::int64_t K) {
  if (K < 1 || L < K + 1 || !(l >= 0.0) || l > static_cast<double>(L - K - 1)) {
    throw Error(ErrorCode::OutOfRange, "location " + std::to_string(l) + " outside [0, " +
                                           std::to_string(L - K - 1) + "]");
  }
}

}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

FractionalLocation locate(double alpha, std::int64_t L, std::int64_t K) {
  const auto range = static_cast<double>(max_start(L, K));
  const double s = sigmoid(alpha);
  return {alpha, s * range, range * s * (1.0 - s), range};
}

double alpha_for_location(double l, std::int64_t L, std::int64_t K, double margin) {
  const auto range = static_cast<double>(max_start(L, K));
  const double p = std::clamp(l / range, margin, 1.0 - margin);
  return std::log(p / (1.0 - p));
}

std::vector<double> initial_alphas(std::int64_t L, std::int64_t K, std::int64_t stride,
                                   std::int64_t filters) {
  std::vector<double> alphas(static_cast<std::size_t>(std::max<std::int64_t>(filters, 0)));
  for (std::int64_t i = 0; i < filters; ++i) {
    alphas[static_cast<std::size_t>(i)] =
        alpha_for_location(static_cast<double>(i * stride), L, K);
  }
  return alphas;
}

std::vector<double> extract_fractional(std::span<const double> fs, double l, std::int64_t K) {
  const auto L = static_cast<std::int64_t>(fs.size());
  check_location(l, L, K);
  const double base = std::floor(l);
  const auto start = static_cast<std::size_t>(base);
  const double right = l - base;
  const double left = 1.0 + base - l;
  std::vector<double> g(static_cast<std::size_t>(K));
  if (right == 0.0) {
    std::copy_n(fs.begin() + static_cast<std::ptrdiff_t>(start), K, g.begin());
    return g;
  }
  for (std::size_t t = 0; t < g.size(); ++t) {
    g[t] = left * fs[start + t] + right * fs[start + t + 1];
  }
  return g;
}

AlphaGradient grad_alpha(std::span<const double> fs, double alpha,
                         std::span<const double> upstream) {
  const auto L = static_cast<std::int64_t>(fs.size());
  const auto K = static_cast<std::int64_t>(upstream.size());
  const auto loc = locate(alpha, L, K);
  const double base = std::floor(loc.l);
  const auto start = static_cast<std::size_t>(base);

  double dot = 0.0;
  for (std::size_t t = 0; t < upstream.size(); ++t) {
    dot += upstream[t] * (fs[start + t + 1] - fs[start + t]);
  }
  return {dot * loc.dl_dalpha, loc.l == base};
}

SparseGradient grad_fs(std::int64_t L, double l, std::span<const double> upstream) {
  const auto K = static_cast<std::int64_t>(upstream.size());
  check_location(l, L, K);
  const double base = std::floor(l);
  const double right = l - base;
  const double left = 1.0 + base - l;

  SparseGradient grad;
  grad.start = static_cast<std::int64_t>(base);
  grad.values.assign(upstream.size() + 1, 0.0);
  for (std::size_t t = 0; t < upstream.size(); ++t) {
    grad.values[t] += left * upstream[t];
    grad.values[t + 1] += right * upstream[t];
  }
  return grad;
}

std::vector<double> accumulate_grad_fs(std::int64_t L, std::span<const double> locations,
                                       std::span<const std::vector<double>> upstreams) {
  if (locations.size() != upstreams.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one upstream gradient per filter location required");
  }
  std::vector<double> dense(static_cast<std::size_t>(L), 0.0);
  for (std::size_t f = 0; f < locations.size(); ++f) {
    const auto g = grad_fs(L, locations[f], upstreams[f]);
    for (std::size_t t = 0; t < g.values.size(); ++t) {
      dense[static_cast<std::size_t>(g.start) + t] += g.values[t];
    }
  }
  return dense;
}

}  // namespace fsnet
