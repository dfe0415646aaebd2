#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fsnet {

// Differentiable filter placement. A filter of length K starts at a
// fractional position l inside a summary of length L and is the linear
// blend of the two integer-start segments around it:
//   g = (1 + floor(l) - l) F[floor(l) .. + K) + (l - floor(l)) F[floor(l) + 1 .. + K)
// The start is driven by an unconstrained alpha through
//   l = sigmoid(alpha) * (L - K - 1)
// which keeps floor(l) + K <= L - 1 for every finite alpha.

double sigmoid(double x) noexcept;

struct FractionalLocation {
  double alpha = 0.0;
  double l = 0.0;
  double dl_dalpha = 0.0;
  double max_l = 0.0;  // L - K - 1
};

/// Throws FSTooShort when L <= K + 1.
FractionalLocation locate(double alpha, std::int64_t L, std::int64_t K);

/// Inverse of locate; `l` is clamped into (0, L - K - 1) by `margin` so the
/// result stays finite.
double alpha_for_location(double l, std::int64_t L, std::int64_t K, double margin = 1e-6);

/// One alpha per filter reproducing the static placement i * s.
std::vector<double> initial_alphas(std::int64_t L, std::int64_t K, std::int64_t stride,
                                   std::int64_t filters);

/// Throws OutOfRange unless 0 <= l <= L - K - 1.
std::vector<double> extract_fractional(std::span<const double> fs, double l, std::int64_t K);

struct AlphaGradient {
  double value = 0.0;
  /// l landed exactly on an integer; value is the right-hand derivative.
  bool at_integer = false;
};

/// d<upstream, g>/d alpha. Throws FSTooShort / ShapeMismatch.
AlphaGradient grad_alpha(std::span<const double> fs, double alpha,
                         std::span<const double> upstream);

/// Gradient of <upstream, g> with respect to the summary, nonzero only on
/// [start, start + K].
struct SparseGradient {
  std::int64_t start = 0;
  std::vector<double> values;  // K + 1 entries
};

/// Throws OutOfRange / ShapeMismatch.
SparseGradient grad_fs(std::int64_t L, double l, std::span<const double> upstream);

/// Adds every filter's sparse gradient into one dense vector of length L,
/// in filter order.
std::vector<double> accumulate_grad_fs(std::int64_t L, std::span<const double> locations,
                                       std::span<const std::vector<double>> upstreams);

}  // namespace fsnet
