#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

#include "safebox/geometry.hpp"
#include "safebox/theory.hpp"

namespace safebox {

/// Raised when rejection sampling cannot find a qualifying pair within the
/// attempt cap, which signals a pathological alpha/range combination.
class SampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of a randomized falsification run against the coverage bound.
struct VerifyReport {
  double alpha = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double bound = 1.0;          // worst_case_factor(alpha)
  double max_observed_k = 1.0;
  std::uint64_t violations = 0;
  std::optional<std::pair<Rect, Rect>> worst_pair;  // (prediction, ground truth)

  bool operator==(const VerifyReport& other) const = default;
};

enum class WitnessAxis { width, height };

namespace detail {

// Uniform double in [0, 1) built from the top 53 bits of the engine output,
// so the draw sequence does not depend on the standard library's
// distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline constexpr int kSampleAttemptCap = 100000;

/// Draws a (prediction, ground truth) pair with iou >= alpha. The ground
/// truth is fixed to the unit square; the prediction's half-extents are
/// sampled log-uniformly and its center uniformly, then the draw is rejected
/// until the IoU condition holds. Half of the proposals span the full
/// [alpha/4, 4/alpha] extent range to stress extreme aspect ratios; the other
/// half stay close to the ground truth so that tight thresholds keep a
/// usable acceptance rate.
inline std::pair<Rect, Rect> sample_pair(IouThreshold alpha, std::mt19937_64& rng) {
  const double a = alpha.value();
  const Rect gt = Rect::from_corners(0.0, 0.0, 1.0, 1.0);
  if (a == 1.0) return {gt, gt};  // IoU = 1 forces equality

  const double wide_lo = std::log(a / 4.0);
  const double wide_hi = std::log(4.0 / a);
  const double near_span = std::clamp(0.7 * (1.0 / a - 1.0), 1e-4, wide_hi);
  const double shift_scale = std::min(1.0, std::max(0.8 * (1.0 / a - 1.0), 1e-4));

  for (int attempt = 0; attempt < kSampleAttemptCap; ++attempt) {
    const bool wide = detail::unit_uniform(rng) < 0.5;
    const double sx = wide
        ? wide_lo + detail::unit_uniform(rng) * (wide_hi - wide_lo)
        : -near_span + detail::unit_uniform(rng) * 2.0 * near_span;
    const double sy = wide
        ? wide_lo + detail::unit_uniform(rng) * (wide_hi - wide_lo)
        : -near_span + detail::unit_uniform(rng) * 2.0 * near_span;
    const double hw = 0.5 * std::exp(sx);
    const double hh = 0.5 * std::exp(sy);
    const double reach = wide ? 1.0 : shift_scale;
    const double cx =
        0.5 + (2.0 * detail::unit_uniform(rng) - 1.0) * (0.5 + hw) * reach;
    const double cy =
        0.5 + (2.0 * detail::unit_uniform(rng) - 1.0) * (0.5 + hh) * reach;
    const Rect pr(cx, cy, hw, hh);
    if (iou(pr, gt) >= a) return {pr, gt};
  }
  throw SampleError("sample_pair: attempt cap reached for alpha " +
                    std::to_string(a));
}

/// The configuration attaining the worst case exactly: the prediction shares
/// one side and the full extent of the ground truth on one axis, and covers
/// an alpha fraction of it on the other. Its IoU equals alpha and its minimal
/// cover factor equals worst_case_factor(alpha).
inline std::pair<Rect, Rect> worst_case_witness(
    IouThreshold alpha, WitnessAxis axis = WitnessAxis::width) {
  const double a = alpha.value();
  const Rect gt = Rect::from_corners(0.0, 0.0, 1.0, 1.0);
  if (axis == WitnessAxis::width) {
    return {Rect::from_corners(0.0, 0.0, a, 1.0), gt};
  }
  return {Rect::from_corners(0.0, 0.0, 1.0, a), gt};
}

/// Randomized check of the coverage bound: draws `samples` qualifying pairs,
/// measures each minimal cover factor, and counts violations of the bound.
/// Both axis witnesses are always evaluated as well, so max_observed_k
/// touches the bound in every report. Deterministic given the seed.
inline VerifyReport verify_theorem(IouThreshold alpha, std::uint64_t samples,
                                   std::uint64_t seed) {
  if (samples < 1) {
    throw std::invalid_argument("verify_theorem: samples must be >= 1");
  }
  VerifyReport report;
  report.alpha = alpha.value();
  report.samples = samples;
  report.seed = seed;
  report.bound = worst_case_factor(alpha);
  report.max_observed_k = 0.0;

  auto consider = [&report](const Rect& pr, const Rect& gt) {
    const double k = min_cover_factor(pr, gt);
    if (!report.worst_pair.has_value() || k > report.max_observed_k) {
      report.max_observed_k = k;
      report.worst_pair = std::make_pair(pr, gt);
    }
    if (k > report.bound + kGeomEps) ++report.violations;
  };

  consider(worst_case_witness(alpha, WitnessAxis::width).first,
           worst_case_witness(alpha, WitnessAxis::width).second);
  consider(worst_case_witness(alpha, WitnessAxis::height).first,
           worst_case_witness(alpha, WitnessAxis::height).second);

  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto [pr, gt] = sample_pair(alpha, rng);
    consider(pr, gt);
  }
  return report;
}

}  // namespace safebox
