#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "safebox/geometry.hpp"

namespace safebox {

/// An IoU guarantee: the detector's overlap with ground truth never falls
/// below this value. Valid range is (0, 1].
class IouThreshold {
 public:
  explicit IouThreshold(double alpha) : alpha_(alpha) {
    if (!std::isfinite(alpha_) || !(alpha_ > 0.0) || !(alpha_ <= 1.0)) {
      throw std::invalid_argument("IouThreshold: alpha must be in (0, 1]");
    }
  }

  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Motion-planner buffer assumptions: the fixed physical margin the planner
/// adds on each side of an obstacle, and the largest projected width any
/// object of the detected class can present. Both in meters.
class BufferSpec {
 public:
  BufferSpec(double buffer_x_m, double max_width_m)
      : buffer_x_(buffer_x_m), max_width_(max_width_m) {
    if (!std::isfinite(buffer_x_) || buffer_x_ < 0.0) {
      throw std::invalid_argument("BufferSpec: buffer must be finite and >= 0");
    }
    if (!std::isfinite(max_width_) || !(max_width_ > 0.0)) {
      throw std::invalid_argument("BufferSpec: max width must be finite and > 0");
    }
  }

  double buffer_x() const { return buffer_x_; }
  double max_width() const { return max_width_; }

 private:
  double buffer_x_;
  double max_width_;
};

/// Worst-case enlargement factor (2 - alpha) / alpha: expanding a prediction
/// by this factor covers the ground truth whenever their IoU is at least
/// alpha. Strictly decreasing in alpha; equals 1 at alpha = 1.
inline double worst_case_factor(IouThreshold alpha) {
  return (2.0 - alpha.value()) / alpha.value();
}

/// Inverse of worst_case_factor: the minimum IoU guarantee under which an
/// expansion by k is sufficient, 2 / (1 + k).
inline double safe_iou_for_factor(double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw std::invalid_argument("safe_iou_for_factor: k must be finite and >= 1");
  }
  return 2.0 / (1.0 + k);
}

/// Largest projected width of a box-shaped object of the given footprint:
/// the diagonal, reached when the diagonal faces the observer head-on.
inline double max_observed_width(double length_m, double width_m) {
  if (!std::isfinite(length_m) || !(length_m > 0.0)) {
    throw std::invalid_argument("max_observed_width: length must be > 0");
  }
  if (!std::isfinite(width_m) || width_m < 0.0) {
    throw std::invalid_argument("max_observed_width: width must be >= 0");
  }
  return std::hypot(length_m, width_m);
}

/// Enlargement factor still required from the post-processor once the
/// planner's physical buffer is credited: max(k_target - 2 X / W_max, 1).
/// The floor at 1 reflects that the post-processor never shrinks a box.
inline double residual_factor(double k_target, const BufferSpec& spec) {
  if (!(k_target >= 1.0) || !std::isfinite(k_target)) {
    throw std::invalid_argument("residual_factor: k_target must be finite and >= 1");
  }
  return std::max(k_target - 2.0 * spec.buffer_x() / spec.max_width(), 1.0);
}

/// True iff the combined effect of the physical buffer and the residual
/// enlargement meets the target factor: 2 X / W + k_res >= k_target.
inline bool combined_check(double buffer_x_m, double object_width_m,
                           double k_res, double k_target) {
  if (!std::isfinite(object_width_m) || !(object_width_m > 0.0)) {
    throw std::invalid_argument("combined_check: object width must be > 0");
  }
  return 2.0 * buffer_x_m / object_width_m + k_res >= k_target - kGeomEps;
}

/// Smallest physical buffer at which residual_factor clamps to 1, i.e. the
/// point where the planner alone meets the target: W_max (k_target - 1) / 2.
inline double buffer_threshold(double k_target, double max_width_m) {
  if (!(k_target >= 1.0) || !std::isfinite(k_target)) {
    throw std::invalid_argument("buffer_threshold: k_target must be finite and >= 1");
  }
  if (!std::isfinite(max_width_m) || !(max_width_m > 0.0)) {
    throw std::invalid_argument("buffer_threshold: max width must be > 0");
  }
  return max_width_m * (k_target - 1.0) / 2.0;
}

struct BufferCurvePoint {
  double alpha = 0.0;
  double buffer_x_m = 0.0;
  double k_res = 1.0;
};

/// Samples residual_factor on a buffer grid for each threshold: steps + 1
/// evenly spaced buffers from 0 to x_max_m inclusive. For a fixed alpha the
/// curve is non-increasing in the buffer and clamps to 1 once the buffer
/// passes buffer_threshold.
inline std::vector<BufferCurvePoint> buffer_curve(
    const std::vector<IouThreshold>& alphas, double max_width_m,
    double x_max_m, int steps) {
  if (!std::isfinite(x_max_m) || x_max_m < 0.0) {
    throw std::invalid_argument("buffer_curve: x_max must be finite and >= 0");
  }
  if (steps < 1) {
    throw std::invalid_argument("buffer_curve: steps must be >= 1");
  }
  std::vector<BufferCurvePoint> points;
  points.reserve(alphas.size() * static_cast<std::size_t>(steps + 1));
  for (const IouThreshold alpha : alphas) {
    const double k_target = worst_case_factor(alpha);
    for (int i = 0; i <= steps; ++i) {
      const double buffer =
          x_max_m * (static_cast<double>(i) / static_cast<double>(steps));
      points.push_back({alpha.value(), buffer,
                        residual_factor(k_target, BufferSpec(buffer, max_width_m))});
    }
  }
  return points;
}

}  // namespace safebox
