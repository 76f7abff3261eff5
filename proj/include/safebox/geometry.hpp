#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace safebox {

// Absolute tolerance for geometric comparisons. Every quantity in this
// library is an O(1)-scaled ratio, so a fixed absolute epsilon is adequate.
inline constexpr double kGeomEps = 1e-9;

/// Axis-aligned rectangle stored as center plus positive half-extents.
/// Degenerate (zero-area) and non-finite rectangles are rejected at
/// construction, so every Rect in flight has a positive area.
class Rect {
 public:
  Rect(double center_x, double center_y, double half_width, double half_height)
      : cx_(center_x), cy_(center_y), hw_(half_width), hh_(half_height) {
    if (!std::isfinite(cx_) || !std::isfinite(cy_) || !std::isfinite(hw_) ||
        !std::isfinite(hh_)) {
      throw std::invalid_argument("Rect: fields must be finite");
    }
    if (!(hw_ > 0.0) || !(hh_ > 0.0)) {
      throw std::invalid_argument("Rect: half-extents must be positive");
    }
  }

  /// Builds a Rect from two opposite corners, in any order.
  static Rect from_corners(double x0, double y0, double x1, double y1) {
    const double lo_x = std::min(x0, x1);
    const double hi_x = std::max(x0, x1);
    const double lo_y = std::min(y0, y1);
    const double hi_y = std::max(y0, y1);
    return Rect(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y),
                0.5 * (hi_x - lo_x), 0.5 * (hi_y - lo_y));
  }

  double center_x() const { return cx_; }
  double center_y() const { return cy_; }
  double half_width() const { return hw_; }
  double half_height() const { return hh_; }

  double left() const { return cx_ - hw_; }
  double right() const { return cx_ + hw_; }
  double bottom() const { return cy_ - hh_; }
  double top() const { return cy_ + hh_; }

  // Width, height, and area are derived from the edges rather than from the
  // stored half-extents so that two identical rectangles always produce
  // identical intersection and union areas.
  double width() const { return right() - left(); }
  double height() const { return top() - bottom(); }
  double area() const { return width() * height(); }

  bool operator==(const Rect& other) const = default;

 private:
  double cx_, cy_, hw_, hh_;
};

/// Overlap area of two rectangles. Touching edges count as zero overlap.
inline double intersection_area(const Rect& a, const Rect& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom());
  if (ih <= 0.0) return 0.0;
  return iw * ih;
}

/// Intersection-over-Union of two rectangles, in [0, 1].
inline double iou(const Rect& a, const Rect& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

/// Scales the half-extents of `r` by `k` about its fixed center.
/// Factors below 1 are rejected: this operation only ever grows a box.
inline Rect expand(const Rect& r, double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw std::invalid_argument("expand: factor must be finite and >= 1");
  }
  return Rect(r.center_x(), r.center_y(), k * r.half_width(), k * r.half_height());
}

/// Closed containment: true iff every point of `inner` lies in `outer`,
/// where boundary touching counts as contained. Equivalent to all four
/// signed side distances being non-negative (up to `tol`).
inline bool contains(const Rect& outer, const Rect& inner, double tol = kGeomEps) {
  return inner.left() >= outer.left() - tol &&
         inner.right() <= outer.right() + tol &&
         inner.bottom() >= outer.bottom() - tol &&
         inner.top() <= outer.top() + tol;
}

/// Smallest factor k >= 1 such that expand(pr, k) covers gt. Closed form
/// over the four side distances from pr's center to gt's edges; well defined
/// for any pair because the expansion keeps the center fixed.
inline double min_cover_factor(const Rect& pr, const Rect& gt) {
  const double cx = pr.center_x();
  const double cy = pr.center_y();
  const double w = pr.half_width();
  const double h = pr.half_height();
  const double kx = std::max((cx - gt.left()) / w, (gt.right() - cx) / w);
  const double ky = std::max((cy - gt.bottom()) / h, (gt.top() - cy) / h);
  return std::max({1.0, kx, ky});
}

/// Overlapping region of two rectangles, or nullopt when the overlap has no
/// positive area (disjoint or merely touching).
inline std::optional<Rect> intersect(const Rect& a, const Rect& b) {
  const double lo_x = std::max(a.left(), b.left());
  const double hi_x = std::min(a.right(), b.right());
  const double lo_y = std::max(a.bottom(), b.bottom());
  const double hi_y = std::min(a.top(), b.top());
  if (hi_x - lo_x <= 0.0 || hi_y - lo_y <= 0.0) return std::nullopt;
  return Rect::from_corners(lo_x, lo_y, hi_x, hi_y);
}

}  // namespace safebox
