#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "safebox/annotations.hpp"
#include "safebox/geometry.hpp"
#include "safebox/theory.hpp"

namespace safebox {

/// A prediction associated one-to-one with a ground-truth box of the same
/// class, carrying their overlap and the minimal factor by which the
/// prediction must grow to cover the ground truth.
struct MatchedPair {
  std::string image_id;
  int class_id = 0;
  std::size_t pred_index = 0;
  std::size_t gt_index = 0;
  Rect pred;
  Rect gt;
  double iou = 0.0;
  double k_measured = 1.0;
};

struct MatchOptions {
  // Drop pairs whose prediction already fully covers its ground truth
  // (their measured factor is 1, so they dilute means without affecting
  // the maximum).
  bool partial_only = false;
};

/// Greedy one-to-one matching within a single image: all same-class pairs
/// with iou >= alpha are ranked by descending IoU (ties broken by lower
/// prediction index, then lower ground-truth index) and accepted when
/// neither member is taken yet. Deterministic for identical inputs.
inline std::vector<MatchedPair> match(const std::vector<Detection>& preds,
                                      const std::vector<Detection>& gts,
                                      IouThreshold alpha,
                                      const std::string& image_id = "",
                                      const MatchOptions& options = {}) {
  struct Candidate {
    std::size_t pred_index;
    std::size_t gt_index;
    double overlap;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (preds[i].class_id != gts[j].class_id) continue;
      const double overlap = iou(preds[i].box, gts[j].box);
      if (overlap >= alpha.value()) candidates.push_back({i, j, overlap});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.overlap != b.overlap) return a.overlap > b.overlap;
              if (a.pred_index != b.pred_index) return a.pred_index < b.pred_index;
              return a.gt_index < b.gt_index;
            });

  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<MatchedPair> pairs;
  for (const auto& c : candidates) {
    if (pred_used[c.pred_index] || gt_used[c.gt_index]) continue;
    pred_used[c.pred_index] = true;
    gt_used[c.gt_index] = true;
    const Rect& pred = preds[c.pred_index].box;
    const Rect& gt = gts[c.gt_index].box;
    if (options.partial_only && contains(pred, gt)) continue;
    pairs.push_back({image_id, preds[c.pred_index].class_id, c.pred_index,
                     c.gt_index, pred, gt, c.overlap, min_cover_factor(pred, gt)});
  }
  return pairs;
}

/// Matches every image that appears in both trees. Images present in only
/// one tree contribute no pairs (see Dataset::gt_only / pred_only).
inline std::vector<MatchedPair> match_all(const Dataset& dataset,
                                          IouThreshold alpha,
                                          const MatchOptions& options = {}) {
  std::vector<MatchedPair> pairs;
  for (const auto& [image_id, gts] : dataset.ground_truth) {
    const auto preds = dataset.predictions.find(image_id);
    if (preds == dataset.predictions.end()) continue;
    auto image_pairs = match(preds->second, gts, alpha, image_id, options);
    pairs.insert(pairs.end(), image_pairs.begin(), image_pairs.end());
  }
  return pairs;
}

/// The measured cover factors of the pairs, in pair order.
inline std::vector<double> measure(const std::vector<MatchedPair>& pairs) {
  std::vector<double> ks;
  ks.reserve(pairs.size());
  for (const auto& pair : pairs) ks.push_back(pair.k_measured);
  return ks;
}

/// Aggregate of measured cover factors at one threshold. sigma_data is the
/// population standard deviation (divide by n, not n - 1).
struct EnlargementStats {
  double alpha = 0.0;
  std::size_t count = 0;
  double k_max_data = 1.0;
  double k_mu_data = 1.0;
  double sigma_data = 0.0;
  double mu_plus_3sigma = 1.0;
  double mu_plus_6sigma = 1.0;

  // By Chebyshev's inequality a sample exceeds the mean by more than six
  // standard deviations with probability at most 1/36, about 2.78%.
  static constexpr double chebyshev_tail_6sigma = 1.0 / 36.0;

  bool operator==(const EnlargementStats& other) const = default;
};

inline EnlargementStats aggregate(const std::vector<double>& ks,
                                  IouThreshold alpha) {
  if (ks.empty()) {
    throw std::invalid_argument("aggregate: no measured factors");
  }
  EnlargementStats stats;
  stats.alpha = alpha.value();
  stats.count = ks.size();
  double sum = 0.0;
  double k_max = ks.front();
  for (const double k : ks) {
    sum += k;
    k_max = std::max(k_max, k);
  }
  const double n = static_cast<double>(ks.size());
  const double mean = sum / n;
  double sq_sum = 0.0;
  for (const double k : ks) sq_sum += (k - mean) * (k - mean);
  stats.k_max_data = k_max;
  stats.k_mu_data = mean;
  stats.sigma_data = std::sqrt(sq_sum / n);
  stats.mu_plus_3sigma = mean + 3.0 * stats.sigma_data;
  stats.mu_plus_6sigma = mean + 6.0 * stats.sigma_data;
  return stats;
}

/// One row of a threshold sweep. stats is absent when no pair met the
/// threshold, which flags the row as carrying no data.
struct SweepRow {
  double alpha = 0.0;
  double bound = 1.0;  // worst_case_factor(alpha)
  std::optional<EnlargementStats> stats;

  std::size_t count() const { return stats ? stats->count : 0; }
};

/// Re-matches the dataset at each threshold and aggregates the measured
/// factors, pairing every row with the derived worst-case bound.
inline std::vector<SweepRow> sweep(const Dataset& dataset,
                                   const std::vector<IouThreshold>& alphas,
                                   const MatchOptions& options = {}) {
  std::vector<SweepRow> rows;
  rows.reserve(alphas.size());
  for (const IouThreshold alpha : alphas) {
    SweepRow row;
    row.alpha = alpha.value();
    row.bound = worst_case_factor(alpha);
    const std::vector<double> ks = measure(match_all(dataset, alpha, options));
    if (!ks.empty()) row.stats = aggregate(ks, alpha);
    rows.push_back(row);
  }
  return rows;
}

struct HistogramBin {
  double lower_edge = 1.0;
  std::size_t count = 0;

  bool operator==(const HistogramBin& other) const = default;
};

/// Fixed-width histogram of cover factors. Bins start at 1.0 (the smallest
/// possible factor); a value v lands in bin floor((v - 1) / bin_width).
/// Bins are contiguous, so interior zero counts are kept and counts sum to
/// the input size.
inline std::vector<HistogramBin> histogram(const std::vector<double>& ks,
                                           double bin_width) {
  if (ks.empty()) {
    throw std::invalid_argument("histogram: no values");
  }
  if (!std::isfinite(bin_width) || !(bin_width > 0.0)) {
    throw std::invalid_argument("histogram: bin width must be > 0");
  }
  std::vector<std::size_t> counts;
  for (const double k : ks) {
    if (!(k >= 1.0)) {
      throw std::invalid_argument("histogram: cover factors are at least 1");
    }
    const auto bin = static_cast<std::size_t>(std::floor((k - 1.0) / bin_width));
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
  }
  std::vector<HistogramBin> bins;
  bins.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    bins.push_back({1.0 + static_cast<double>(i) * bin_width, counts[i]});
  }
  return bins;
}

using SppDetectionMap = std::map<std::string, std::vector<SppDetection>>;

/// Enlarges every box by the factor k. With clip on, boxes that would poke
/// out of the unit image square are cut back to it and flagged; such boxes
/// may no longer cover their object at the border. Class and confidence
/// pass through untouched.
inline SppDetectionMap apply_spp(const DetectionMap& detections, double k,
                                 bool clip) {
  const Rect image = Rect::from_corners(0.0, 0.0, 1.0, 1.0);
  SppDetectionMap result;
  for (const auto& [image_id, boxes] : detections) {
    std::vector<SppDetection> out;
    out.reserve(boxes.size());
    for (const Detection& det : boxes) {
      Rect grown = expand(det.box, k);
      // Flag from the edges rather than by comparing against a re-derived
      // rectangle, so boxes that stay inside are never falsely flagged.
      const bool outside = grown.left() < 0.0 || grown.right() > 1.0 ||
                           grown.bottom() < 0.0 || grown.top() > 1.0;
      bool clipped = false;
      if (clip && outside) {
        const std::optional<Rect> cut = intersect(grown, image);
        if (!cut) {
          throw std::invalid_argument(
              "apply_spp: box lies entirely outside the image");
        }
        grown = *cut;
        clipped = true;
      }
      out.push_back({Detection{det.class_id, grown, det.confidence}, clipped});
    }
    result[image_id] = std::move(out);
  }
  return result;
}

}  // namespace safebox
