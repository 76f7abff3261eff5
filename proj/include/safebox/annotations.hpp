#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safebox/geometry.hpp"

namespace safebox {

// Annotation files are plain text, one box per line, normalized to [0, 1]:
//   ground truth: <class> <cx> <cy> <w> <h>
//   prediction:   <class> <cx> <cy> <w> <h> <confidence>
// Fields are whitespace-separated; lines starting with '#' are comments.

enum class AnnotationKind { ground_truth, prediction };

/// One labeled or predicted box in an image. Confidence is present for
/// predictions only. Parsed boxes fit the unit image square up to rounding;
/// enlarged boxes produced downstream are exempt from that bound.
struct Detection {
  int class_id = 0;
  Rect box;
  std::optional<double> confidence;

  bool operator==(const Detection& other) const = default;
};

/// A Detection after enlargement, with a flag telling whether clipping to
/// the image square changed the box (such boxes may no longer cover their
/// object at the border).
struct SppDetection {
  Detection detection;
  bool clipped = false;

  bool operator==(const SppDetection& other) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& file, std::size_t line,
             const std::string& message)
      : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " +
                           message),
        file_(file),
        line_(line) {}

  const std::filesystem::path& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
};

using DetectionMap = std::map<std::string, std::vector<Detection>>;

namespace detail {

// Parsed boxes must fit the image: centers in [0,1], half-extents at most
// 1/2 plus a rounding allowance.
inline constexpr double kHalfExtentSlack = 1e-6;

inline double parse_real(std::string_view token, const std::filesystem::path& file,
                         std::size_t line, const char* what) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(file, line,
                     std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

inline int parse_class_id(std::string_view token, const std::filesystem::path& file,
                          std::size_t line) {
  int value = 0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw ParseError(file, line,
                     "invalid class id '" + std::string(token) + "'");
  }
  return value;
}

inline Detection parse_detection_line(const std::vector<std::string>& fields,
                                      AnnotationKind kind,
                                      const std::filesystem::path& file,
                                      std::size_t line) {
  const std::size_t expected = kind == AnnotationKind::prediction ? 6 : 5;
  if (fields.size() != expected) {
    throw ParseError(file, line,
                     "expected " + std::to_string(expected) + " fields, found " +
                         std::to_string(fields.size()));
  }
  const int class_id = parse_class_id(fields[0], file, line);
  const double cx = parse_real(fields[1], file, line, "center x");
  const double cy = parse_real(fields[2], file, line, "center y");
  const double w = parse_real(fields[3], file, line, "width");
  const double h = parse_real(fields[4], file, line, "height");
  if (!(cx >= 0.0) || !(cx <= 1.0) || !(cy >= 0.0) || !(cy <= 1.0)) {
    throw ParseError(file, line, "box center outside [0,1]");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw ParseError(file, line, "box extents must be positive");
  }
  if (0.5 * w > 0.5 + kHalfExtentSlack || 0.5 * h > 0.5 + kHalfExtentSlack) {
    throw ParseError(file, line, "box extents exceed the image");
  }
  std::optional<double> confidence;
  if (kind == AnnotationKind::prediction) {
    const double conf = parse_real(fields[5], file, line, "confidence");
    if (!(conf >= 0.0) || !(conf <= 1.0)) {
      throw ParseError(file, line, "confidence outside [0,1]");
    }
    confidence = conf;
  }
  return Detection{class_id, Rect(cx, cy, 0.5 * w, 0.5 * h), confidence};
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) fields.push_back(token);
  return fields;
}

}  // namespace detail

/// Parses one annotation file. Comment and blank lines are skipped; every
/// other line must be a complete record. Malformed content raises ParseError
/// naming the file and line. Predictions below `min_confidence` are dropped.
inline std::vector<Detection> parse_annotation_file(
    const std::filesystem::path& path, AnnotationKind kind,
    std::optional<double> min_confidence = std::nullopt) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open annotation file: " + path.string());
  }
  std::vector<Detection> detections;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const Detection det =
        detail::parse_detection_line(detail::split_fields(line), kind, path, line_number);
    if (min_confidence && det.confidence && *det.confidence < *min_confidence) {
      continue;
    }
    detections.push_back(det);
  }
  return detections;
}

/// Parses every .txt file under `root` (recursively). The image id is the
/// file's path relative to root without the extension, so nested trees keep
/// distinct ids; for a flat directory this is just the file stem. Empty
/// files yield empty lists.
inline DetectionMap parse_annotations(
    const std::filesystem::path& root, AnnotationKind kind,
    std::optional<double> min_confidence = std::nullopt) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw std::runtime_error("annotation directory not found: " + root.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  DetectionMap result;
  for (const auto& file : files) {
    fs::path id_path = fs::relative(file, root);
    id_path.replace_extension();
    result[id_path.generic_string()] =
        parse_annotation_file(file, kind, min_confidence);
  }
  return result;
}

namespace detail {

// Shortest decimal that round-trips the double exactly.
inline std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace detail

/// Writes one annotation file in the line format above. The clipped flag is
/// emitted as a trailing 0/1 column only when `with_clip_column` is set.
inline void write_annotation_file(const std::filesystem::path& path,
                                  const std::vector<SppDetection>& detections,
                                  bool with_clip_column = false) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write annotation file: " + path.string());
  }
  for (const auto& [det, clipped] : detections) {
    // Doubling the stored half-extent is exact, so a written file parses
    // back to bit-identical rectangles.
    out << det.class_id << ' ' << detail::format_real(det.box.center_x()) << ' '
        << detail::format_real(det.box.center_y()) << ' '
        << detail::format_real(2.0 * det.box.half_width()) << ' '
        << detail::format_real(2.0 * det.box.half_height());
    if (det.confidence) out << ' ' << detail::format_real(*det.confidence);
    if (with_clip_column) out << ' ' << (clipped ? 1 : 0);
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing annotation file: " + path.string());
  }
}

inline void write_annotation_file(const std::filesystem::path& path,
                                  const std::vector<Detection>& detections) {
  std::vector<SppDetection> wrapped;
  wrapped.reserve(detections.size());
  for (const auto& det : detections) wrapped.push_back({det, false});
  write_annotation_file(path, wrapped);
}

/// Ground truth and predictions over one image set, plus the ids present in
/// only one of the two trees (those contribute no pairs and are surfaced as
/// warnings).
struct Dataset {
  DetectionMap ground_truth;
  DetectionMap predictions;
  std::vector<std::string> gt_only;
  std::vector<std::string> pred_only;
};

inline Dataset make_dataset(DetectionMap ground_truth, DetectionMap predictions) {
  Dataset dataset{std::move(ground_truth), std::move(predictions), {}, {}};
  for (const auto& [id, boxes] : dataset.ground_truth) {
    (void)boxes;
    if (!dataset.predictions.count(id)) dataset.gt_only.push_back(id);
  }
  for (const auto& [id, boxes] : dataset.predictions) {
    (void)boxes;
    if (!dataset.ground_truth.count(id)) dataset.pred_only.push_back(id);
  }
  return dataset;
}

inline Dataset load_dataset(const std::filesystem::path& gt_root,
                            const std::filesystem::path& pred_root,
                            std::optional<double> min_confidence = std::nullopt) {
  return make_dataset(
      parse_annotations(gt_root, AnnotationKind::ground_truth),
      parse_annotations(pred_root, AnnotationKind::prediction, min_confidence));
}

}  // namespace safebox
