#pragma once

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "safebox/pipeline.hpp"
#include "safebox/theory.hpp"
#include "safebox/verifier.hpp"

namespace safebox {

// CSV output convention: table values at 3 decimal places, counts as plain
// integers. Full double precision is reserved for the JSON output paths.

inline std::string format_fixed(double value, int decimals = 3) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

inline std::string format_full(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

inline constexpr const char* kSweepCsvHeader =
    "alpha,k_math,count,k_max_data,k_mu_data,sigma_data,mu_plus_3sigma,"
    "mu_plus_6sigma";

/// Threshold sweep as CSV. Rows with no matched pairs keep the column count
/// but leave the statistics cells empty (count 0 marks them).
inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& row : rows) {
    out << format_fixed(row.alpha) << ',' << format_fixed(row.bound) << ','
        << row.count();
    if (row.stats) {
      out << ',' << format_fixed(row.stats->k_max_data) << ','
          << format_fixed(row.stats->k_mu_data) << ','
          << format_fixed(row.stats->sigma_data) << ','
          << format_fixed(row.stats->mu_plus_3sigma) << ','
          << format_fixed(row.stats->mu_plus_6sigma);
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
  return out.str();
}

/// Histogram as CSV. Bin edges use general formatting (up to 6 significant
/// digits) so common widths print exactly.
inline std::string histogram_to_csv(const std::vector<HistogramBin>& bins) {
  std::ostringstream out;
  out << "bin_lower,count\n";
  for (const HistogramBin& bin : bins) {
    char edge[32];
    std::snprintf(edge, sizeof(edge), "%.6g", bin.lower_edge);
    out << edge << ',' << bin.count << '\n';
  }
  return out.str();
}

/// Verification report as a one-row CSV of the scalar fields. The worst
/// pair's rectangles are part of the JSON output only.
inline std::string verify_report_to_csv(const VerifyReport& report) {
  std::ostringstream out;
  out << "alpha,samples,seed,bound,max_observed_k,violations\n";
  out << format_fixed(report.alpha) << ',' << report.samples << ','
      << report.seed << ',' << format_fixed(report.bound) << ','
      << format_fixed(report.max_observed_k) << ',' << report.violations
      << '\n';
  return out.str();
}

inline std::string buffer_curve_to_csv(const std::vector<BufferCurvePoint>& points) {
  std::ostringstream out;
  out << "alpha,buffer_m,k_res\n";
  for (const BufferCurvePoint& point : points) {
    out << format_fixed(point.alpha) << ',' << format_fixed(point.buffer_x_m)
        << ',' << format_fixed(point.k_res) << '\n';
  }
  return out.str();
}

namespace detail {

inline double parse_list_real(const std::string& token, const char* what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("invalid ") + what + " '" + token + "'");
  }
  if (used != token.size()) {
    throw std::invalid_argument(std::string("invalid ") + what + " '" + token + "'");
  }
  return value;
}

}  // namespace detail

/// Parses a threshold list. Two forms: comma-separated values "0.1,0.5,0.9"
/// and an inclusive range "start:stop:step" (the stop endpoint is included
/// when it is within 1e-9 of a grid point). Every value must lie in (0, 1].
inline std::vector<IouThreshold> parse_alpha_list(const std::string& text) {
  std::vector<IouThreshold> alphas;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream stream(text);
    while (std::getline(stream, token, ':')) parts.push_back(token);
    if (parts.size() != 3) {
      throw std::invalid_argument("alpha range must be start:stop:step");
    }
    const double start = detail::parse_list_real(parts[0], "alpha range start");
    const double stop = detail::parse_list_real(parts[1], "alpha range stop");
    const double step = detail::parse_list_real(parts[2], "alpha range step");
    if (!(step > 0.0)) {
      throw std::invalid_argument("alpha range step must be > 0");
    }
    if (stop < start - kGeomEps) {
      throw std::invalid_argument("alpha range stop must be >= start");
    }
    for (int i = 0;; ++i) {
      const double value = start + static_cast<double>(i) * step;
      if (value > stop + kGeomEps) break;
      alphas.emplace_back(std::min(value, stop));
      if (alphas.size() > 100000) {
        throw std::invalid_argument("alpha range produces too many values");
      }
    }
  } else {
    std::string token;
    std::istringstream stream(text);
    while (std::getline(stream, token, ',')) {
      if (token.empty()) {
        throw std::invalid_argument("empty entry in alpha list");
      }
      alphas.emplace_back(detail::parse_list_real(token, "alpha"));
    }
  }
  if (alphas.empty()) {
    throw std::invalid_argument("alpha list is empty");
  }
  return alphas;
}

}  // namespace safebox
