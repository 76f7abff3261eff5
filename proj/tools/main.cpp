// Command-line front end for the safebox library: closed-form enlargement
// factors, randomized bound verification, dataset measurement, and the
// enlargement post-processing step itself. Outputs CSV (3 decimal places)
// or JSON (full precision); see --help of each subcommand.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "safebox/annotations.hpp"
#include "safebox/csv.hpp"
#include "safebox/geometry.hpp"
#include "safebox/pipeline.hpp"
#include "safebox/theory.hpp"
#include "safebox/verifier.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct OutputOptions {
  std::string format = "csv";
  std::string output_path;  // empty = standard output
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output", out.output_path,
                  "Write to this file instead of standard output");
}

void emit(const OutputOptions& out, const std::string& text) {
  if (out.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out.output_path);
  if (!file) {
    throw std::runtime_error("cannot open output file: " + out.output_path);
  }
  file << text;
  if (!file) {
    throw std::runtime_error("failed writing output file: " + out.output_path);
  }
}

ordered_json rect_to_json(const safebox::Rect& r) {
  return ordered_json{{"center_x", r.center_x()},
                      {"center_y", r.center_y()},
                      {"half_width", r.half_width()},
                      {"half_height", r.half_height()}};
}

ordered_json stats_to_json(const safebox::EnlargementStats& stats) {
  return ordered_json{{"count", stats.count},
                      {"k_max_data", stats.k_max_data},
                      {"k_mu_data", stats.k_mu_data},
                      {"sigma_data", stats.sigma_data},
                      {"mu_plus_3sigma", stats.mu_plus_3sigma},
                      {"mu_plus_6sigma", stats.mu_plus_6sigma},
                      {"chebyshev_tail_6sigma",
                       safebox::EnlargementStats::chebyshev_tail_6sigma}};
}

std::string sweep_to_json(const std::vector<safebox::SweepRow>& rows) {
  ordered_json doc = ordered_json::array();
  for (const safebox::SweepRow& row : rows) {
    ordered_json entry{{"alpha", row.alpha}, {"k_math", row.bound},
                       {"count", row.count()}};
    entry["stats"] = row.stats ? stats_to_json(*row.stats) : ordered_json(nullptr);
    doc.push_back(entry);
  }
  return doc.dump(2) + "\n";
}

std::string report_to_json(const safebox::VerifyReport& report) {
  ordered_json doc{{"alpha", report.alpha},
                   {"samples", report.samples},
                   {"seed", report.seed},
                   {"bound", report.bound},
                   {"max_observed_k", report.max_observed_k},
                   {"violations", report.violations}};
  if (report.worst_pair) {
    doc["worst_pair"] = ordered_json{
        {"prediction", rect_to_json(report.worst_pair->first)},
        {"ground_truth", rect_to_json(report.worst_pair->second)}};
  } else {
    doc["worst_pair"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

void warn_unpaired(const safebox::Dataset& dataset) {
  for (const std::string& id : dataset.gt_only) {
    std::cerr << "warning: image only in ground-truth tree: " << id << '\n';
  }
  for (const std::string& id : dataset.pred_only) {
    std::cerr << "warning: image only in prediction tree: " << id << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Safety post-processing for 2D object detections: worst-case "
      "enlargement factors from an IoU guarantee, randomized verification "
      "of the bound, planner-buffer budgeting, and dataset measurement."};
  app.require_subcommand(1);
  int exit_code = 0;

  // kmath
  double kmath_alpha = 0.0;
  OutputOptions kmath_out;
  CLI::App* kmath = app.add_subcommand(
      "kmath", "Worst-case enlargement factor for an IoU guarantee");
  kmath->add_option("--alpha", kmath_alpha, "IoU guarantee in (0,1]")->required();
  add_output_flags(kmath, kmath_out);
  kmath->callback([&] {
    const safebox::IouThreshold alpha(kmath_alpha);
    const double k = safebox::worst_case_factor(alpha);
    if (kmath_out.format == "json") {
      emit(kmath_out,
           ordered_json{{"alpha", alpha.value()}, {"k_math", k}}.dump(2) + "\n");
    } else {
      emit(kmath_out, safebox::format_fixed(k) + "\n");
    }
  });

  // iou-for-k
  double iouk_k = 0.0;
  OutputOptions iouk_out;
  CLI::App* iouk = app.add_subcommand(
      "iou-for-k", "Minimum IoU guarantee under which a factor k suffices");
  iouk->add_option("--k", iouk_k, "Enlargement factor >= 1")->required();
  add_output_flags(iouk, iouk_out);
  iouk->callback([&] {
    const double value = safebox::safe_iou_for_factor(iouk_k);
    if (iouk_out.format == "json") {
      emit(iouk_out,
           ordered_json{{"k", iouk_k}, {"safe_iou", value}}.dump(2) + "\n");
    } else {
      emit(iouk_out, safebox::format_fixed(value) + "\n");
    }
  });

  // residual
  double res_alpha = 0.0;
  double res_buffer = 0.0;
  double res_length = 0.0;
  double res_width = 0.0;
  OutputOptions res_out;
  CLI::App* residual = app.add_subcommand(
      "residual",
      "Residual enlargement factor once the planner buffer is credited");
  residual->add_option("--alpha", res_alpha, "IoU guarantee in (0,1]")->required();
  residual->add_option("--buffer-m", res_buffer, "Planner buffer in meters")
      ->required();
  residual->add_option("--length-m", res_length, "Object length in meters")
      ->required();
  residual->add_option("--width-m", res_width, "Object width in meters")
      ->required();
  add_output_flags(residual, res_out);
  residual->callback([&] {
    const safebox::IouThreshold alpha(res_alpha);
    const double w_max = safebox::max_observed_width(res_length, res_width);
    const double k_target = safebox::worst_case_factor(alpha);
    const double k_res = safebox::residual_factor(
        k_target, safebox::BufferSpec(res_buffer, w_max));
    if (res_out.format == "json") {
      emit(res_out, ordered_json{{"alpha", alpha.value()},
                                 {"buffer_m", res_buffer},
                                 {"length_m", res_length},
                                 {"width_m", res_width},
                                 {"w_max_m", w_max},
                                 {"k_math", k_target},
                                 {"k_res", k_res}}
                            .dump(2) +
                        "\n");
    } else {
      emit(res_out, "alpha,buffer_m,w_max_m,k_math,k_res\n" +
                        safebox::format_fixed(alpha.value()) + ',' +
                        safebox::format_fixed(res_buffer) + ',' +
                        safebox::format_fixed(w_max) + ',' +
                        safebox::format_fixed(k_target) + ',' +
                        safebox::format_fixed(k_res) + '\n');
    }
  });

  // buffer-curve
  std::string curve_alphas = "0.1:0.9:0.1";
  double curve_length = 0.0;
  double curve_width = 0.0;
  double curve_x_max = 0.0;
  int curve_steps = 100;
  OutputOptions curve_out;
  CLI::App* curve = app.add_subcommand(
      "buffer-curve", "Residual factor as a function of the planner buffer");
  curve->add_option("--alphas", curve_alphas,
                    "IoU guarantees: comma list or start:stop:step")
      ->capture_default_str();
  curve->add_option("--length-m", curve_length, "Object length in meters")
      ->required();
  curve->add_option("--width-m", curve_width, "Object width in meters")
      ->required();
  curve->add_option("--x-max", curve_x_max, "Largest buffer to sample, meters")
      ->required();
  curve->add_option("--steps", curve_steps, "Number of grid intervals")
      ->capture_default_str();
  add_output_flags(curve, curve_out);
  curve->callback([&] {
    const std::vector<safebox::IouThreshold> alphas =
        safebox::parse_alpha_list(curve_alphas);
    const double w_max = safebox::max_observed_width(curve_length, curve_width);
    const std::vector<safebox::BufferCurvePoint> points =
        safebox::buffer_curve(alphas, w_max, curve_x_max, curve_steps);
    if (curve_out.format == "json") {
      ordered_json doc = ordered_json::array();
      for (const safebox::BufferCurvePoint& point : points) {
        doc.push_back(ordered_json{{"alpha", point.alpha},
                                   {"buffer_m", point.buffer_x_m},
                                   {"k_res", point.k_res}});
      }
      emit(curve_out, doc.dump(2) + "\n");
    } else {
      emit(curve_out, safebox::buffer_curve_to_csv(points));
    }
  });

  // verify
  double verify_alpha = 0.0;
  std::uint64_t verify_samples = 100000;
  std::uint64_t verify_seed = 42;
  OutputOptions verify_out;
  CLI::App* verify = app.add_subcommand(
      "verify",
      "Randomized search for violations of the worst-case enlargement bound");
  verify->add_option("--alpha", verify_alpha, "IoU guarantee in (0,1]")
      ->required();
  verify->add_option("--samples", verify_samples, "Number of random pairs")
      ->capture_default_str();
  verify->add_option("--seed", verify_seed, "Random seed")->capture_default_str();
  add_output_flags(verify, verify_out);
  verify->callback([&] {
    const safebox::VerifyReport report = safebox::verify_theorem(
        safebox::IouThreshold(verify_alpha), verify_samples, verify_seed);
    if (verify_out.format == "json") {
      emit(verify_out, report_to_json(report));
    } else {
      emit(verify_out, safebox::verify_report_to_csv(report));
    }
    if (report.violations > 0) exit_code = 3;
  });

  // measure
  std::string measure_gt;
  std::string measure_pred;
  std::string measure_alphas = "0.1:0.9:0.1";
  bool measure_partial_only = false;
  std::optional<double> measure_min_conf;
  OutputOptions measure_out;
  CLI::App* measure_cmd = app.add_subcommand(
      "measure",
      "Sweep measured enlargement statistics over IoU thresholds");
  measure_cmd->add_option("--gt", measure_gt, "Ground-truth annotation directory")
      ->required();
  measure_cmd->add_option("--pred", measure_pred, "Prediction annotation directory")
      ->required();
  measure_cmd
      ->add_option("--alphas", measure_alphas,
                   "IoU thresholds: comma list or start:stop:step")
      ->capture_default_str();
  measure_cmd->add_flag("--partial-only", measure_partial_only,
                        "Drop pairs whose prediction already covers the "
                        "ground truth");
  measure_cmd->add_option("--min-conf", measure_min_conf,
                          "Drop predictions below this confidence");
  add_output_flags(measure_cmd, measure_out);
  measure_cmd->callback([&] {
    const std::vector<safebox::IouThreshold> alphas =
        safebox::parse_alpha_list(measure_alphas);
    const safebox::Dataset dataset =
        safebox::load_dataset(measure_gt, measure_pred, measure_min_conf);
    warn_unpaired(dataset);
    const std::vector<safebox::SweepRow> rows =
        safebox::sweep(dataset, alphas, {measure_partial_only});
    if (measure_out.format == "json") {
      emit(measure_out, sweep_to_json(rows));
    } else {
      emit(measure_out, safebox::sweep_to_csv(rows));
    }
  });

  // hist
  std::string hist_gt;
  std::string hist_pred;
  double hist_alpha = 0.0;
  double hist_bin_width = 0.0;
  bool hist_partial_only = false;
  std::optional<double> hist_min_conf;
  OutputOptions hist_out;
  CLI::App* hist = app.add_subcommand(
      "hist", "Histogram of measured enlargement factors at one threshold");
  hist->add_option("--gt", hist_gt, "Ground-truth annotation directory")
      ->required();
  hist->add_option("--pred", hist_pred, "Prediction annotation directory")
      ->required();
  hist->add_option("--alpha", hist_alpha, "IoU threshold in (0,1]")->required();
  hist->add_option("--bin-width", hist_bin_width, "Histogram bin width > 0")
      ->required();
  hist->add_flag("--partial-only", hist_partial_only,
                 "Drop pairs whose prediction already covers the ground truth");
  hist->add_option("--min-conf", hist_min_conf,
                   "Drop predictions below this confidence");
  add_output_flags(hist, hist_out);
  hist->callback([&] {
    const safebox::Dataset dataset =
        safebox::load_dataset(hist_gt, hist_pred, hist_min_conf);
    warn_unpaired(dataset);
    const std::vector<double> ks = safebox::measure(safebox::match_all(
        dataset, safebox::IouThreshold(hist_alpha), {hist_partial_only}));
    const std::vector<safebox::HistogramBin> bins =
        safebox::histogram(ks, hist_bin_width);
    if (hist_out.format == "json") {
      ordered_json doc = ordered_json::array();
      for (const safebox::HistogramBin& bin : bins) {
        doc.push_back(
            ordered_json{{"bin_lower", bin.lower_edge}, {"count", bin.count}});
      }
      emit(hist_out, doc.dump(2) + "\n");
    } else {
      emit(hist_out, safebox::histogram_to_csv(bins));
    }
  });

  // apply
  std::string apply_pred;
  double apply_k = 0.0;
  bool apply_clip = false;
  std::string apply_out_dir;
  CLI::App* apply = app.add_subcommand(
      "apply", "Enlarge every prediction box and write the result tree");
  apply->add_option("--pred", apply_pred, "Prediction annotation directory")
      ->required();
  apply->add_option("--k", apply_k, "Enlargement factor >= 1")->required();
  apply->add_flag("--clip", apply_clip,
                  "Clip enlarged boxes to the image and append a 0/1 "
                  "clipped column");
  apply->add_option("--out", apply_out_dir, "Output directory")->required();
  apply->callback([&] {
    namespace fs = std::filesystem;
    const safebox::DetectionMap predictions =
        safebox::parse_annotations(apply_pred, safebox::AnnotationKind::prediction);
    const safebox::SppDetectionMap enlarged =
        safebox::apply_spp(predictions, apply_k, apply_clip);
    const fs::path out_root(apply_out_dir);
    for (const auto& [image_id, boxes] : enlarged) {
      const fs::path out_path = out_root / (image_id + ".txt");
      fs::create_directories(out_path.parent_path());
      safebox::write_annotation_file(out_path, boxes, apply_clip);
    }
    std::cerr << "wrote " << enlarged.size() << " annotation file(s) under "
              << out_root.string() << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const safebox::SampleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const safebox::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
