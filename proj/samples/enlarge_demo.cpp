// Walkthrough of the library on a tiny annotation set: load ground truth and
// predictions, match them at an IoU threshold, compare the measured
// enlargement factors against the worst-case bound, then enlarge every
// prediction and confirm the matched truth boxes are covered.
//
// Usage: enlarge_demo [gt_dir pred_dir [alpha]]
// With no arguments it runs on the checked-in data next to this source file.

#include <iomanip>
#include <iostream>
#include <string>

#include "safebox/annotations.hpp"
#include "safebox/geometry.hpp"
#include "safebox/pipeline.hpp"
#include "safebox/theory.hpp"

#ifndef SAFEBOX_SAMPLE_DATA
#define SAFEBOX_SAMPLE_DATA "samples/data"
#endif

int main(int argc, char** argv) {
  std::string gt_dir = std::string(SAFEBOX_SAMPLE_DATA) + "/gt";
  std::string pred_dir = std::string(SAFEBOX_SAMPLE_DATA) + "/pred";
  double alpha = 0.5;
  if (argc >= 3) {
    gt_dir = argv[1];
    pred_dir = argv[2];
  }
  if (argc >= 4) alpha = std::stod(argv[3]);

  try {
    const safebox::IouThreshold threshold(alpha);
    const double bound = safebox::worst_case_factor(threshold);
    const safebox::Dataset dataset = safebox::load_dataset(gt_dir, pred_dir);
    const auto pairs = safebox::match_all(dataset, threshold);

    std::cout << std::fixed << std::setprecision(3);
    std::cout << "threshold alpha = " << alpha << ", worst-case factor = "
              << bound << "\n\n";
    std::cout << "matched pairs (IoU >= alpha):\n";
    for (const auto& pair : pairs) {
      std::cout << "  " << pair.image_id << "  class " << pair.class_id
                << "  iou " << pair.iou << "  needs k = " << pair.k_measured
                << '\n';
    }

    const safebox::SppDetectionMap enlarged =
        safebox::apply_spp(dataset.predictions, bound, false);
    std::size_t covered = 0;
    for (const auto& pair : pairs) {
      const safebox::Rect& box =
          enlarged.at(pair.image_id)[pair.pred_index].detection.box;
      if (safebox::contains(box, pair.gt)) ++covered;
    }
    std::cout << "\nafter enlarging every prediction by " << bound << ": "
              << covered << " of " << pairs.size()
              << " matched truth boxes are covered\n";
    return covered == pairs.size() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
