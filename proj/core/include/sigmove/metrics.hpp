#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sigmove {

/// ROC curve swept over distinct score thresholds, descending. The first
/// threshold is +infinity (point (0,0)); the last point is (1,1).
struct RocResult {
  std::vector<double> thresholds;
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// Predicts positive iff score >= threshold. Throws DataError("AUC undefined")
// unless both classes are present.
RocResult roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Mann-Whitney form: fraction of (pos, neg) pairs ranked correctly, ties 1/2.
// Quadratic; meant as a cross-check.
double auc_pairwise(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Trapezoid over arbitrary curve points.
double trapezoid_area(std::span<const double> x, std::span<const double> y);

void write_roc_csv(const RocResult& roc, std::ostream& out);

}  // namespace sigmove
