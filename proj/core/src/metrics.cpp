#include "sigmove/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "sigmove/error.hpp"
#include "sigmove/market_data.hpp"

namespace sigmove {

namespace {

void count_classes(std::span<const double> scores, std::span<const std::uint8_t> labels,
                   std::size_t& n_pos, std::size_t& n_neg) {
  if (scores.size() != labels.size()) throw UsageError("scores and labels differ in length");
  n_pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto y) { return y != 0; }));
  n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("AUC undefined: labels contain a single class");
  for (double s : scores)
    if (std::isnan(s)) throw DataError("score is NaN");
}

}  // namespace

RocResult roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  RocResult roc;
  count_classes(scores, labels, roc.n_pos, roc.n_neg);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  const double pos = static_cast<double>(roc.n_pos);
  const double neg = static_cast<double>(roc.n_neg);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  roc.tpr.push_back(0.0);
  roc.fpr.push_back(0.0);

  // Area accumulated in integer half-units: sum of dfp * (tp_prev + tp_next).
  std::uint64_t twice_area = 0;
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::uint64_t dtp = 0, dfp = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] ? dtp : dfp) += 1;
    twice_area += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.thresholds.push_back(s);
    roc.tpr.push_back(static_cast<double>(tp) / pos);
    roc.fpr.push_back(static_cast<double>(fp) / neg);
  }
  roc.auc = static_cast<double>(twice_area) / (2.0 * pos * neg);
  return roc;
}

double auc_pairwise(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::size_t n_pos = 0, n_neg = 0;
  count_classes(scores, labels, n_pos, n_neg);
  std::uint64_t twice_wins = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) twice_wins += 2;
      else if (scores[i] == scores[j]) twice_wins += 1;
    }
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double trapezoid_area(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("curve coordinates differ in length");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) * 0.5;
  return area;
}

void write_roc_csv(const RocResult& roc, std::ostream& out) {
  out << "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < roc.thresholds.size(); ++i) {
    out << (std::isinf(roc.thresholds[i]) ? std::string("inf") : format_double(roc.thresholds[i]))
        << ',' << format_double(roc.fpr[i]) << ',' << format_double(roc.tpr[i]) << '\n';
  }
}

}  // namespace sigmove
