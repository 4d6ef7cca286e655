#include "sigmove/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sigmove/error.hpp"

namespace sigmove {

std::string_view to_string(Direction direction) noexcept {
  return direction == Direction::positive ? "positive" : "negative";
}

Direction parse_direction(std::string_view text) {
  if (text == "positive" || text == "pos") return Direction::positive;
  if (text == "negative" || text == "neg") return Direction::negative;
  throw UsageError("unknown direction `" + std::string(text) + "` (expected pos|neg)");
}

SignificanceSpec make_significance(Direction direction, double fraction, double sigma_train) {
  if (!(fraction > 0.0)) throw UsageError("significance fraction must be positive");
  return {direction, fraction, sigma_train, fraction * sigma_train};
}

ReturnSeries compute_log_returns(const PriceSeries& series) {
  if (series.size() < 2 || series.dates.size() != series.size())
    throw DataError("price series needs at least 2 aligned observations");
  ReturnSeries out;
  out.ticker = series.ticker;
  out.returns.reserve(series.size() - 1);
  out.dates.reserve(series.size() - 1);
  for (std::size_t t = 1; t < series.size(); ++t) {
    out.returns.push_back(std::log(series.closes[t] / series.closes[t - 1]));
    out.dates.push_back(series.dates[t]);
  }
  return out;
}

std::size_t temporal_split_index(std::size_t n_samples, double train_ratio) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw UsageError("train ratio must lie in (0, 1)");
  if (n_samples < 4)
    throw DataError("need at least 4 samples for a temporal split, got " + std::to_string(n_samples));
  const auto idx = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n_samples)));
  if (idx == 0 || idx >= n_samples)
    throw DataError("degenerate temporal split: train or test partition empty");
  return idx;
}

double training_sigma(std::span<const double> returns, std::size_t split) {
  if (split > returns.size()) throw UsageError("split index beyond return series");
  if (split < 2) throw DataError("need at least 2 training returns to estimate sigma");
  auto train = returns.first(split);
  if (std::all_of(train.begin(), train.end(), [&](double r) { return r == train.front(); }))
    throw DataError("zero variance in training returns");
  double mean = 0.0;
  for (double r : train) mean += r;
  mean /= static_cast<double>(split);
  double ss = 0.0;
  for (double r : train) ss += (r - mean) * (r - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(split - 1));
  if (!(sigma > 0.0)) throw DataError("zero variance in training returns");
  return sigma;
}

Labels label_returns(std::span<const double> returns, const SignificanceSpec& spec) {
  if (!(spec.threshold > 0.0)) throw UsageError("significance threshold must be positive");
  Labels labels(returns.size());
  for (std::size_t t = 0; t < returns.size(); ++t) {
    labels[t] = spec.direction == Direction::positive ? returns[t] > spec.threshold
                                                      : returns[t] < -spec.threshold;
  }
  return labels;
}

LabeledDataset make_windows(const ReturnSeries& returns, const Labels& labels, std::size_t window,
                            double train_ratio) {
  if (window == 0) throw UsageError("window must be positive");
  if (labels.size() != returns.size()) throw UsageError("labels must align with returns");
  if (returns.size() <= window + 4)
    throw DataError("series too short for window " + std::to_string(window) + ": " +
                    std::to_string(returns.size()) + " returns");

  LabeledDataset ds;
  ds.window = window;
  const std::size_t n = returns.size() - window;
  ds.features.rows = n;
  ds.features.cols = window;
  ds.features.values.resize(n * window);
  ds.labels.resize(n);
  ds.sample_dates.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::copy_n(returns.returns.begin() + static_cast<std::ptrdiff_t>(k), window,
                ds.features.values.begin() + static_cast<std::ptrdiff_t>(k * window));
    ds.labels[k] = labels[k + window];
    if (!returns.dates.empty()) ds.sample_dates[k] = returns.dates[k + window];
  }
  ds.split_index = temporal_split_index(n, train_ratio);
  return ds;
}

std::size_t test_period_start(std::size_t n_returns, std::size_t window, double train_ratio) {
  if (n_returns <= window + 4)
    throw DataError("series too short for window " + std::to_string(window) + ": " +
                    std::to_string(n_returns) + " returns");
  return temporal_split_index(n_returns - window, train_ratio) + window;
}

LabeledDataset build_dataset(const ReturnSeries& returns, const DatasetOptions& options) {
  const std::size_t train_end = test_period_start(returns.size(), options.window, options.train_ratio);
  const double sigma = training_sigma(returns.returns, train_end);
  const auto spec = make_significance(options.direction, options.fraction, sigma);
  LabeledDataset ds =
      make_windows(returns, label_returns(returns.returns, spec), options.window, options.train_ratio);
  ds.direction = spec.direction;
  ds.fraction = spec.fraction;
  ds.sigma_train = spec.sigma_train;
  ds.threshold = spec.threshold;

  if (options.standardize) {
    double mean = 0.0;
    for (std::size_t t = 0; t < train_end; ++t) mean += returns.returns[t];
    mean /= static_cast<double>(train_end);
    for (double& v : ds.features.values) v = (v - mean) / sigma;
  }
  return ds;
}

void write_dataset_csv(const LabeledDataset& dataset, std::ostream& out) {
  for (std::size_t j = 0; j < dataset.window; ++j) out << "feature_" << (j + 1) << ',';
  out << "label,date\n";
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    for (double v : dataset.features.row(k)) out << format_double(v) << ',';
    out << static_cast<int>(dataset.labels[k]) << ',' << format_iso_date(dataset.sample_dates[k])
        << '\n';
  }
}

}  // namespace sigmove
