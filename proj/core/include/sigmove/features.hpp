#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigmove/market_data.hpp"

namespace sigmove {

enum class Direction { positive, negative };

std::string_view to_string(Direction direction) noexcept;
// Accepts "positive"/"pos" and "negative"/"neg"; throws UsageError otherwise.
Direction parse_direction(std::string_view text);

/// Daily log returns; dates[t] is the later day of the pair behind returns[t].
struct ReturnSeries {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<double> returns;

  std::size_t size() const noexcept { return returns.size(); }
};

struct SignificanceSpec {
  Direction direction = Direction::positive;
  double fraction = 1.0;
  double sigma_train = 0.0;
  double threshold = 0.0;  // fraction * sigma_train
};

SignificanceSpec make_significance(Direction direction, double fraction, double sigma_train);

/// Dense row-major matrix of model inputs.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

using Labels = std::vector<std::uint8_t>;

/// Sliding-window samples: row k holds returns[k .. k+window-1] and its label
/// comes from returns[k+window]. Samples [0, split_index) train, the rest test.
struct LabeledDataset {
  std::size_t window = 0;
  Direction direction = Direction::positive;
  double fraction = 0.0;
  double sigma_train = 0.0;
  double threshold = 0.0;
  FeatureMatrix features;
  Labels labels;
  std::size_t split_index = 0;
  std::vector<Date> sample_dates;  // label-day dates

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t n_train() const noexcept { return split_index; }
  std::size_t n_test() const noexcept { return labels.size() - split_index; }
  // Index into the return vector of sample k's label.
  std::size_t label_return_index(std::size_t k) const noexcept { return k + window; }
};

ReturnSeries compute_log_returns(const PriceSeries& series);

// floor(train_ratio * n_samples); both partitions must be non-empty.
std::size_t temporal_split_index(std::size_t n_samples, double train_ratio);

// Sample standard deviation (n-1) of returns[0, split). Throws DataError on
// fewer than 2 values or zero variance.
double training_sigma(std::span<const double> returns, std::size_t split);

// positive: r > threshold; negative: r < -threshold. Strict.
Labels label_returns(std::span<const double> returns, const SignificanceSpec& spec);

LabeledDataset make_windows(const ReturnSeries& returns, const Labels& labels, std::size_t window,
                            double train_ratio);

struct DatasetOptions {
  std::size_t window = 7;
  Direction direction = Direction::positive;
  double fraction = 1.0;
  double train_ratio = 0.75;
  bool standardize = false;
};

// Split on the sample axis, sigma over training-period returns (every return
// that precedes the first test label), labels, then windows.
LabeledDataset build_dataset(const ReturnSeries& returns, const DatasetOptions& options);

// First return index belonging to the test period for the given window/ratio.
std::size_t test_period_start(std::size_t n_returns, std::size_t window, double train_ratio);

void write_dataset_csv(const LabeledDataset& dataset, std::ostream& out);

}  // namespace sigmove
