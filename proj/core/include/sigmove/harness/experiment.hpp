#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigmove/features.hpp"
#include "sigmove/forest.hpp"
#include "sigmove/market_data.hpp"
#include "sigmove/nn/network.hpp"
#include "sigmove/nn/train.hpp"

namespace sigmove::harness {

enum class ModelType { mlp, cnn, lstm, rf, rsi };

std::string_view to_string(ModelType model) noexcept;
ModelType parse_model_type(std::string_view text);
const std::vector<ModelType>& all_model_types();

/// One cell of the experiment grid. For the rsi model the window doubles as
/// the RSI lookback unless rsi_lookback is set.
struct ExperimentSpec {
  std::string ticker;
  ModelType model = ModelType::mlp;
  std::size_t window = 7;
  double fraction = 1.0;
  Direction direction = Direction::positive;
  std::uint64_t seed = 0;
  double train_ratio = 0.75;
  bool standardize = false;
  std::size_t repeats = 1;

  nn::TrainConfig train;          // seed is replaced by the cell seed
  nn::Architecture architecture;
  ForestConfig forest;            // seed is replaced by the cell seed
  std::optional<std::size_t> rsi_lookback;

  // Verification hook: permute all labels with this seed before fitting,
  // destroying any feature/label relationship.
  std::optional<std::uint64_t> label_shuffle_seed;
  bool record_timing = true;
};

namespace status {
inline constexpr std::string_view ok = "ok";
inline constexpr std::string_view single_class_test = "single_class_test";
}  // namespace status

struct ResultRow {
  std::string ticker;
  ModelType model = ModelType::mlp;
  std::size_t window = 0;
  double fraction = 0.0;
  Direction direction = Direction::positive;
  std::uint64_t seed = 0;
  std::optional<double> auc;  // empty when undefined
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_pos_test = 0;
  double train_seconds = 0.0;
  std::optional<double> loss_final;
  std::string status;

  bool auc_defined() const noexcept { return auc.has_value(); }
  bool operator==(const ResultRow&) const = default;
};

// Full pipeline for one cell. Data problems (zero variance, short series,
// single-class test labels) come back as a row status, not an exception.
ResultRow run_experiment(const ExperimentSpec& spec, const PriceSeries& series);

// Test-partition scores for one model on a prepared dataset. Exposed so the
// pipeline pieces can be checked in isolation.
struct ModelScores {
  std::vector<double> scores;
  std::optional<double> loss_final;
};
ModelScores fit_and_score(const ExperimentSpec& spec, const PriceSeries& series, const LabeledDataset& dataset,
                          std::uint64_t seed);

// RSI benchmark scores for the test samples: RSI at the close before each
// label day, mapped through rsi_score.
std::vector<double> rsi_test_scores(const PriceSeries& series, const LabeledDataset& dataset,
                                    std::size_t lookback);

}  // namespace sigmove::harness
