#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sigmove/features.hpp"
#include "sigmove/nn/network.hpp"

namespace sigmove::nn {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
};

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

// Bias-corrected Adam update in place. State is sized lazily on first use.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

struct TrainResult {
  Params params;
  std::vector<double> loss_history;  // mean training loss per epoch
  bool single_class = false;         // training labels held only one class
};

// Mini-batch Adam over rows [0, n_rows). Deterministic in config.seed.
// Throws NumericError if the loss turns non-finite.
TrainResult train(const NetworkSpec& spec, const FeatureMatrix& features,
                  std::span<const std::uint8_t> labels, std::size_t n_rows, const TrainConfig& config);

// Trains on the dataset's training partition.
TrainResult train(const NetworkSpec& spec, const LabeledDataset& dataset, const TrainConfig& config);

}  // namespace sigmove::nn
