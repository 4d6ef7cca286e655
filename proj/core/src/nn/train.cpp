#include "sigmove/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sigmove/error.hpp"

namespace sigmove::nn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
  if (params.size() != grads.size()) throw UsageError("adam_step: gradient size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw UsageError("adam_step: optimizer state size mismatch");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = AdamState::kBeta1 * state.m[i] + (1.0 - AdamState::kBeta1) * g;
    state.v[i] = AdamState::kBeta2 * state.v[i] + (1.0 - AdamState::kBeta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
  }
}

TrainResult train(const NetworkSpec& spec, const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                  std::size_t n_rows, const TrainConfig& config) {
  if (config.epochs == 0 || config.batch_size == 0 || !(config.learning_rate > 0.0))
    throw UsageError("epochs, batch size and learning rate must be positive");
  if (n_rows == 0) throw DataError("empty training partition");
  if (n_rows > features.rows || n_rows > labels.size()) throw UsageError("training rows out of range");
  if (features.cols != spec.input_window) throw UsageError("feature width does not match network window");

  TrainResult result;
  result.params = init_network(spec, derive_seed(config.seed, {1}));
  const auto positives = std::count_if(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_rows),
                                       [](auto y) { return y != 0; });
  result.single_class = positives == 0 || static_cast<std::size_t>(positives) == n_rows;

  Rng shuffle_rng = make_rng(derive_seed(config.seed, {2}));
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  AdamState adam;
  std::vector<double> batch_rows;
  std::vector<std::uint8_t> batch_labels;
  Workspace workspace;
  LossAndGradient step;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n_rows; start += config.batch_size, ++batch_index) {
      const std::size_t n = std::min(config.batch_size, n_rows - start);
      batch_rows.resize(n * features.cols);
      batch_labels.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        const auto row = features.row(order[start + k]);
        std::copy(row.begin(), row.end(), batch_rows.begin() + static_cast<std::ptrdiff_t>(k * features.cols));
        batch_labels[k] = labels[order[start + k]];
      }
      const Tensor input = make_input(spec, batch_rows, n);
      backward(spec, result.params, input, batch_labels, derive_seed(config.seed, {3, epoch, batch_index}), workspace,
               step);
      if (!std::isfinite(step.loss)) {
        std::ostringstream os;
        os << "non-finite training loss at epoch " << epoch << ", batch " << batch_index;
        throw NumericError(os.str());
      }
      loss_sum += step.loss * static_cast<double>(n);
      adam_step(result.params.values, step.gradient, adam, config.learning_rate);
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(n_rows));
  }
  return result;
}

TrainResult train(const NetworkSpec& spec, const LabeledDataset& dataset, const TrainConfig& config) {
  return train(spec, dataset.features, dataset.labels, dataset.split_index, config);
}

}  // namespace sigmove::nn
