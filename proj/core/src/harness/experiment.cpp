#include "sigmove/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "sigmove/error.hpp"
#include "sigmove/indicators.hpp"
#include "sigmove/metrics.hpp"

namespace sigmove::harness {

std::string_view to_string(ModelType model) noexcept {
  switch (model) {
    case ModelType::mlp: return "mlp";
    case ModelType::cnn: return "cnn";
    case ModelType::lstm: return "lstm";
    case ModelType::rf: return "rf";
    case ModelType::rsi: return "rsi";
  }
  return "unknown";
}

ModelType parse_model_type(std::string_view text) {
  for (auto m : all_model_types())
    if (to_string(m) == text) return m;
  throw UsageError("unknown model `" + std::string(text) + "` (expected mlp|cnn|lstm|rf|rsi)");
}

const std::vector<ModelType>& all_model_types() {
  static const std::vector<ModelType> models{ModelType::mlp, ModelType::cnn, ModelType::lstm, ModelType::rf,
                                             ModelType::rsi};
  return models;
}

namespace {

FeatureMatrix test_rows(const LabeledDataset& ds) {
  FeatureMatrix m;
  m.rows = ds.n_test();
  m.cols = ds.features.cols;
  m.values.assign(ds.features.values.begin() + static_cast<std::ptrdiff_t>(ds.split_index * m.cols),
                  ds.features.values.end());
  return m;
}

nn::ModelKind network_kind(ModelType model) {
  switch (model) {
    case ModelType::mlp: return nn::ModelKind::mlp;
    case ModelType::cnn: return nn::ModelKind::cnn;
    case ModelType::lstm: return nn::ModelKind::lstm;
    default: throw UsageError("not a network model");
  }
}

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

std::vector<double> rsi_test_scores(const PriceSeries& series, const LabeledDataset& dataset, std::size_t lookback) {
  const auto score = rsi_score(wilder_rsi(series, lookback), dataset.direction);
  std::vector<double> out(dataset.n_test());
  for (std::size_t k = 0; k < out.size(); ++k) {
    // Return t spans closes t -> t+1, so the prior close is price index t.
    out[k] = score[dataset.label_return_index(dataset.split_index + k)];
  }
  return out;
}

ModelScores fit_and_score(const ExperimentSpec& spec, const PriceSeries& series, const LabeledDataset& dataset,
                          std::uint64_t seed) {
  ModelScores out;
  switch (spec.model) {
    case ModelType::mlp:
    case ModelType::cnn:
    case ModelType::lstm: {
      const auto net = nn::NetworkSpec::make(network_kind(spec.model), dataset.window, spec.architecture);
      nn::TrainConfig cfg = spec.train;
      cfg.seed = seed;
      const auto trained = nn::train(net, dataset, cfg);
      out.scores = nn::predict_proba(net, trained.params, test_rows(dataset));
      out.loss_final = trained.loss_history.back();
      break;
    }
    case ModelType::rf: {
      ForestConfig cfg = spec.forest;
      cfg.seed = seed;
      const auto model = fit_forest(dataset, cfg);
      out.scores = forest_predict_proba(model, test_rows(dataset));
      break;
    }
    case ModelType::rsi:
      out.scores = rsi_test_scores(series, dataset, spec.rsi_lookback.value_or(spec.window));
      break;
  }
  return out;
}

ResultRow run_experiment(const ExperimentSpec& spec, const PriceSeries& series) {
  ResultRow row;
  row.ticker = spec.ticker.empty() ? series.ticker : spec.ticker;
  row.model = spec.model;
  row.window = spec.window;
  row.fraction = spec.fraction;
  row.direction = spec.direction;
  row.seed = spec.seed;

  LabeledDataset dataset;
  try {
    if (!(spec.fraction > 0.0)) throw UsageError("fraction must be positive");
    if (spec.window < 2) throw UsageError("window must be at least 2");
    dataset = build_dataset(compute_log_returns(series),
                            {spec.window, spec.direction, spec.fraction, spec.train_ratio, spec.standardize});
  } catch (const std::exception& e) {
    row.status = sanitize(std::string("data_error: ") + e.what());
    return row;
  }
  if (spec.label_shuffle_seed) {
    Rng rng = make_rng(*spec.label_shuffle_seed);
    std::shuffle(dataset.labels.begin(), dataset.labels.end(), rng);
  }

  row.n_train = dataset.n_train();
  row.n_test = dataset.n_test();
  row.n_pos_test = static_cast<std::size_t>(
      std::count(dataset.labels.begin() + static_cast<std::ptrdiff_t>(dataset.split_index), dataset.labels.end(), 1));
  const std::span<const std::uint8_t> test_labels(dataset.labels.data() + dataset.split_index, dataset.n_test());

  const std::size_t repeats = spec.model == ModelType::rsi ? 1 : std::max<std::size_t>(spec.repeats, 1);
  double auc_sum = 0.0;
  bool defined = row.n_pos_test > 0 && row.n_pos_test < row.n_test;
  try {
    for (std::size_t r = 0; r < repeats; ++r) {
      const std::uint64_t seed = r == 0 ? spec.seed : derive_seed(spec.seed, {r});
      const auto start = std::chrono::steady_clock::now();
      const auto fitted = fit_and_score(spec, series, dataset, seed);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (spec.record_timing) row.train_seconds += elapsed.count();
      if (r == 0) row.loss_final = fitted.loss_final;
      if (defined) auc_sum += roc_curve(fitted.scores, test_labels).auc;
    }
  } catch (const std::exception& e) {
    row.status = sanitize(std::string("runtime_error: ") + e.what());
    return row;
  }

  if (!defined) {
    row.status = std::string(status::single_class_test);
  } else {
    row.auc = auc_sum / static_cast<double>(repeats);
    row.status = repeats > 1 ? "ok_mean_of_" + std::to_string(repeats) : std::string(status::ok);
  }
  return row;
}

}  // namespace sigmove::harness
