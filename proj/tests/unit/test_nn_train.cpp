#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "sigmove/error.hpp"
#include "sigmove/harness/synthetic.hpp"
#include "sigmove/nn/train.hpp"

using namespace sigmove;
using namespace sigmove::nn;

TEST_CASE("adam first step moves by the learning rate") {
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -4.0, 0.0};
  AdamState state;
  adam_step(p, g, state, 0.01);
  CHECK(p[0] == doctest::Approx(1.0 - 0.01 * 0.3 / (0.3 + 1e-8)));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.01));
  CHECK(p[2] == 0.5);
  CHECK(state.step == 1);
}

TEST_CASE("adam matches a hand-rolled two-step update") {
  double w = 0.2, m = 0, v = 0;
  std::vector<double> p{0.2};
  AdamState state;
  for (int t = 1; t <= 2; ++t) {
    const double g = 2.0 * w;  // d/dw w^2
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    w -= 0.1 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    const std::vector<double> grad{2.0 * p[0]};
    adam_step(p, grad, state, 0.1);
    CHECK(p[0] == doctest::Approx(w).epsilon(1e-14));
  }
  std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(adam_step(wrong, std::vector<double>{1.0}, state, 0.1), UsageError);
}

TEST_CASE("separable toy set is fit") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  FeatureMatrix f{200, 4, std::vector<double>(800)};
  std::vector<std::uint8_t> y(200);
  for (std::size_t r = 0; r < 200; ++r) {
    for (std::size_t c = 0; c < 4; ++c) f.values[r * 4 + c] = n(rng);
    const double s = f(r, 0) + f(r, 1) - f(r, 2);
    if (std::fabs(s) < 0.3) f.values[r * 4] += s > 0 ? 0.5 : -0.5;
    y[r] = f(r, 0) + f(r, 1) - f(r, 2) > 0;
  }
  TrainConfig cfg;
  cfg.seed = 4;
  const auto result = train(NetworkSpec::make(ModelKind::mlp, 4), f, y, 200, cfg);
  CHECK(result.loss_history.size() == 50);
  CHECK(result.loss_history.back() < 0.1);
  CHECK_FALSE(result.single_class);
}

TEST_CASE("training is deterministic in the seed") {
  const auto ds = build_dataset(
      compute_log_returns(harness::generate_synthetic(harness::SyntheticKind::gaussian, 300, 2)),
      {.window = 7, .standardize = true});
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 12;
  for (auto kind : {ModelKind::mlp, ModelKind::cnn, ModelKind::lstm}) {
    const auto spec = NetworkSpec::make(kind, 7, {.hidden1 = 8, .hidden2 = 4});
    const auto a = train(spec, ds, cfg);
    const auto b = train(spec, ds, cfg);
    CHECK(a.params == b.params);
    CHECK(a.loss_history == b.loss_history);
    auto other = cfg;
    other.seed = 13;
    CHECK(train(spec, ds, other).params.values != a.params.values);
  }
}

TEST_CASE("loss falls on the planted fixture") {
  const auto ds = build_dataset(
      compute_log_returns(harness::generate_synthetic(harness::SyntheticKind::planted, 1500, 3)),
      {.window = 7, .fraction = 1.2, .standardize = true});
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 1;
  const auto r = train(NetworkSpec::make(ModelKind::mlp, 7), ds, cfg);
  const auto& h = r.loss_history;
  const double first = std::accumulate(h.begin(), h.begin() + 5, 0.0);
  const double last = std::accumulate(h.end() - 5, h.end(), 0.0);
  CHECK(last < first);
}

TEST_CASE("bad configuration and non-finite input") {
  FeatureMatrix f{4, 2, {0, 1, 1, 0, 2, 2, 3, 1}};
  std::vector<std::uint8_t> y{0, 1, 0, 1};
  const auto spec = NetworkSpec::make(ModelKind::mlp, 2);
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(train(spec, f, y, 4, cfg), UsageError);
  cfg.epochs = 1;
  CHECK_THROWS_AS(train(spec, f, y, 0, cfg), DataError);
  CHECK_THROWS_AS(train(NetworkSpec::make(ModelKind::mlp, 3), f, y, 4, cfg), UsageError);
  f.values[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(train(spec, f, y, 4, cfg), NumericError);
  const auto single = train(spec, FeatureMatrix{2, 2, {0, 1, 1, 0}}, std::vector<std::uint8_t>{1, 1}, 2, cfg);
  CHECK(single.single_class);
}
