#pragma once

// Reference implementations written for clarity, not speed. They share no
// code with the library beyond plain data types.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sigmove/features.hpp"
#include "sigmove/forest.hpp"
#include "sigmove/nn/network.hpp"

namespace oracle {

using sigmove::nn::Tensor;

std::filesystem::path fixture(const std::string& name);

// Triple loop: (B x in) . (in x out) + b.
Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b);

// Direct sum over the kernel window. x (B x L x 1), w (F x K).
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b);

// Scalar recurrence per sample and step with std::exp / std::tanh.
Tensor lstm(const Tensor& x, const Tensor& kernel, const Tensor& recurrent, const Tensor& bias,
            bool return_sequence);

// Inference-mode logits composed from the oracles above.
Tensor network_logits(const sigmove::nn::NetworkSpec& spec, const sigmove::nn::Params& params,
                      const Tensor& input);

// Central differences of the loss with fixed dropout masks.
std::vector<double> finite_difference_gradient(const sigmove::nn::NetworkSpec& spec, sigmove::nn::Params params,
                                               const Tensor& input, std::span<const std::uint8_t> labels,
                                               std::uint64_t dropout_seed, double step);

// Train-mode mean BCE in long double, built from scalar loops only. Dropout
// masks are drawn from the seed the same way the library documents: one
// uniform per activation, layer by layer, dropped when below the rate.
long double extended_loss(const sigmove::nn::NetworkSpec& spec, const std::vector<double>& params,
                          const Tensor& input, std::span<const std::uint8_t> labels, std::uint64_t dropout_seed);

// Central difference of extended_loss for parameter k. The perturbed points
// are the same doubles the plain version uses; only the loss is evaluated
// with a 64-bit mantissa, which removes most of the cancellation noise.
double extended_central_difference(const sigmove::nn::NetworkSpec& spec, const sigmove::nn::Params& params,
                                   const Tensor& input, std::span<const std::uint8_t> labels,
                                   std::uint64_t dropout_seed, std::size_t k, double step);

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor);

// Exhaustive CART with exact rational Gini comparison. Considers every
// feature at every node, ties to the lowest feature then lowest threshold.
struct CartNode {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  double positive_fraction = 0.0;
  std::size_t count = 0;
  int left = -1;
  int right = -1;
};
std::vector<CartNode> cart(const sigmove::FeatureMatrix& x, std::span<const std::uint8_t> y);

// True when the library tree and the oracle tree have the same shape,
// splits, and leaf values.
bool same_tree(const sigmove::DecisionTree& tree, const std::vector<CartNode>& ref);

// Fraction of positive/negative pairs ranked correctly, ties half. Written
// independently of the library's version.
double pairwise_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Sample standard deviation, two-pass.
double sample_sd(std::span<const double> v);

}  // namespace oracle
