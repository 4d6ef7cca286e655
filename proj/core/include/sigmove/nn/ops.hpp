#pragma once

#include <cstdint>
#include <span>

#include "sigmove/nn/tensor.hpp"
#include "sigmove/seed.hpp"

namespace sigmove::nn {

enum class Mode { train, infer };

inline constexpr double kBceEpsilon = 1e-7;

// (batch x d_in) . (d_in x d_out) + bias(d_out); pre-activation.
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

// Valid, stride-1 convolution of a single-channel sequence.
// input (batch x L x 1), filters (F x K), bias (F) -> (batch x (L-K+1) x F).
Tensor conv1d_forward(const Tensor& input, const Tensor& filters, const Tensor& bias);

/// LSTM parameters. Gate blocks along the 4U axis are ordered
/// input, forget, candidate, output.
struct LstmWeights {
  Tensor kernel;     // D x 4U
  Tensor recurrent;  // U x 4U
  Tensor bias;       // 4U
};

// input (batch x T x D), zero initial state. Returns (batch x T x U) when
// return_sequence, else the final hidden state (batch x U).
Tensor lstm_forward(const Tensor& input, const LstmWeights& weights, bool return_sequence);

// Inverted dropout: in train mode each element is zeroed with probability
// `rate` and survivors are scaled by 1/(1-rate). Identity in infer mode.
Tensor dropout(const Tensor& input, double rate, Mode mode, Rng& rng);

Tensor relu(const Tensor& input);
double sigmoid(double z) noexcept;

// Mean binary cross-entropy with probabilities clipped to [eps, 1-eps].
double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> labels);

}  // namespace sigmove::nn
