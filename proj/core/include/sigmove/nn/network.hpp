#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigmove/features.hpp"
#include "sigmove/nn/ops.hpp"
#include "sigmove/nn/tensor.hpp"

namespace sigmove::nn {

enum class ModelKind { mlp, cnn, lstm };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

enum class LayerType { dense, conv1d, flatten, dropout, lstm };

struct LayerSpec {
  LayerType type = LayerType::dense;
  std::size_t units = 0;         // dense/lstm width, conv1d filter count
  std::size_t kernel = 0;        // conv1d
  bool relu = false;             // dense/conv1d
  bool return_sequence = false;  // lstm
  double rate = 0.0;             // dropout

  bool operator==(const LayerSpec&) const = default;
};

/// Hidden sizes; the defaults are the reference architectures.
struct Architecture {
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 32;
  std::size_t kernel = 7;
  double dropout = 0.2;
};

/// Layer list for one model family. Every model ends in Dense(1) producing a
/// logit; the sigmoid lives in the loss and in predict_proba.
///   mlp:  Dense h1 relu -> Dense h2 relu -> Dense 1
///   cnn:  Conv1D h1 x kernel relu -> Dropout -> Flatten -> Dense h2 relu -> Dropout -> Dense 1
///   lstm: LSTM h1 (sequence) -> Dropout -> LSTM h2 (final) -> Dropout -> Dense 1
struct NetworkSpec {
  ModelKind kind = ModelKind::mlp;
  std::size_t input_window = 0;
  std::vector<LayerSpec> layers;

  static NetworkSpec make(ModelKind kind, std::size_t window, const Architecture& arch = {});
  bool operator==(const NetworkSpec&) const = default;
};

struct ParamBlock {
  std::string name;
  Tensor::Shape shape;
  std::size_t offset = 0;
  std::size_t size = 0;
  std::size_t layer = 0;

  bool operator==(const ParamBlock&) const = default;
};

/// All trainable weights in one flat buffer; blocks describe the tensors in
/// declaration order.
struct Params {
  std::vector<ParamBlock> blocks;
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t count() const noexcept { return values.size(); }
  const ParamBlock& block(std::string_view name) const;
  Tensor tensor(std::string_view name) const;
  std::span<double> view(std::string_view name);
  bool operator==(const Params&) const = default;
};

// Block layout for a spec without allocating values.
std::vector<ParamBlock> param_layout(const NetworkSpec& spec);
std::size_t param_count(const NetworkSpec& spec);

// Glorot-uniform weights, zero biases, LSTM forget-gate bias 1.
Params init_network(const NetworkSpec& spec, std::uint64_t seed);

// Shapes a (batch x window) matrix into the network's input tensor.
Tensor make_input(const NetworkSpec& spec, std::span<const double> rows, std::size_t batch);

// Logits (batch x 1). Train mode draws dropout masks from rng in layer order.
Tensor forward_logits(const NetworkSpec& spec, const Params& params, const Tensor& input, Mode mode,
                      Rng& rng);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as Params::values
};

// Activation and gradient buffers kept alive between calls so repeated
// passes over same-sized batches do not reallocate.
class Workspace {
 public:
  Workspace();
  ~Workspace();
  Workspace(Workspace&&) noexcept;
  Workspace& operator=(Workspace&&) noexcept;

  struct Impl;
  Impl& impl() { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

// Train-mode forward pass with dropout masks drawn from dropout_seed, then
// exact gradients of the mean BCE loss wrt every parameter.
LossAndGradient backward(const NetworkSpec& spec, const Params& params, const Tensor& input,
                         std::span<const std::uint8_t> labels, std::uint64_t dropout_seed);

// Same, writing into `out` and reusing `ws`.
void backward(const NetworkSpec& spec, const Params& params, const Tensor& input,
              std::span<const std::uint8_t> labels, std::uint64_t dropout_seed, Workspace& ws,
              LossAndGradient& out);

// Loss only, same masks as backward() for the same seed.
double loss_at(const NetworkSpec& spec, const Params& params, const Tensor& input,
               std::span<const std::uint8_t> labels, std::uint64_t dropout_seed);

// Sigmoid outputs in inference mode, evaluated in chunks of `chunk` rows.
std::vector<double> predict_proba(const NetworkSpec& spec, const Params& params,
                                  const FeatureMatrix& features, std::size_t chunk = 256);

}  // namespace sigmove::nn
