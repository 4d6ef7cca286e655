#include "sigmove/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"
#include "sigmove/error.hpp"

namespace sigmove::nn {

using kernels::CMatMap;
using kernels::Mat;
using kernels::MatMap;

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::mlp: return "mlp";
    case ModelKind::cnn: return "cnn";
    case ModelKind::lstm: return "lstm";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "mlp") return ModelKind::mlp;
  if (text == "cnn") return ModelKind::cnn;
  if (text == "lstm") return ModelKind::lstm;
  throw UsageError("unknown network kind `" + std::string(text) + "`");
}

NetworkSpec NetworkSpec::make(ModelKind kind, std::size_t window, const Architecture& arch) {
  if (window == 0) throw UsageError("input window must be positive");
  NetworkSpec spec;
  spec.kind = kind;
  spec.input_window = window;
  auto dense = [](std::size_t units, bool relu) {
    return LayerSpec{.type = LayerType::dense, .units = units, .relu = relu};
  };
  auto drop = [&] { return LayerSpec{.type = LayerType::dropout, .rate = arch.dropout}; };
  switch (kind) {
    case ModelKind::mlp:
      spec.layers = {dense(arch.hidden1, true), dense(arch.hidden2, true), dense(1, false)};
      break;
    case ModelKind::cnn:
      if (window < arch.kernel)
        throw UsageError("cnn needs window >= kernel length " + std::to_string(arch.kernel));
      spec.layers = {LayerSpec{.type = LayerType::conv1d, .units = arch.hidden1, .kernel = arch.kernel, .relu = true},
                     drop(),
                     LayerSpec{.type = LayerType::flatten},
                     dense(arch.hidden2, true),
                     drop(),
                     dense(1, false)};
      break;
    case ModelKind::lstm:
      spec.layers = {LayerSpec{.type = LayerType::lstm, .units = arch.hidden1, .return_sequence = true},
                     drop(),
                     LayerSpec{.type = LayerType::lstm, .units = arch.hidden2, .return_sequence = false},
                     drop(),
                     dense(1, false)};
      break;
  }
  return spec;
}

namespace {

struct FlowShape {
  std::size_t steps = 0;  // 0 when not a sequence
  std::size_t width = 0;
};

FlowShape input_shape(const NetworkSpec& spec) {
  if (spec.kind == ModelKind::mlp) return {0, spec.input_window};
  return {spec.input_window, 1};
}

// Walks the layers, validating shape flow; calls on_param(layer, name, shape, fan_in, fan_out).
template <typename F>
void walk_layout(const NetworkSpec& spec, F&& on_param) {
  FlowShape s = input_shape(spec);
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const std::string prefix = "L" + std::to_string(i) + ".";
    switch (l.type) {
      case LayerType::dense:
        if (s.steps != 0) throw UsageError("dense layer needs a flat input");
        on_param(i, prefix + "kernel", Tensor::Shape{s.width, l.units}, s.width, l.units);
        on_param(i, prefix + "bias", Tensor::Shape{l.units}, 0, 0);
        s.width = l.units;
        break;
      case LayerType::conv1d:
        if (s.steps == 0 || s.width != 1) throw UsageError("conv1d layer needs a single-channel sequence");
        if (s.steps < l.kernel) throw UsageError("conv1d: window shorter than kernel");
        on_param(i, prefix + "kernel", Tensor::Shape{l.units, l.kernel}, l.kernel, l.kernel * l.units);
        on_param(i, prefix + "bias", Tensor::Shape{l.units}, 0, 0);
        s = {s.steps - l.kernel + 1, l.units};
        break;
      case LayerType::flatten:
        if (s.steps != 0) s = {0, s.steps * s.width};
        break;
      case LayerType::dropout:
        if (!(l.rate >= 0.0 && l.rate < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
        break;
      case LayerType::lstm:
        if (s.steps == 0) throw UsageError("lstm layer needs a sequence input");
        on_param(i, prefix + "kernel", Tensor::Shape{s.width, 4 * l.units}, s.width, 4 * l.units);
        on_param(i, prefix + "recurrent", Tensor::Shape{l.units, 4 * l.units}, l.units, 4 * l.units);
        on_param(i, prefix + "bias", Tensor::Shape{4 * l.units}, 0, 0);
        s = l.return_sequence ? FlowShape{s.steps, l.units} : FlowShape{0, l.units};
        break;
    }
  }
  if (s.steps != 0 || s.width != 1) throw UsageError("network must end in a single output unit");
}

struct LayerCache {
  const Tensor* input = nullptr;
  Tensor output;
  Tensor mask;
  bool masked = false;
  Mat patches;
  kernels::LstmTrace lstm;
  Tensor grad_in;
};

struct LayerParams {
  const double* kernel = nullptr;
  const double* recurrent = nullptr;
  const double* bias = nullptr;
};

std::vector<LayerParams> bind(const NetworkSpec& spec, const Params& params) {
  std::vector<LayerParams> out(spec.layers.size());
  for (const auto& b : params.blocks) {
    const double* p = params.values.data() + b.offset;
    auto& lp = out.at(b.layer);
    if (b.name.ends_with(".kernel")) lp.kernel = p;
    else if (b.name.ends_with(".recurrent")) lp.recurrent = p;
    else lp.bias = p;
  }
  return out;
}

void relu_inplace(Tensor& t) {
  for (double& v : t.data()) v = v > 0.0 ? v : 0.0;
}

}  // namespace

struct Workspace::Impl {
  std::vector<LayerCache> tape;
  Tensor grad;
  Mat dh;
  Mat dx_tm;
};

Workspace::Workspace() : impl_(std::make_unique<Impl>()) {}
Workspace::~Workspace() = default;
Workspace::Workspace(Workspace&&) noexcept = default;
Workspace& Workspace::operator=(Workspace&&) noexcept = default;

namespace {

// Returns the final logits, which live inside the workspace tape.
const Tensor& run_forward(const NetworkSpec& spec, const Params& params, const Tensor& input, Mode mode,
                          Rng& rng, Workspace::Impl& ws) {
  if (params.count() != param_count(spec)) throw UsageError("parameters do not match network spec");
  const auto bound = bind(spec, params);
  const std::size_t batch = input.dim(0);
  ws.tape.resize(spec.layers.size());

  const Tensor* x = &input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const LayerParams& p = bound[i];
    LayerCache& cache = ws.tape[i];
    cache.input = x;
    Tensor& y = cache.output;
    switch (l.type) {
      case LayerType::dense: {
        y.resize({batch, l.units});
        kernels::dense(x->ptr(), batch, x->dim(1), p.kernel, p.bias, l.units, y.ptr());
        if (l.relu) relu_inplace(y);
        break;
      }
      case LayerType::conv1d: {
        const std::size_t steps = x->dim(1) - l.kernel + 1;
        y.resize({batch, steps, l.units});
        kernels::im2col(x->ptr(), batch, x->dim(1), l.kernel, cache.patches);
        kernels::conv1d(cache.patches, p.kernel, p.bias, l.units, y.ptr());
        relu_inplace(y);
        break;
      }
      case LayerType::flatten:
        y.resize({batch, x->size() / batch});
        std::copy(x->data().begin(), x->data().end(), y.data().begin());
        break;
      case LayerType::dropout: {
        if (mode == Mode::infer || l.rate == 0.0) {
          cache.masked = false;
          continue;  // pass-through: keep x
        }
        cache.masked = true;
        cache.mask.resize(x->shape());
        kernels::dropout_mask(cache.mask.ptr(), cache.mask.size(), l.rate, rng);
        y.resize(x->shape());
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = (*x)[k] * cache.mask[k];
        break;
      }
      case LayerType::lstm: {
        const std::size_t steps = x->dim(1);
        kernels::LstmTrace& trace = cache.lstm;
        kernels::lstm_forward(x->ptr(), batch, steps, x->dim(2), l.units, p.kernel, p.recurrent, p.bias, trace);
        if (l.return_sequence) {
          y.resize({batch, steps, l.units});
          kernels::time_to_batch_major(trace.h, batch, steps, y.ptr());
        } else {
          y.resize({batch, l.units});
          MatMap(y.ptr(), static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(l.units)) =
              trace.h.bottomRows(static_cast<Eigen::Index>(batch));
        }
        break;
      }
    }
    x = &y;
  }
  return *x;
}

double mean_bce_from_logits(const Tensor& logits, std::span<const std::uint8_t> labels) {
  std::vector<double> probs(logits.size());
  for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = sigmoid(logits[k]);
  return bce_loss(probs, labels);
}

}  // namespace

const ParamBlock& Params::block(std::string_view name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw UsageError("no parameter block named `" + std::string(name) + "`");
}

Tensor Params::tensor(std::string_view name) const {
  const auto& b = block(name);
  return Tensor(b.shape, std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(b.offset),
                                             values.begin() + static_cast<std::ptrdiff_t>(b.offset + b.size)));
}

std::span<double> Params::view(std::string_view name) {
  const auto& b = block(name);
  return std::span<double>(values).subspan(b.offset, b.size);
}

std::vector<ParamBlock> param_layout(const NetworkSpec& spec) {
  std::vector<ParamBlock> blocks;
  std::size_t offset = 0;
  walk_layout(spec, [&](std::size_t layer, std::string name, Tensor::Shape shape, std::size_t, std::size_t) {
    const std::size_t size = shape_product(shape);
    blocks.push_back({std::move(name), std::move(shape), offset, size, layer});
    offset += size;
  });
  return blocks;
}

std::size_t param_count(const NetworkSpec& spec) {
  std::size_t total = 0;
  for (const auto& b : param_layout(spec)) total += b.size;
  return total;
}

Params init_network(const NetworkSpec& spec, std::uint64_t seed) {
  Params params;
  params.seed = seed;
  params.blocks = param_layout(spec);
  std::size_t total = 0;
  for (const auto& b : params.blocks) total += b.size;
  params.values.assign(total, 0.0);

  Rng rng = make_rng(seed);
  std::size_t k = 0;
  walk_layout(spec, [&](std::size_t layer, const std::string& name, const Tensor::Shape&, std::size_t fan_in,
                        std::size_t fan_out) {
    const ParamBlock& b = params.blocks[k++];
    auto out = std::span<double>(params.values).subspan(b.offset, b.size);
    if (fan_in + fan_out > 0) {
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (double& v : out) v = bound * (2.0 * uniform01(rng) - 1.0);
    } else if (spec.layers[layer].type == LayerType::lstm && name.ends_with(".bias")) {
      const std::size_t units = spec.layers[layer].units;
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(units), units, 1.0);
    }
  });
  return params;
}

Tensor make_input(const NetworkSpec& spec, std::span<const double> rows, std::size_t batch) {
  if (rows.size() != batch * spec.input_window)
    throw UsageError("input rows do not match window " + std::to_string(spec.input_window));
  std::vector<double> data(rows.begin(), rows.end());
  if (spec.kind == ModelKind::mlp) return Tensor({batch, spec.input_window}, std::move(data));
  return Tensor({batch, spec.input_window, 1}, std::move(data));
}

Tensor forward_logits(const NetworkSpec& spec, const Params& params, const Tensor& input, Mode mode,
                      Rng& rng) {
  Workspace ws;
  return run_forward(spec, params, input, mode, rng, ws.impl());
}

double loss_at(const NetworkSpec& spec, const Params& params, const Tensor& input,
               std::span<const std::uint8_t> labels, std::uint64_t dropout_seed) {
  Rng rng = make_rng(dropout_seed);
  Workspace ws;
  return mean_bce_from_logits(run_forward(spec, params, input, Mode::train, rng, ws.impl()), labels);
}

LossAndGradient backward(const NetworkSpec& spec, const Params& params, const Tensor& input,
                         std::span<const std::uint8_t> labels, std::uint64_t dropout_seed) {
  Workspace ws;
  LossAndGradient result;
  backward(spec, params, input, labels, dropout_seed, ws, result);
  return result;
}

void backward(const NetworkSpec& spec, const Params& params, const Tensor& input,
              std::span<const std::uint8_t> labels, std::uint64_t dropout_seed, Workspace& workspace,
              LossAndGradient& result) {
  const std::size_t batch = input.dim(0);
  if (labels.size() != batch) throw UsageError("backward: label count does not match batch");
  Workspace::Impl& ws = workspace.impl();
  Rng rng = make_rng(dropout_seed);
  const Tensor& logits = run_forward(spec, params, input, Mode::train, rng, ws);

  result.loss = mean_bce_from_logits(logits, labels);
  result.gradient.assign(params.count(), 0.0);

  // d(mean BCE)/d(logit) = (sigmoid(z) - y) / batch
  ws.grad.resize({batch, 1});
  for (std::size_t k = 0; k < batch; ++k)
    ws.grad[k] = (sigmoid(logits[k]) - static_cast<double>(labels[k])) / static_cast<double>(batch);
  Tensor* grad = &ws.grad;

  const auto bound = bind(spec, params);
  std::vector<double*> g_kernel(spec.layers.size(), nullptr), g_rec(spec.layers.size(), nullptr),
      g_bias(spec.layers.size(), nullptr);
  for (const auto& b : params.blocks) {
    double* g = result.gradient.data() + b.offset;
    if (b.name.ends_with(".kernel")) g_kernel[b.layer] = g;
    else if (b.name.ends_with(".recurrent")) g_rec[b.layer] = g;
    else g_bias[b.layer] = g;
  }

  for (std::size_t ii = spec.layers.size(); ii-- > 0;) {
    const LayerSpec& l = spec.layers[ii];
    LayerCache& cache = ws.tape[ii];
    const Tensor& x = *cache.input;
    Tensor& dx = cache.grad_in;
    const bool need_input_grad = ii > 0;
    switch (l.type) {
      case LayerType::dense: {
        const auto B = static_cast<Eigen::Index>(batch);
        const auto in = static_cast<Eigen::Index>(x.dim(1));
        const auto out = static_cast<Eigen::Index>(l.units);
        if (l.relu)
          for (std::size_t k = 0; k < grad->size(); ++k)
            if (!(cache.output[k] > 0.0)) (*grad)[k] = 0.0;
        CMatMap dz(grad->ptr(), B, out);
        MatMap(g_kernel[ii], in, out).noalias() += CMatMap(x.ptr(), B, in).transpose() * dz;
        kernels::add_column_sums(grad->ptr(), batch, l.units, g_bias[ii]);
        if (need_input_grad) {
          dx.resize(x.shape());
          MatMap(dx.ptr(), B, in).noalias() = dz * CMatMap(bound[ii].kernel, in, out).transpose();
          grad = &dx;
        }
        break;
      }
      case LayerType::conv1d: {
        const std::size_t steps = cache.output.dim(1);
        const auto rows = static_cast<Eigen::Index>(batch * steps);
        const auto F = static_cast<Eigen::Index>(l.units);
        const auto K = static_cast<Eigen::Index>(l.kernel);
        for (std::size_t k = 0; k < grad->size(); ++k)
          if (!(cache.output[k] > 0.0)) (*grad)[k] = 0.0;
        CMatMap dz(grad->ptr(), rows, F);
        MatMap(g_kernel[ii], F, K).noalias() += dz.transpose() * cache.patches;
        kernels::add_column_sums(grad->ptr(), batch * steps, l.units, g_bias[ii]);
        if (need_input_grad) {
          const std::size_t length = x.dim(1);
          ws.dx_tm.noalias() = dz * CMatMap(bound[ii].kernel, F, K);
          dx.resize(x.shape());
          std::fill(dx.data().begin(), dx.data().end(), 0.0);
          for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t t = 0; t < steps; ++t)
              for (std::size_t j = 0; j < l.kernel; ++j)
                dx[b * length + t + j] +=
                    ws.dx_tm(static_cast<Eigen::Index>(b * steps + t), static_cast<Eigen::Index>(j));
          grad = &dx;
        }
        break;
      }
      case LayerType::flatten:
        // Row-major (B, T*F) and (B, T, F) share a layout; nothing to undo.
        break;
      case LayerType::dropout:
        if (cache.masked)
          for (std::size_t k = 0; k < grad->size(); ++k) (*grad)[k] *= cache.mask[k];
        break;
      case LayerType::lstm: {
        auto& trace = cache.lstm;
        const auto B = static_cast<Eigen::Index>(batch);
        const auto U = static_cast<Eigen::Index>(l.units);
        if (l.return_sequence) {
          kernels::batch_to_time_major(grad->ptr(), batch, trace.steps, l.units, ws.dh);
        } else {
          ws.dh.setZero(static_cast<Eigen::Index>(trace.steps) * B, U);
          ws.dh.bottomRows(B) = CMatMap(grad->ptr(), B, U);
        }
        if (need_input_grad) ws.dx_tm.resize(static_cast<Eigen::Index>(trace.steps) * B,
                                              static_cast<Eigen::Index>(trace.in));
        kernels::lstm_backward(trace, bound[ii].kernel, bound[ii].recurrent, ws.dh, g_kernel[ii], g_rec[ii],
                               g_bias[ii], need_input_grad ? &ws.dx_tm : nullptr);
        if (need_input_grad) {
          dx.resize(x.shape());
          kernels::time_to_batch_major(ws.dx_tm, batch, trace.steps, dx.ptr());
          grad = &dx;
        }
        break;
      }
    }
  }

  for (double g : result.gradient)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient in backward pass");
}

std::vector<double> predict_proba(const NetworkSpec& spec, const Params& params, const FeatureMatrix& features,
                                  std::size_t chunk) {
  if (features.cols != spec.input_window)
    throw UsageError("feature width " + std::to_string(features.cols) + " does not match window " +
                     std::to_string(spec.input_window));
  if (chunk == 0) chunk = features.rows;
  std::vector<double> scores(features.rows);
  Rng unused = make_rng(0);
  Workspace ws;
  for (std::size_t start = 0; start < features.rows; start += chunk) {
    const std::size_t n = std::min(chunk, features.rows - start);
    const auto rows = std::span<const double>(features.values).subspan(start * features.cols, n * features.cols);
    const Tensor input = make_input(spec, rows, n);
    const Tensor& logits = run_forward(spec, params, input, Mode::infer, unused, ws.impl());
    for (std::size_t k = 0; k < n; ++k) scores[start + k] = sigmoid(logits[k]);
  }
  return scores;
}

}  // namespace sigmove::nn
