#include "sigmove/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"
#include "sigmove/error.hpp"

namespace sigmove::nn {

namespace kernels {

void dense(const double* x, std::size_t batch, std::size_t in, const double* w, const double* b,
           std::size_t out, double* y) {
  MatMap Y(y, static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(out));
  CMatMap X(x, static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(in));
  CMatMap W(w, static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
  Y.noalias() = X * W;
  Y.rowwise() += CVecMap(b, static_cast<Eigen::Index>(out));
}

void im2col(const double* x, std::size_t batch, std::size_t length, std::size_t kernel, Mat& patches) {
  const std::size_t steps = length - kernel + 1;
  patches.resize(static_cast<Eigen::Index>(batch * steps), static_cast<Eigen::Index>(kernel));
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t j = 0; j < kernel; ++j)
        patches(static_cast<Eigen::Index>(b * steps + t), static_cast<Eigen::Index>(j)) =
            x[b * length + t + j];
}

void conv1d(const Mat& patches, const double* w, const double* b, std::size_t filters, double* y) {
  MatMap Y(y, patches.rows(), static_cast<Eigen::Index>(filters));
  CMatMap W(w, static_cast<Eigen::Index>(filters), patches.cols());
  Y.noalias() = patches * W.transpose();
  Y.rowwise() += CVecMap(b, static_cast<Eigen::Index>(filters));
}

void batch_to_time_major(const double* x, std::size_t batch, std::size_t steps, std::size_t width, Mat& tm) {
  tm.resize(static_cast<Eigen::Index>(batch * steps), static_cast<Eigen::Index>(width));
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < steps; ++t)
      std::copy_n(x + (b * steps + t) * width, width, tm.row(static_cast<Eigen::Index>(t * batch + b)).data());
}

void time_to_batch_major(const Mat& tm, std::size_t batch, std::size_t steps, double* out) {
  const auto width = static_cast<std::size_t>(tm.cols());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < steps; ++t)
      std::copy_n(tm.row(static_cast<Eigen::Index>(t * batch + b)).data(), width,
                  out + (b * steps + t) * width);
}

namespace {

// One batch row of one step. Gates arrive as pre-activations (i, f, g, o)
// and are replaced by their activations.
void cell_forward(double* __restrict gates, const double* __restrict c_prev, double* __restrict c,
                  double* __restrict tanh_c, double* __restrict h, std::size_t units) {
  double* __restrict gi = gates;
  double* __restrict gf = gates + units;
  double* __restrict gg = gates + 2 * units;
  double* __restrict go = gates + 3 * units;
  for (std::size_t u = 0; u < units; ++u) {
    const double i = vsigmoid(gi[u]);
    const double f = vsigmoid(gf[u]);
    const double g = vtanh(gg[u]);
    const double o = vsigmoid(go[u]);
    gi[u] = i;
    gf[u] = f;
    gg[u] = g;
    go[u] = o;
    const double cu = i * g + f * c_prev[u];
    const double tc = vtanh(cu);
    c[u] = cu;
    tanh_c[u] = tc;
    h[u] = o * tc;
  }
}

// Writes the gate pre-activation gradients for one batch row and carries the
// cell gradient backwards in place.
void cell_backward(const double* __restrict gates, const double* __restrict tanh_c,
                   const double* __restrict c_prev, const double* __restrict dh_out,
                   const double* __restrict dh_rec, double* __restrict dc_carry, double* __restrict dgates,
                   std::size_t units) {
  const double* __restrict gi = gates;
  const double* __restrict gf = gates + units;
  const double* __restrict gg = gates + 2 * units;
  const double* __restrict go = gates + 3 * units;
  double* __restrict di = dgates;
  double* __restrict df = dgates + units;
  double* __restrict dg = dgates + 2 * units;
  double* __restrict d_o = dgates + 3 * units;
  for (std::size_t u = 0; u < units; ++u) {
    const double i = gi[u], f = gf[u], g = gg[u], o = go[u], tc = tanh_c[u];
    const double dht = dh_out[u] + dh_rec[u];
    const double dc = dc_carry[u] + dht * o * (1.0 - tc * tc);
    di[u] = dc * g * i * (1.0 - i);
    df[u] = dc * c_prev[u] * f * (1.0 - f);
    dg[u] = dc * i * (1.0 - g * g);
    d_o[u] = dht * tc * o * (1.0 - o);
    dc_carry[u] = dc * f;
  }
}

}  // namespace

void lstm_forward(const double* x, std::size_t batch, std::size_t steps, std::size_t in,
                  std::size_t units, const double* w_in, const double* w_rec, const double* bias,
                  LstmTrace& trace) {
  const auto B = static_cast<Eigen::Index>(batch);
  const auto U = static_cast<Eigen::Index>(units);
  const auto rows = static_cast<Eigen::Index>(batch * steps);
  CMatMap Win(w_in, static_cast<Eigen::Index>(in), 4 * U);
  CMatMap Wrec(w_rec, U, 4 * U);

  trace.batch = batch;
  trace.steps = steps;
  trace.in = in;
  trace.units = units;
  batch_to_time_major(x, batch, steps, in, trace.x);
  trace.gates.resize(rows, 4 * U);
  trace.gates.noalias() = trace.x * Win;
  trace.gates.rowwise() += CVecMap(bias, 4 * U);
  trace.c.resize(rows, U);
  trace.tanh_c.resize(rows, U);
  trace.h.resize(rows, U);

  trace.zeros.setZero(U);

  for (std::size_t t = 0; t < steps; ++t) {
    const auto r0 = static_cast<Eigen::Index>(t * batch);
    if (t > 0) trace.gates.middleRows(r0, B).noalias() += trace.h.middleRows(r0 - B, B) * Wrec;
    for (Eigen::Index b = 0; b < B; ++b)
      cell_forward(trace.gates.row(r0 + b).data(),
                   t > 0 ? trace.c.row(r0 - B + b).data() : trace.zeros.data(), trace.c.row(r0 + b).data(),
                   trace.tanh_c.row(r0 + b).data(), trace.h.row(r0 + b).data(), units);
  }
}

void lstm_backward(LstmTrace& trace, const double* w_in, const double* w_rec, const Mat& dh,
                   double* g_in, double* g_rec, double* g_bias, Mat* dx) {
  const auto B = static_cast<Eigen::Index>(trace.batch);
  const auto U = static_cast<Eigen::Index>(trace.units);
  const auto D = static_cast<Eigen::Index>(trace.in);
  const auto T = static_cast<Eigen::Index>(trace.steps);
  CMatMap Win(w_in, D, 4 * U);
  CMatMap Wrec(w_rec, U, 4 * U);

  Mat& dG = trace.dG;
  Mat& dh_next = trace.dh_next;
  Mat& dc_next = trace.dc_next;
  dG.resize(T * B, 4 * U);
  dh_next.setZero(B, U);
  dc_next.setZero(B, U);
  trace.zeros.setZero(U);

  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const Eigen::Index r0 = t * B;
    for (Eigen::Index b = 0; b < B; ++b)
      cell_backward(trace.gates.row(r0 + b).data(), trace.tanh_c.row(r0 + b).data(),
                    t > 0 ? trace.c.row(r0 - B + b).data() : trace.zeros.data(), dh.row(r0 + b).data(),
                    dh_next.row(b).data(), dc_next.row(b).data(), dG.row(r0 + b).data(), trace.units);
    dh_next.noalias() = dG.middleRows(r0, B) * Wrec.transpose();
  }

  MatMap(g_in, D, 4 * U).noalias() += trace.x.transpose() * dG;
  if (T > 1)
    MatMap(g_rec, U, 4 * U).noalias() += trace.h.topRows((T - 1) * B).transpose() * dG.bottomRows((T - 1) * B);
  add_column_sums(dG.data(), static_cast<std::size_t>(T * B), 4 * trace.units, g_bias);
  if (dx) dx->noalias() = dG * Win.transpose();
}

void dropout_mask(double* mask, std::size_t n, double rate, Rng& rng) {
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < n; ++i) mask[i] = uniform01(rng) < rate ? 0.0 : keep_scale;
}

}  // namespace kernels

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw UsageError(what);
}

}  // namespace

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require(input.rank() == 2 && weights.rank() == 2 && bias.rank() == 1, "dense_forward: rank mismatch");
  require(input.dim(1) == weights.dim(0), "dense_forward: input width does not match weights");
  require(bias.dim(0) == weights.dim(1), "dense_forward: bias size does not match weights");
  Tensor out({input.dim(0), weights.dim(1)});
  kernels::dense(input.ptr(), input.dim(0), input.dim(1), weights.ptr(), bias.ptr(), weights.dim(1), out.ptr());
  return out;
}

Tensor conv1d_forward(const Tensor& input, const Tensor& filters, const Tensor& bias) {
  require(input.rank() == 3 && input.dim(2) == 1, "conv1d_forward: input must be (batch x L x 1)");
  require(filters.rank() == 2 && bias.rank() == 1 && bias.dim(0) == filters.dim(0),
          "conv1d_forward: filters must be (F x K) with bias (F)");
  if (input.dim(1) < filters.dim(1)) throw UsageError("conv1d_forward: window shorter than kernel");
  const std::size_t batch = input.dim(0), steps = input.dim(1) - filters.dim(1) + 1;
  Tensor out({batch, steps, filters.dim(0)});
  kernels::Mat patches;
  kernels::im2col(input.ptr(), batch, input.dim(1), filters.dim(1), patches);
  kernels::conv1d(patches, filters.ptr(), bias.ptr(), filters.dim(0), out.ptr());
  return out;
}

Tensor lstm_forward(const Tensor& input, const LstmWeights& weights, bool return_sequence) {
  require(input.rank() == 3, "lstm_forward: input must be (batch x T x D)");
  require(weights.recurrent.rank() == 2 && weights.kernel.rank() == 2 && weights.bias.rank() == 1,
          "lstm_forward: weight rank mismatch");
  const std::size_t units = weights.recurrent.dim(0);
  require(weights.recurrent.dim(1) == 4 * units && weights.kernel.dim(1) == 4 * units &&
              weights.bias.dim(0) == 4 * units,
          "lstm_forward: gate dimensions must be 4 x units");
  require(weights.kernel.dim(0) == input.dim(2), "lstm_forward: input width does not match kernel");

  const std::size_t batch = input.dim(0), steps = input.dim(1);
  kernels::LstmTrace trace;
  kernels::lstm_forward(input.ptr(), batch, steps, input.dim(2), units, weights.kernel.ptr(),
                        weights.recurrent.ptr(), weights.bias.ptr(), trace);
  if (return_sequence) {
    Tensor out({batch, steps, units});
    kernels::time_to_batch_major(trace.h, batch, steps, out.ptr());
    return out;
  }
  Tensor out({batch, units});
  kernels::MatMap(out.ptr(), static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(units)) =
      trace.h.bottomRows(static_cast<Eigen::Index>(batch));
  return out;
}

Tensor dropout(const Tensor& input, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
  if (mode == Mode::infer || rate == 0.0) return input;
  Tensor out = input;
  std::vector<double> mask(input.size());
  kernels::dropout_mask(mask.data(), mask.size(), rate, rng);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> labels) {
  if (probs.size() != labels.size()) throw UsageError("bce_loss: length mismatch");
  if (probs.empty()) throw UsageError("bce_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kBceEpsilon, 1.0 - kBceEpsilon);
    sum -= labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

}  // namespace sigmove::nn
