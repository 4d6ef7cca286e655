#pragma once

// Batched layer kernels shared by the public ops and the network layers.
// Matrices are row-major; sequences inside the LSTM are kept time-major
// (row t*B + b) so each step touches one contiguous block.

#include <Eigen/Dense>
#include <bit>
#include <cstddef>
#include <cstdint>

#include "sigmove/seed.hpp"

namespace sigmove::nn::kernels {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<Mat>;
using CMatMap = Eigen::Map<const Mat>;
using CVecMap = Eigen::Map<const Eigen::RowVectorXd>;
using VecMap = Eigen::Map<Eigen::RowVectorXd>;

// exp() written so the compiler can vectorize loops that call it; accurate
// to about one ulp over the clamped range [-708, 708].
inline double vexp(double x) {
  x = x < -708.0 ? -708.0 : x;
  x = x > 708.0 ? 708.0 : x;
  constexpr double shifter = 0x1.8p52;
  const double t = x * 1.4426950408889634 + shifter;
  const double k = t - shifter;
  const double r = (x - k * 0.6931471805598903) - k * 5.497923018708371e-14;
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::uint64_t bits = (std::bit_cast<std::uint64_t>(t) + 1023) << 52;
  return p * std::bit_cast<double>(bits);
}

// out[c] += sum_r m(r, c), rows added in order. Eigen's reductions peel by
// address alignment, which makes the last bits depend on where the heap put
// the buffer.
inline void add_column_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[c] += m[r * cols + c];
}

inline double vsigmoid(double x) { return 1.0 / (1.0 + vexp(-x)); }
inline double vtanh(double x) { return 1.0 - 2.0 / (vexp(2.0 * x) + 1.0); }

// y = x W + b. x: batch x in, W: in x out.
void dense(const double* x, std::size_t batch, std::size_t in, const double* w, const double* b,
           std::size_t out, double* y);

// Patches (batch*T x K) of a single-channel sequence (batch x L).
void im2col(const double* x, std::size_t batch, std::size_t length, std::size_t kernel, Mat& patches);

// y (batch*T x F) = patches W^T + b. W: F x K.
void conv1d(const Mat& patches, const double* w, const double* b, std::size_t filters, double* y);

struct LstmTrace {
  std::size_t batch = 0, steps = 0, in = 0, units = 0;
  Mat x;       // (T*B) x D
  Mat gates;   // (T*B) x 4U, activated
  Mat c;       // (T*B) x U
  Mat tanh_c;  // (T*B) x U
  Mat h;       // (T*B) x U
  // backward scratch
  Mat dG, dh_next, dc_next;
  Eigen::RowVectorXd zeros;
};

// x is batch-major (batch x T x D).
void lstm_forward(const double* x, std::size_t batch, std::size_t steps, std::size_t in,
                  std::size_t units, const double* w_in, const double* w_rec, const double* bias,
                  LstmTrace& trace);

// dh: (T*B) x U time-major gradient wrt every hidden output. Accumulates into
// the parameter gradients; writes dx (time-major, (T*B) x D) when non-null.
void lstm_backward(LstmTrace& trace, const double* w_in, const double* w_rec, const Mat& dh,
                   double* g_in, double* g_rec, double* g_bias, Mat* dx);

void batch_to_time_major(const double* x, std::size_t batch, std::size_t steps, std::size_t width, Mat& tm);
void time_to_batch_major(const Mat& tm, std::size_t batch, std::size_t steps, double* out);

// Inverted-dropout keep mask scaled by 1/(1-rate).
void dropout_mask(double* mask, std::size_t n, double rate, Rng& rng);

}  // namespace sigmove::nn::kernels
