#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigmove/nn/ops.hpp"
#include "sigmove/seed.hpp"

namespace oracle {

namespace {

double sigm(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(SIGMOVE_FIXTURE_DIR) / name; }

Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t batch = x.dim(0), in = x.dim(1), out = w.dim(1);
  Tensor y({batch, out});
  for (std::size_t i = 0; i < batch; ++i)
    for (std::size_t j = 0; j < out; ++j) {
      double s = b[j];
      for (std::size_t k = 0; k < in; ++k) s += x(i, k) * w(k, j);
      y(i, j) = s;
    }
  return y;
}

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t batch = x.dim(0), length = x.dim(1), filters = w.dim(0), kernel = w.dim(1);
  const std::size_t steps = length - kernel + 1;
  Tensor y({batch, steps, filters});
  for (std::size_t i = 0; i < batch; ++i)
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t f = 0; f < filters; ++f) {
        double s = b[f];
        for (std::size_t k = 0; k < kernel; ++k) s += x(i, t + k, 0) * w(f, k);
        y(i, t, f) = s;
      }
  return y;
}

Tensor lstm(const Tensor& x, const Tensor& kernel, const Tensor& recurrent, const Tensor& bias,
            bool return_sequence) {
  const std::size_t batch = x.dim(0), steps = x.dim(1), in = x.dim(2), units = recurrent.dim(0);
  Tensor out = return_sequence ? Tensor({batch, steps, units}) : Tensor({batch, units});
  for (std::size_t s = 0; s < batch; ++s) {
    std::vector<double> h(units, 0.0), c(units, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      std::vector<double> z(4 * units);
      for (std::size_t j = 0; j < 4 * units; ++j) {
        double v = bias[j];
        for (std::size_t d = 0; d < in; ++d) v += x(s, t, d) * kernel(d, j);
        for (std::size_t u = 0; u < units; ++u) v += h[u] * recurrent(u, j);
        z[j] = v;
      }
      for (std::size_t u = 0; u < units; ++u) {
        const double i = sigm(z[u]);
        const double f = sigm(z[units + u]);
        const double g = std::tanh(z[2 * units + u]);
        const double o = sigm(z[3 * units + u]);
        c[u] = f * c[u] + i * g;
        h[u] = o * std::tanh(c[u]);
      }
      if (return_sequence)
        for (std::size_t u = 0; u < units; ++u) out(s, t, u) = h[u];
    }
    if (!return_sequence)
      for (std::size_t u = 0; u < units; ++u) out(s, u) = h[u];
  }
  return out;
}

Tensor network_logits(const sigmove::nn::NetworkSpec& spec, const sigmove::nn::Params& params,
                      const Tensor& input) {
  using sigmove::nn::LayerType;
  Tensor x = input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const std::string p = "L" + std::to_string(i) + ".";
    switch (l.type) {
      case LayerType::dense:
        x = dense(x, params.tensor(p + "kernel"), params.tensor(p + "bias"));
        break;
      case LayerType::conv1d:
        x = conv1d(x, params.tensor(p + "kernel"), params.tensor(p + "bias"));
        break;
      case LayerType::flatten:
        x = x.reshaped({x.dim(0), x.size() / x.dim(0)});
        break;
      case LayerType::dropout:
        break;
      case LayerType::lstm:
        x = lstm(x, params.tensor(p + "kernel"), params.tensor(p + "recurrent"), params.tensor(p + "bias"),
                 l.return_sequence);
        break;
    }
    if (l.relu)
      for (double& v : x.data()) v = std::max(v, 0.0);
  }
  return x;
}

std::vector<double> finite_difference_gradient(const sigmove::nn::NetworkSpec& spec, sigmove::nn::Params params,
                                               const Tensor& input, std::span<const std::uint8_t> labels,
                                               std::uint64_t dropout_seed, double step) {
  std::vector<double> grad(params.count());
  for (std::size_t k = 0; k < params.count(); ++k) {
    const double saved = params.values[k];
    params.values[k] = saved + step;
    const double up = sigmove::nn::loss_at(spec, params, input, labels, dropout_seed);
    params.values[k] = saved - step;
    const double down = sigmove::nn::loss_at(spec, params, input, labels, dropout_seed);
    params.values[k] = saved;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

namespace {

using Ld = long double;

struct Act {
  std::vector<std::size_t> shape;
  std::vector<Ld> v;
};

Ld sigm_l(Ld z) { return 1.0L / (1.0L + std::exp(-z)); }

}  // namespace

long double extended_loss(const sigmove::nn::NetworkSpec& spec, const std::vector<double>& params,
                          const Tensor& input, std::span<const std::uint8_t> labels, std::uint64_t dropout_seed) {
  using sigmove::nn::LayerType;
  const auto layout = sigmove::nn::param_layout(spec);
  auto block = [&](std::size_t layer, const std::string& suffix) {
    const std::string name = "L" + std::to_string(layer) + "." + suffix;
    for (const auto& b : layout)
      if (b.name == name) return params.data() + b.offset;
    throw std::invalid_argument("missing block " + name);
  };
  sigmove::Rng rng = sigmove::make_rng(dropout_seed);
  const std::size_t batch = input.dim(0);
  Act a{std::vector<std::size_t>(input.shape().begin(), input.shape().end()), {}};
  for (double x : input.data()) a.v.push_back(x);

  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    Act out;
    switch (l.type) {
      case LayerType::dense: {
        const std::size_t in = a.shape[1];
        const double* w = block(i, "kernel");
        const double* b = block(i, "bias");
        out.shape = {batch, l.units};
        out.v.assign(batch * l.units, 0.0L);
        for (std::size_t s = 0; s < batch; ++s)
          for (std::size_t j = 0; j < l.units; ++j) {
            Ld z = b[j];
            for (std::size_t k = 0; k < in; ++k) z += a.v[s * in + k] * static_cast<Ld>(w[k * l.units + j]);
            out.v[s * l.units + j] = z;
          }
        break;
      }
      case LayerType::conv1d: {
        const std::size_t length = a.shape[1], steps = length - l.kernel + 1;
        const double* w = block(i, "kernel");
        const double* b = block(i, "bias");
        out.shape = {batch, steps, l.units};
        out.v.assign(batch * steps * l.units, 0.0L);
        for (std::size_t s = 0; s < batch; ++s)
          for (std::size_t t = 0; t < steps; ++t)
            for (std::size_t f = 0; f < l.units; ++f) {
              Ld z = b[f];
              for (std::size_t k = 0; k < l.kernel; ++k)
                z += a.v[s * length + t + k] * static_cast<Ld>(w[f * l.kernel + k]);
              out.v[(s * steps + t) * l.units + f] = z;
            }
        break;
      }
      case LayerType::flatten:
        out.shape = {batch, a.v.size() / batch};
        out.v = a.v;
        break;
      case LayerType::dropout:
        out = a;
        if (l.rate > 0.0)
          for (auto& x : out.v) x *= sigmove::uniform01(rng) < l.rate ? 0.0L : 1.0L / (1.0L - l.rate);
        break;
      case LayerType::lstm: {
        const std::size_t steps = a.shape[1], in = a.shape[2], u = l.units;
        const double* wk = block(i, "kernel");
        const double* wr = block(i, "recurrent");
        const double* bias = block(i, "bias");
        out.shape = l.return_sequence ? std::vector<std::size_t>{batch, steps, u} : std::vector<std::size_t>{batch, u};
        out.v.assign(l.return_sequence ? batch * steps * u : batch * u, 0.0L);
        for (std::size_t s = 0; s < batch; ++s) {
          std::vector<Ld> h(u, 0.0L), c(u, 0.0L), z(4 * u);
          for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t j = 0; j < 4 * u; ++j) {
              Ld acc = bias[j];
              for (std::size_t d = 0; d < in; ++d) acc += a.v[(s * steps + t) * in + d] * static_cast<Ld>(wk[d * 4 * u + j]);
              for (std::size_t r = 0; r < u; ++r) acc += h[r] * static_cast<Ld>(wr[r * 4 * u + j]);
              z[j] = acc;
            }
            for (std::size_t r = 0; r < u; ++r) {
              const Ld ig = sigm_l(z[r]), fg = sigm_l(z[u + r]), gg = std::tanh(z[2 * u + r]), og = sigm_l(z[3 * u + r]);
              c[r] = fg * c[r] + ig * gg;
              h[r] = og * std::tanh(c[r]);
            }
            if (l.return_sequence)
              for (std::size_t r = 0; r < u; ++r) out.v[(s * steps + t) * u + r] = h[r];
          }
          if (!l.return_sequence)
            for (std::size_t r = 0; r < u; ++r) out.v[s * u + r] = h[r];
        }
        break;
      }
    }
    if (l.relu)
      for (auto& x : out.v) x = std::max(x, 0.0L);
    a = std::move(out);
  }

  const Ld eps = 1e-7L;
  Ld sum = 0.0L;
  for (std::size_t s = 0; s < batch; ++s) {
    const Ld p = std::clamp(sigm_l(a.v[s]), eps, 1.0L - eps);
    sum -= labels[s] ? std::log(p) : std::log(1.0L - p);
  }
  return sum / static_cast<Ld>(batch);
}

double extended_central_difference(const sigmove::nn::NetworkSpec& spec, const sigmove::nn::Params& params,
                                   const Tensor& input, std::span<const std::uint8_t> labels,
                                   std::uint64_t dropout_seed, std::size_t k, double step) {
  std::vector<double> v = params.values;
  const double up = v[k] + step, down = v[k] - step;
  v[k] = up;
  const Ld loss_up = extended_loss(spec, v, input, labels, dropout_seed);
  v[k] = down;
  const Ld loss_down = extended_loss(spec, v, input, labels, dropout_seed);
  return static_cast<double>((loss_up - loss_down) / (static_cast<Ld>(up) - static_cast<Ld>(down)));
}

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::fabs(analytic), std::fabs(numeric), floor});
  return std::fabs(analytic - numeric) / scale;
}

namespace {

struct Frac {
  long long num;
  long long den;
};

bool greater(const Frac& a, const Frac& b) { return a.num * b.den > b.num * a.den; }

Frac purity(const std::vector<std::size_t>& left, const std::vector<std::size_t>& right,
            std::span<const std::uint8_t> y) {
  auto part = [&](const std::vector<std::size_t>& rows) {
    long long pos = 0;
    for (auto r : rows) pos += y[r];
    const long long n = static_cast<long long>(rows.size());
    return Frac{pos * pos + (n - pos) * (n - pos), n};
  };
  const Frac l = part(left), r = part(right);
  if (right.empty()) return l;
  return {l.num * r.den + r.num * l.den, l.den * r.den};
}

int grow(const sigmove::FeatureMatrix& x, std::span<const std::uint8_t> y, const std::vector<std::size_t>& rows,
         std::vector<CartNode>& out) {
  const int index = static_cast<int>(out.size());
  out.emplace_back();
  std::size_t pos = 0;
  for (auto r : rows) pos += y[r];
  out[index].count = rows.size();
  out[index].positive_fraction = static_cast<double>(pos) / static_cast<double>(rows.size());
  if (pos == 0 || pos == rows.size() || rows.size() < 2) return index;

  Frac best = purity(rows, {}, y);
  bool found = false;
  std::size_t best_f = 0;
  double best_t = 0.0;
  for (std::size_t f = 0; f < x.cols; ++f) {
    std::vector<double> values;
    for (auto r : rows) values.push_back(x(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = (values[k] + values[k + 1]) / 2.0;
      std::vector<std::size_t> left, right;
      for (auto r : rows) (x(r, f) <= t ? left : right).push_back(r);
      const Frac score = purity(left, right, y);
      if (greater(score, best)) {
        best = score;
        best_f = f;
        best_t = t;
        found = true;
      }
    }
  }
  if (!found) return index;
  std::vector<std::size_t> left, right;
  for (auto r : rows) (x(r, best_f) <= best_t ? left : right).push_back(r);
  out[index].leaf = false;
  out[index].feature = best_f;
  out[index].threshold = best_t;
  const int l = grow(x, y, left, out);
  const int r = grow(x, y, right, out);
  out[index].left = l;
  out[index].right = r;
  return index;
}

bool same_node(const sigmove::DecisionTree& tree, std::size_t a, const std::vector<CartNode>& ref, int b) {
  const auto& n = tree.nodes.at(a);
  const auto& m = ref.at(static_cast<std::size_t>(b));
  if (n.is_leaf() != m.leaf || n.sample_count != m.count || n.positive_fraction != m.positive_fraction)
    return false;
  if (n.is_leaf()) return true;
  return n.feature == m.feature && n.threshold == m.threshold && same_node(tree, n.left, ref, m.left) &&
         same_node(tree, n.right, ref, m.right);
}

}  // namespace

std::vector<CartNode> cart(const sigmove::FeatureMatrix& x, std::span<const std::uint8_t> y) {
  std::vector<std::size_t> rows(x.rows);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<CartNode> out;
  grow(x, y, rows, out);
  return out;
}

bool same_tree(const sigmove::DecisionTree& tree, const std::vector<CartNode>& ref) {
  return tree.nodes.size() == ref.size() && same_node(tree, 0, ref, 0);
}

double pairwise_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  if (pairs == 0) throw std::invalid_argument("pairwise_auc needs both classes");
  return wins / static_cast<double>(pairs);
}

double sample_sd(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
