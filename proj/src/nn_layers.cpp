#include "inkmotion/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "inkmotion/kernels.hpp"
#include "inkmotion/rng.hpp"

namespace inkmotion::nn {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// batch view: [d] -> (1, d); [B, d] -> (B, d)
std::pair<std::size_t, std::size_t> as_rows(const Tensor& x) {
  check(x.ndim() == 1 || x.ndim() == 2, "expected 1- or 2-d tensor, got " + x.shape_str());
  if (x.ndim() == 1) return {1, x.shape[0]};
  return {x.shape[0], x.shape[1]};
}

constexpr std::size_t kParallelCutoff = 1 << 14;

template <class F>
void elementwise(const Tensor& in, Tensor& out, F f) {
  const std::size_t n = in.numel();
  if (n >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) out.data[i] = f(in.data[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.data[i] = f(in.data[i]);
  }
}

}  // namespace

Tensor dense_forward(const DenseLayer& layer, const Tensor& x) {
  const auto [rows, in] = as_rows(x);
  const std::size_t out_dim = layer.W.shape[0];
  check(layer.W.ndim() == 2 && layer.W.shape[1] == in,
        "dense_forward: W " + layer.W.shape_str() + " does not accept input " + x.shape_str());
  check(layer.b.numel() == out_dim, "dense_forward: bias shape mismatch");
  Tensor y(x.ndim() == 1 ? std::vector<std::size_t>{out_dim}
                         : std::vector<std::size_t>{rows, out_dim});
  kernels::gemm_nt(x.data.data(), layer.W.data.data(), y.data.data(), rows, out_dim, in);
  kernels::add_bias_rows(y.data.data(), layer.b.data.data(), rows, out_dim);
  return y;
}

DenseGrads dense_backward(const DenseLayer& layer, const Tensor& x,
                          const Tensor& grad_out) {
  const auto [rows, in] = as_rows(x);
  const auto [grows, out_dim] = as_rows(grad_out);
  check(grows == rows && out_dim == layer.W.shape[0] && in == layer.W.shape[1],
        "dense_backward: shape mismatch");
  DenseGrads g;
  g.x = Tensor(x.shape);
  kernels::gemm_nn(grad_out.data.data(), layer.W.data.data(), g.x.data.data(),
                   rows, in, out_dim);
  g.W = Tensor(layer.W.shape);
  kernels::gemm_tn(grad_out.data.data(), x.data.data(), g.W.data.data(),
                   out_dim, in, rows);
  g.b = Tensor(layer.b.shape);
  kernels::col_sums(grad_out.data.data(), g.b.data.data(), rows, out_dim);
  return g;
}

namespace {

// shapes: x [B,C,L] flattened views; batch=1 covers the 2-d case
struct ConvView {
  std::size_t batch, ch, len;
  bool batched;
};

ConvView conv_view(const Tensor& x) {
  check(x.ndim() == 2 || x.ndim() == 3, "conv1d: expected [C,L] or [B,C,L], got " + x.shape_str());
  if (x.ndim() == 2) return {1, x.shape[0], x.shape[1], false};
  return {x.shape[0], x.shape[1], x.shape[2], true};
}

}  // namespace

Tensor conv1d_forward(const Conv1dLayer& layer, const Tensor& x) {
  const ConvView v = conv_view(x);
  const std::size_t oc = layer.kernels.shape[0], ic = layer.kernels.shape[1];
  check(layer.kernels.ndim() == 3 && layer.kernels.shape[2] == 3,
        "conv1d: kernels must be [out_ch x in_ch x 3]");
  check(ic == v.ch, "conv1d_forward: input has " + std::to_string(v.ch) +
                        " channels, kernels expect " + std::to_string(ic));
  const std::size_t L = v.len;
  Tensor y(v.batched ? std::vector<std::size_t>{v.batch, oc, L}
                     : std::vector<std::size_t>{oc, L});
  const std::size_t tasks = v.batch * oc;
#pragma omp parallel for schedule(static) if (tasks > 1)
  for (std::size_t t = 0; t < tasks; ++t) {
    const std::size_t s = t / oc, o = t % oc;
    double* __restrict yrow = y.data.data() + (s * oc + o) * L;
    std::fill(yrow, yrow + L, layer.bias(o));
    for (std::size_t c = 0; c < ic; ++c) {
      const double* __restrict xrow = x.data.data() + (s * ic + c) * L;
      const double k0 = layer.kernels(o, c, 0);
      const double k1 = layer.kernels(o, c, 1);
      const double k2 = layer.kernels(o, c, 2);
      for (std::size_t p = 1; p < L; ++p) yrow[p] += k0 * xrow[p - 1];
      for (std::size_t p = 0; p < L; ++p) yrow[p] += k1 * xrow[p];
      for (std::size_t p = 0; p + 1 < L; ++p) yrow[p] += k2 * xrow[p + 1];
    }
  }
  return y;
}

Conv1dGrads conv1d_backward(const Conv1dLayer& layer, const Tensor& x,
                            const Tensor& grad_out, bool need_grad_x) {
  const ConvView v = conv_view(x);
  const ConvView gv = conv_view(grad_out);
  const std::size_t oc = layer.kernels.shape[0], ic = layer.kernels.shape[1];
  check(gv.batch == v.batch && gv.ch == oc && gv.len == v.len,
        "conv1d_backward: grad shape mismatch");
  const std::size_t L = v.len;

  Conv1dGrads g;
  g.kernels = Tensor(layer.kernels.shape);
  g.bias = Tensor(layer.bias.shape);

  if (need_grad_x) {
    g.x = Tensor(x.shape);
    const std::size_t tasks = v.batch * ic;
#pragma omp parallel for schedule(static) if (tasks > 1)
    for (std::size_t t = 0; t < tasks; ++t) {
      const std::size_t s = t / ic, c = t % ic;
      double* __restrict gx = g.x.data.data() + (s * ic + c) * L;
      for (std::size_t o = 0; o < oc; ++o) {
        const double* __restrict go = grad_out.data.data() + (s * oc + o) * L;
        const double k0 = layer.kernels(o, c, 0);
        const double k1 = layer.kernels(o, c, 1);
        const double k2 = layer.kernels(o, c, 2);
        for (std::size_t q = 0; q + 1 < L; ++q) gx[q] += k0 * go[q + 1];
        for (std::size_t q = 0; q < L; ++q) gx[q] += k1 * go[q];
        for (std::size_t q = 1; q < L; ++q) gx[q] += k2 * go[q - 1];
      }
    }
  }

#pragma omp parallel for schedule(static) if (oc > 1)
  for (std::size_t o = 0; o < oc; ++o) {
    double gb = 0;
    for (std::size_t s = 0; s < v.batch; ++s) {
      const double* __restrict go = grad_out.data.data() + (s * oc + o) * L;
      for (std::size_t p = 0; p < L; ++p) gb += go[p];
      for (std::size_t c = 0; c < ic; ++c) {
        const double* __restrict xrow = x.data.data() + (s * ic + c) * L;
        double gk0 = 0, gk1 = 0, gk2 = 0;
        for (std::size_t p = 1; p < L; ++p) gk0 += go[p] * xrow[p - 1];
        for (std::size_t p = 0; p < L; ++p) gk1 += go[p] * xrow[p];
        for (std::size_t p = 0; p + 1 < L; ++p) gk2 += go[p] * xrow[p + 1];
        g.kernels(o, c, 0) += gk0;
        g.kernels(o, c, 1) += gk1;
        g.kernels(o, c, 2) += gk2;
      }
    }
    g.bias(o) = gb;
  }
  return g;
}

Tensor maxpool1d_forward(const Tensor& x, std::vector<std::int32_t>* argmax) {
  const ConvView v = conv_view(x);
  const std::size_t L = v.len;
  Tensor y(x.shape);
  if (argmax) argmax->assign(x.numel(), -1);
  const std::size_t rows = v.batch * v.ch;
#pragma omp parallel for schedule(static) if (rows > 1)
  for (std::size_t r = 0; r < rows; ++r) {
    const double* __restrict xr = x.data.data() + r * L;
    double* __restrict yr = y.data.data() + r * L;
    std::int32_t* am = argmax ? argmax->data() + r * L : nullptr;
    for (std::size_t p = 0; p + 1 < L; ++p) {
      // tie goes to the earlier index
      if (xr[p] >= xr[p + 1]) {
        yr[p] = xr[p];
        if (am) am[p] = static_cast<std::int32_t>(p);
      } else {
        yr[p] = xr[p + 1];
        if (am) am[p] = static_cast<std::int32_t>(p + 1);
      }
    }
    // right zero pad; the pad wins only when strictly larger
    if (xr[L - 1] >= 0.0) {
      yr[L - 1] = xr[L - 1];
      if (am) am[L - 1] = static_cast<std::int32_t>(L - 1);
    } else {
      yr[L - 1] = 0.0;
      if (am) am[L - 1] = -1;
    }
  }
  return y;
}

Tensor maxpool1d_backward(const Tensor& grad_out,
                          const std::vector<std::int32_t>& argmax,
                          const std::vector<std::size_t>& x_shape) {
  check(grad_out.numel() == argmax.size(), "maxpool1d_backward: argmax size mismatch");
  Tensor gx{std::vector<std::size_t>(x_shape)};
  check(gx.numel() == grad_out.numel(), "maxpool1d_backward: shape mismatch");
  const std::size_t L = x_shape.back();
  const std::size_t rows = gx.numel() / L;
#pragma omp parallel for schedule(static) if (rows > 1)
  for (std::size_t r = 0; r < rows; ++r) {
    const double* __restrict go = grad_out.data.data() + r * L;
    const std::int32_t* am = argmax.data() + r * L;
    double* __restrict g = gx.data.data() + r * L;
    for (std::size_t p = 0; p < L; ++p)
      if (am[p] >= 0) g[am[p]] += go[p];
  }
  return gx;
}

Tensor relu_forward(const Tensor& x) {
  Tensor y(x.shape);
  elementwise(x, y, [](double v) { return v > 0 ? v : 0.0; });
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& grad_out) {
  check(x.same_shape(grad_out), "relu_backward: shape mismatch");
  Tensor g(x.shape);
  const std::size_t n = x.numel();
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
  for (std::size_t i = 0; i < n; ++i)
    g.data[i] = x.data[i] > 0 ? grad_out.data[i] : 0.0;
  return g;
}

Tensor sigmoid_forward(const Tensor& x) {
  Tensor y(x.shape);
  elementwise(x, y, [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& grad_out) {
  check(y.same_shape(grad_out), "sigmoid_backward: shape mismatch");
  Tensor g(y.shape);
  for (std::size_t i = 0; i < y.numel(); ++i)
    g.data[i] = grad_out.data[i] * y.data[i] * (1.0 - y.data[i]);
  return g;
}

Tensor tanh_forward(const Tensor& x) {
  Tensor y(x.shape);
  elementwise(x, y, [](double v) { return std::tanh(v); });
  return y;
}

Tensor tanh_backward(const Tensor& y, const Tensor& grad_out) {
  check(y.same_shape(grad_out), "tanh_backward: shape mismatch");
  Tensor g(y.shape);
  for (std::size_t i = 0; i < y.numel(); ++i)
    g.data[i] = grad_out.data[i] * (1.0 - y.data[i] * y.data[i]);
  return g;
}

LossAndGrad softmax_cross_entropy(const Tensor& logits, const Tensor& target) {
  check(logits.ndim() == 1 && target.same_shape(logits),
        "softmax_cross_entropy: expected matching 1-d tensors");
  int target_idx = -1;
  for (std::size_t i = 0; i < target.numel(); ++i) {
    if (target.data[i] == 1.0) {
      check(target_idx < 0, "softmax_cross_entropy: target not one-hot");
      target_idx = static_cast<int>(i);
    } else {
      check(target.data[i] == 0.0, "softmax_cross_entropy: target not one-hot");
    }
  }
  check(target_idx >= 0, "softmax_cross_entropy: target not one-hot");

  const std::size_t c = logits.numel();
  LossAndGrad out;
  out.grad = Tensor(logits.shape);
  const double m = *std::max_element(logits.data.begin(), logits.data.end());
  double sum = 0;
  for (std::size_t i = 0; i < c; ++i) sum += std::exp(logits.data[i] - m);
  const double lse = m + std::log(sum);
  out.loss = lse - logits.data[target_idx];
  for (std::size_t i = 0; i < c; ++i)
    out.grad.data[i] = std::exp(logits.data[i] - m) / sum;
  out.grad.data[target_idx] -= 1.0;
  return out;
}

LossAndGrad softmax_cross_entropy_batch(const Tensor& logits,
                                        const std::vector<int>& labels) {
  check(logits.ndim() == 2 && logits.shape[0] == labels.size(),
        "softmax_cross_entropy_batch: logits/labels mismatch");
  const std::size_t b = logits.shape[0], c = logits.shape[1];
  LossAndGrad out;
  out.grad = Tensor(logits.shape);
  std::vector<double> row_loss(b);
#pragma omp parallel for schedule(static) if (b > 8)
  for (std::size_t s = 0; s < b; ++s) {
    const double* row = logits.data.data() + s * c;
    double* grow = out.grad.data.data() + s * c;
    const double m = *std::max_element(row, row + c);
    double sum = 0;
    for (std::size_t i = 0; i < c; ++i) sum += std::exp(row[i] - m);
    const double lse = m + std::log(sum);
    row_loss[s] = lse - row[labels[s]];
    for (std::size_t i = 0; i < c; ++i) grow[i] = std::exp(row[i] - m) / sum;
    grow[labels[s]] -= 1.0;
  }
  double total = 0;
  for (double l : row_loss) total += l;  // fixed order
  out.loss = total;
  return out;
}

std::pair<double, std::vector<Tensor>> l2_penalty(
    const std::vector<const Tensor*>& params, double lambda) {
  check(lambda >= 0, "l2_penalty: lambda must be >= 0");
  double loss = 0;
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (const Tensor* p : params) {
    Tensor g(p->shape);
    loss += l2_accumulate(*p, lambda, g);
    grads.push_back(std::move(g));
  }
  return {loss, std::move(grads)};
}

double l2_accumulate(const Tensor& W, double lambda, Tensor& grad) {
  check(grad.same_shape(W), "l2_accumulate: grad shape mismatch");
  const std::size_t n = W.numel();
  constexpr std::size_t kBlock = 1 << 16;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::size_t bi = 0; bi < blocks; ++bi) {
    const std::size_t lo = bi * kBlock, hi = std::min(lo + kBlock, n);
    double s = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      s += W.data[i] * W.data[i];
      grad.data[i] += 2.0 * lambda * W.data[i];
    }
    partial[bi] = s;
  }
  double sq = 0;
  for (double p : partial) sq += p;  // fixed order
  return lambda * sq;
}

void AdamState::init(const std::vector<Tensor*>& params, const AdamConfig& c) {
  cfg = c;
  t = 0;
  m.clear();
  v.clear();
  for (const Tensor* p : params) {
    m.emplace_back(p->shape);
    v.emplace_back(p->shape);
  }
}

void adam_step(AdamState& state, const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads,
               const std::vector<std::string>& names) {
  check(params.size() == grads.size() && params.size() == state.m.size(),
        "adam_step: parameter/gradient count mismatch");
  state.t += 1;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t p = 0; p < params.size(); ++p) {
    check(params[p]->same_shape(*grads[p]), "adam_step: shape mismatch");
    if (!grads[p]->all_finite()) {
      const std::string name =
          p < names.size() ? names[p] : "param[" + std::to_string(p) + "]";
      throw std::runtime_error("adam_step: non-finite gradient in " + name);
    }
    double* __restrict w = params[p]->data.data();
    double* __restrict mm = state.m[p].data.data();
    double* __restrict vv = state.v[p].data.data();
    const double* __restrict g = grads[p]->data.data();
    const std::size_t n = params[p]->numel();
    const double lr = state.cfg.learning_rate, eps = state.cfg.epsilon;
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::size_t i = 0; i < n; ++i) {
      mm[i] = b1 * mm[i] + (1.0 - b1) * g[i];
      vv[i] = b2 * vv[i] + (1.0 - b2) * g[i] * g[i];
      const double mhat = mm[i] / bc1;
      const double vhat = vv[i] / bc2;
      w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

double grad_check(const std::function<double()>& loss_fn,
                  const std::vector<Tensor*>& params,
                  const std::vector<const Tensor*>& analytic, double eps,
                  std::size_t max_coords_per_tensor, std::uint64_t seed,
                  double min_grad_magnitude) {
  check(eps > 0, "grad_check: eps must be positive");
  check(params.size() == analytic.size(), "grad_check: size mismatch");
  double max_rel = 0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& theta = *params[p];
    const Tensor& a = *analytic[p];
    const std::size_t n = theta.numel();
    if (n == 0) continue;

    std::vector<std::size_t> coords;
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(a.data[i]) > std::abs(a.data[best])) best = i;
    coords.push_back(best);
    std::mt19937_64 rng = make_engine(seed, {p});
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t tries = 0;
         tries < 8 * max_coords_per_tensor && coords.size() < max_coords_per_tensor;
         ++tries) {
      const std::size_t i = pick(rng);
      if (std::abs(a.data[i]) < min_grad_magnitude) continue;
      if (std::find(coords.begin(), coords.end(), i) != coords.end()) continue;
      coords.push_back(i);
    }

    for (std::size_t i : coords) {
      if (std::abs(a.data[i]) < min_grad_magnitude) continue;
      const double saved = theta.data[i];
      theta.data[i] = saved + eps;
      const double f_plus = loss_fn();
      theta.data[i] = saved - eps;
      const double f_minus = loss_fn();
      theta.data[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double denom = std::max({std::abs(a.data[i]), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(a.data[i] - numeric) / denom);
    }
  }
  return max_rel;
}

void xavier_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                    std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (auto& v : t.data) v = u(rng);
}

std::vector<int> argmax_rows(const Tensor& logits) {
  const auto [rows, c] = as_rows(logits);
  std::vector<int> out(rows);
  for (std::size_t s = 0; s < rows; ++s) {
    const double* row = logits.data.data() + s * c;
    out[s] = static_cast<int>(std::max_element(row, row + c) - row);
  }
  return out;
}

}  // namespace inkmotion::nn
