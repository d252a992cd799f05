#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "inkmotion/nn/tensor.hpp"

// Layer forward/backward primitives. Every op accepts either a single sample
// or a leading batch dimension; backward passes are exact analytic
// derivatives, checked against central finite differences in the tests.
// Single-sample calls run serially; batch-level parallelism never changes
// results (see kernels.hpp determinism contract).

namespace inkmotion::nn {

struct DenseLayer {
  Tensor W;  // [out x in]
  Tensor b;  // [out]
};

struct DenseGrads {
  Tensor x;  // same shape as input
  Tensor W;
  Tensor b;
};

// y = W x + b;  x is [in] or [B x in]
Tensor dense_forward(const DenseLayer& layer, const Tensor& x);
DenseGrads dense_backward(const DenseLayer& layer, const Tensor& x,
                          const Tensor& grad_out);

struct Conv1dLayer {
  Tensor kernels;  // [out_ch x in_ch x 3], stride 1, zero padding 1
  Tensor bias;     // [out_ch]
};

struct Conv1dGrads {
  Tensor x;
  Tensor kernels;
  Tensor bias;
};

// x is [C x L] or [B x C x L]; length preserved
Tensor conv1d_forward(const Conv1dLayer& layer, const Tensor& x);
Conv1dGrads conv1d_backward(const Conv1dLayer& layer, const Tensor& x,
                            const Tensor& grad_out, bool need_grad_x = true);

// Window 2, stride 1, right zero-pad, so length is preserved. argmax records
// the winning input index per output (-1 when the zero pad wins); ties go to
// the earlier index.
Tensor maxpool1d_forward(const Tensor& x, std::vector<std::int32_t>* argmax);
Tensor maxpool1d_backward(const Tensor& grad_out,
                          const std::vector<std::int32_t>& argmax,
                          const std::vector<std::size_t>& x_shape);

Tensor relu_forward(const Tensor& x);
// mask taken from the forward input; derivative at 0 is 0
Tensor relu_backward(const Tensor& x, const Tensor& grad_out);

Tensor sigmoid_forward(const Tensor& x);
Tensor sigmoid_backward(const Tensor& y, const Tensor& grad_out);  // from outputs

Tensor tanh_forward(const Tensor& x);
Tensor tanh_backward(const Tensor& y, const Tensor& grad_out);

struct LossAndGrad {
  double loss = 0;
  Tensor grad;
};

// logits [C], target one-hot [C]; log-sum-exp stabilized.
// grad = softmax(logits) - target.
LossAndGrad softmax_cross_entropy(const Tensor& logits, const Tensor& target);

// logits [B x C], integer class labels; loss is the sum over the batch.
LossAndGrad softmax_cross_entropy_batch(const Tensor& logits,
                                        const std::vector<int>& labels);

// loss = lambda * sum ||W||^2, grad = 2 lambda W. Callers pass weight
// tensors only; biases are excluded by convention.
std::pair<double, std::vector<Tensor>> l2_penalty(
    const std::vector<const Tensor*>& params, double lambda);

// in-place variant used by the trainers: grad += 2 lambda W, returns loss
double l2_accumulate(const Tensor& W, double lambda, Tensor& grad);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m, v;
  long t = 0;
  AdamConfig cfg;

  void init(const std::vector<Tensor*>& params, const AdamConfig& c);
};

// Standard bias-corrected update. Throws on a non-finite gradient, naming
// the parameter.
void adam_step(AdamState& state, const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads,
               const std::vector<std::string>& names = {});

// Central-difference check of analytic gradients. Samples up to
// max_coords_per_tensor coordinates per tensor among those with
// |analytic| >= min_grad_magnitude (tiny gradients drown in finite-
// difference roundoff under the relative-error floor), always including the
// largest-magnitude coordinate. Returns max |a - n| / max(|a|, |n|, 1e-8).
double grad_check(const std::function<double()>& loss_fn,
                  const std::vector<Tensor*>& params,
                  const std::vector<const Tensor*>& analytic,
                  double eps = 1e-5, std::size_t max_coords_per_tensor = 40,
                  std::uint64_t seed = 0, double min_grad_magnitude = 1e-7);

// uniform in +/- sqrt(6 / (fan_in + fan_out))
void xavier_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                    std::mt19937_64& rng);

std::vector<int> argmax_rows(const Tensor& logits);  // [B x C] -> B indices

}  // namespace inkmotion::nn
