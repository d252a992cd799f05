#include "inkmotion/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "inkmotion/nn/checkpoint.hpp"
#include "inkmotion/rng.hpp"

namespace inkmotion {

using nn::Tensor;

Autoencoder make_autoencoder(std::size_t n, std::uint64_t seed) {
  Autoencoder ae;
  ae.n = n;
  std::mt19937_64 rng = make_engine(seed);
  auto init = [&](nn::DenseLayer& l, std::size_t in, std::size_t out) {
    l.W = Tensor({out, in});
    l.b = Tensor({out});
    nn::xavier_uniform(l.W, in, out, rng);
  };
  init(ae.enc1, n, kAeHidden);
  init(ae.enc2, kAeHidden, kAeCode);
  init(ae.dec1, kAeCode, kAeHidden);
  init(ae.dec2, kAeHidden, n);
  return ae;
}

namespace {

struct AeTape {
  Tensor x, h1, a1, code, ac, h2, a2, recon;  // pre/post activations
};

// x is standardized; works for [N] and [B x N]
Tensor ae_forward_std(const Autoencoder& ae, const Tensor& x, AeTape* tape) {
  Tensor h1 = nn::dense_forward(ae.enc1, x);
  Tensor a1 = nn::relu_forward(h1);
  Tensor code = nn::dense_forward(ae.enc2, a1);
  Tensor ac = nn::relu_forward(code);
  Tensor h2 = nn::dense_forward(ae.dec1, ac);
  Tensor a2 = nn::relu_forward(h2);
  Tensor recon = nn::dense_forward(ae.dec2, a2);
  if (tape) {
    tape->x = x;
    tape->h1 = std::move(h1);
    tape->a1 = std::move(a1);
    tape->code = std::move(code);
    tape->ac = std::move(ac);
    tape->h2 = std::move(h2);
    tape->a2 = std::move(a2);
    tape->recon = recon;
  }
  return recon;
}

}  // namespace

AeForwardResult ae_forward(const Autoencoder& ae, std::span<const double> x) {
  if (x.size() != ae.n)
    throw std::invalid_argument("ae_forward: expected input of length " +
                                std::to_string(ae.n) + ", got " + std::to_string(x.size()));
  Tensor xs({ae.n});
  for (std::size_t i = 0; i < ae.n; ++i)
    xs.data[i] = (x[i] - ae.input_mean) / ae.input_std;
  AeTape tape;
  Tensor recon = ae_forward_std(ae, xs, &tape);
  AeForwardResult out;
  out.code.assign(tape.code.data.begin(), tape.code.data.end());
  out.recon.resize(ae.n);
  for (std::size_t i = 0; i < ae.n; ++i)
    out.recon[i] = recon.data[i] * ae.input_std + ae.input_mean;
  return out;
}

double mse_loss(std::span<const double> x, std::span<const double> xhat) {
  if (x.size() != xhat.size())
    throw std::invalid_argument("mse_loss: length mismatch " + std::to_string(x.size()) +
                                " vs " + std::to_string(xhat.size()));
  if (x.empty()) throw std::invalid_argument("mse_loss: empty vectors");
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - xhat[i];
    s += d * d;
  }
  return s / static_cast<double>(x.size());
}

std::pair<Autoencoder, std::vector<double>> train_autoencoder(
    const std::vector<std::vector<double>>& rows, std::size_t n,
    const AeTrainConfig& cfg) {
  if (rows.empty()) throw std::invalid_argument("train_autoencoder: empty input");
  for (const auto& r : rows)
    if (r.size() != n)
      throw std::invalid_argument("train_autoencoder: row length " +
                                  std::to_string(r.size()) + " != " + std::to_string(n));

  Autoencoder ae = make_autoencoder(n, derive_seed(cfg.seed, {0x1}));

  // per-channel standardization from the training rows
  double mean = 0, var = 0;
  const double count = static_cast<double>(rows.size() * n);
  for (const auto& r : rows)
    mean = std::accumulate(r.begin(), r.end(), mean);
  mean /= count;
  for (const auto& r : rows)
    for (double v : r) var += (v - mean) * (v - mean);
  const double stdev = std::sqrt(var / count);
  ae.input_mean = mean;
  ae.input_std = stdev < 1e-12 ? 1.0 : stdev;

  std::vector<Tensor*> params = {&ae.enc1.W, &ae.enc1.b, &ae.enc2.W, &ae.enc2.b,
                                 &ae.dec1.W, &ae.dec1.b, &ae.dec2.W, &ae.dec2.b};
  nn::AdamState adam;
  adam.init(params, cfg.adam);

  std::vector<double> curve;
  std::mt19937_64 shuffle_rng = make_engine(cfg.seed, {0x2});
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);

  const std::size_t bs = std::max(1, cfg.batch_size);
  const double raw_scale = ae.input_std * ae.input_std;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_sq = 0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t b = std::min(bs, order.size() - start);
      Tensor x({b, n});
      for (std::size_t s = 0; s < b; ++s) {
        const auto& row = rows[order[start + s]];
        for (std::size_t i = 0; i < n; ++i)
          x(s, i) = (row[i] - ae.input_mean) / ae.input_std;
      }
      AeTape tape;
      Tensor recon = ae_forward_std(ae, x, &tape);

      // batch-mean of per-sample MSE; grad = 2 (recon - x) / (N B)
      Tensor grad(recon.shape);
      double sq = 0;
      for (std::size_t i = 0; i < recon.numel(); ++i) {
        const double d = recon.data[i] - x.data[i];
        sq += d * d;
        grad.data[i] = 2.0 * d / (static_cast<double>(n) * static_cast<double>(b));
      }
      epoch_sq += sq;
      seen += b;

      nn::DenseGrads g4 = nn::dense_backward(ae.dec2, tape.a2, grad);
      Tensor d3 = nn::relu_backward(tape.h2, g4.x);
      nn::DenseGrads g3 = nn::dense_backward(ae.dec1, tape.ac, d3);
      Tensor d2 = nn::relu_backward(tape.code, g3.x);
      nn::DenseGrads g2 = nn::dense_backward(ae.enc2, tape.a1, d2);
      Tensor d1 = nn::relu_backward(tape.h1, g2.x);
      nn::DenseGrads g1 = nn::dense_backward(ae.enc1, tape.x, d1);

      const std::vector<const Tensor*> grads = {&g1.W, &g1.b, &g2.W, &g2.b,
                                                &g3.W, &g3.b, &g4.W, &g4.b};
      nn::adam_step(adam, params, grads,
                    {"enc1.W", "enc1.b", "enc2.W", "enc2.b", "dec1.W", "dec1.b",
                     "dec2.W", "dec2.b"});
    }
    // mean training MSE in raw units
    curve.push_back(epoch_sq / (static_cast<double>(seen) * static_cast<double>(n)) *
                    raw_scale);
  }
  return {std::move(ae), std::move(curve)};
}

std::vector<ResampledSequence> denoise_dataset(
    const std::vector<ResampledSequence>& rows, const Autoencoder& ae_yaw,
    const Autoencoder& ae_pitch, const Autoencoder& ae_roll) {
  std::vector<ResampledSequence> out = rows;
  if (rows.empty()) return out;
  const std::size_t n = rows[0].n_features;
  const Autoencoder* aes[3] = {&ae_yaw, &ae_pitch, &ae_roll};
  for (const Autoencoder* ae : aes)
    if (ae->n != n)
      throw std::invalid_argument("denoise_dataset: model width " + std::to_string(ae->n) +
                                  " != feature count " + std::to_string(n));

  for (int c = 0; c < 3; ++c) {
    const Autoencoder& ae = *aes[c];
    Tensor x({rows.size(), n});
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t i = 0; i < n; ++i)
        x(r, i) = (rows[r].at(i, c) - ae.input_mean) / ae.input_std;
    Tensor recon = ae_forward_std(ae, x, nullptr);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t i = 0; i < n; ++i)
        out[r].at(i, c) = recon(r, i) * ae.input_std + ae.input_mean;
  }
  return out;
}

void save_autoencoder(const Autoencoder& ae, const std::filesystem::path& path) {
  nlohmann::json side = {{"input_mean", ae.input_mean},
                         {"input_std", ae.input_std},
                         {"n_features", ae.n}};
  nn::save_checkpoint(path, "ae-N-128-64",
                      {{"enc1.W", &ae.enc1.W},
                       {"enc1.b", &ae.enc1.b},
                       {"enc2.W", &ae.enc2.W},
                       {"enc2.b", &ae.enc2.b},
                       {"dec1.W", &ae.dec1.W},
                       {"dec1.b", &ae.dec1.b},
                       {"dec2.W", &ae.dec2.W},
                       {"dec2.b", &ae.dec2.b}},
                      side);
}

Autoencoder load_autoencoder(const std::filesystem::path& path) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  if (ck.arch_tag != "ae-N-128-64")
    throw std::runtime_error("unexpected architecture tag '" + ck.arch_tag + "' in " +
                             path.string());
  Autoencoder ae;
  ae.enc1 = {ck.get("enc1.W"), ck.get("enc1.b")};
  ae.enc2 = {ck.get("enc2.W"), ck.get("enc2.b")};
  ae.dec1 = {ck.get("dec1.W"), ck.get("dec1.b")};
  ae.dec2 = {ck.get("dec2.W"), ck.get("dec2.b")};
  ae.n = ae.enc1.W.shape[1];
  ae.input_mean = ck.sidecar.value("input_mean", 0.0);
  ae.input_std = ck.sidecar.value("input_std", 1.0);
  return ae;
}

}  // namespace inkmotion
