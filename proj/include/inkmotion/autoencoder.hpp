#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "inkmotion/nn/layers.hpp"
#include "inkmotion/preprocess.hpp"

namespace inkmotion {

// Per-channel denoising autoencoder, N -> 128 -> 64 -> 128 -> N, fully
// connected, ReLU on hidden layers and a linear output. Inputs are
// standardized with constants fitted on the training rows and recorded in
// the checkpoint sidecar.
struct Autoencoder {
  nn::DenseLayer enc1;  // N -> 128
  nn::DenseLayer enc2;  // 128 -> 64
  nn::DenseLayer dec1;  // 64 -> 128
  nn::DenseLayer dec2;  // 128 -> N
  std::size_t n = 100;
  double input_mean = 0.0;
  double input_std = 1.0;
};

inline constexpr std::size_t kAeHidden = 128;
inline constexpr std::size_t kAeCode = 64;

Autoencoder make_autoencoder(std::size_t n, std::uint64_t seed);

struct AeForwardResult {
  std::vector<double> code;   // [64]
  std::vector<double> recon;  // [N]
};

// Raw-unit in, raw-unit out (standardization applied internally).
AeForwardResult ae_forward(const Autoencoder& ae, std::span<const double> x);

double mse_loss(std::span<const double> x, std::span<const double> xhat);

struct AeTrainConfig {
  int epochs = 100;
  int batch_size = 64;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;
};

// rows are raw-unit channel vectors of length n. Returns the trained model
// and the per-epoch mean training MSE (raw units).
std::pair<Autoencoder, std::vector<double>> train_autoencoder(
    const std::vector<std::vector<double>>& rows, std::size_t n,
    const AeTrainConfig& cfg);

// Replaces each row's yaw/pitch/roll column with the matching model's
// reconstruction. Labels, subjects, and row count are untouched.
std::vector<ResampledSequence> denoise_dataset(
    const std::vector<ResampledSequence>& rows, const Autoencoder& ae_yaw,
    const Autoencoder& ae_pitch, const Autoencoder& ae_roll);

// architecture tag "ae-N-128-64"; standardization constants in the sidecar
void save_autoencoder(const Autoencoder& ae, const std::filesystem::path& path);
Autoencoder load_autoencoder(const std::filesystem::path& path);

}  // namespace inkmotion
