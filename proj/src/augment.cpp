#include "inkmotion/augment.hpp"

#include <stdexcept>

#include "inkmotion/rng.hpp"

namespace inkmotion {

void AugmentConfig::validate() const {
  if (noise_sigma < 0) throw std::invalid_argument("augment: noise_sigma must be >= 0");
  if (max_rotation_deg < 0 || max_rotation_deg > 180)
    throw std::invalid_argument("augment: max_rotation_deg must be in [0, 180]");
  if (!(stretch_low > 0) || stretch_low > stretch_high)
    throw std::invalid_argument("augment: need 0 < stretch_low <= stretch_high");
  if (copies_per_sequence < 0)
    throw std::invalid_argument("augment: copies_per_sequence must be >= 0");
}

ResampledSequence jitter(const ResampledSequence& r, double sigma,
                         std::mt19937_64& rng) {
  ResampledSequence out = r;
  if (sigma == 0) return out;
  std::normal_distribution<double> gauss(0.0, sigma);
  for (auto& v : out.values) v += gauss(rng);
  return out;
}

ResampledSequence rotate(const ResampledSequence& r, const UnitQuaternion& q) {
  ResampledSequence out = r;
  for (std::size_t i = 0; i < out.n_features; ++i) {
    const UnitQuaternion row =
        quat_from_euler_deg(out.at(i, 0), out.at(i, 1), out.at(i, 2));
    const UnitQuaternion composed = quat_multiply(q, row);
    euler_deg_from_quat(composed, out.at(i, 0), out.at(i, 1), out.at(i, 2));
  }
  return out;
}

ResampledSequence stretch(const ResampledSequence& r, double sy, double sp,
                          double sr) {
  ResampledSequence out = r;
  for (std::size_t i = 0; i < out.n_features; ++i) {
    out.at(i, 0) *= sy;
    out.at(i, 1) *= sp;
    out.at(i, 2) *= sr;
  }
  return out;
}

std::vector<ResampledSequence> augment_dataset(const std::vector<ResampledSequence>& rows,
                                               const AugmentConfig& cfg) {
  cfg.validate();
  const std::size_t copies = static_cast<std::size_t>(cfg.copies_per_sequence);
  std::vector<ResampledSequence> out(rows.size() * (1 + copies));
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i];

#pragma omp parallel for schedule(dynamic) collapse(2)
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < copies; ++c) {
      std::mt19937_64 rng = make_engine(cfg.seed, {i, c});
      ResampledSequence copy = jitter(rows[i], cfg.noise_sigma, rng);
      copy = rotate(copy, random_small_quaternion(cfg.max_rotation_deg, rng));
      std::uniform_real_distribution<double> s(cfg.stretch_low, cfg.stretch_high);
      const double sy = s(rng), sp = s(rng), sr = s(rng);
      copy = stretch(copy, sy, sp, sr);
      copy.sequence_id = rows[i].sequence_id + "#aug" + std::to_string(c);
      out[rows.size() + i * copies + c] = std::move(copy);
    }
  }
  return out;
}

}  // namespace inkmotion
