#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "inkmotion/preprocess.hpp"
#include "inkmotion/rotation.hpp"

namespace inkmotion {

struct AugmentConfig {
  double noise_sigma = 0.5;       // degrees
  double max_rotation_deg = 5.0;  // bound on random quaternion angle
  double stretch_low = 0.9;
  double stretch_high = 1.1;
  int copies_per_sequence = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

// Adds independent N(0, sigma^2) noise to every entry.
ResampledSequence jitter(const ResampledSequence& r, double sigma,
                         std::mt19937_64& rng);

// Converts each row's (yaw, pitch, roll) to an orientation, left-composes q,
// and converts back. Gimbal-lock rows take the documented fold in
// euler_deg_from_quat and never produce NaN.
ResampledSequence rotate(const ResampledSequence& r, const UnitQuaternion& q);

// Scales the yaw / pitch / roll columns by sy / sp / sr.
ResampledSequence stretch(const ResampledSequence& r, double sy, double sp,
                          double sr);

// Returns all originals followed by copies_per_sequence augmented copies per
// original (jitter, then rotate, then stretch, parameters drawn per copy).
// Copies keep their source's label and subject_id. Deterministic in
// (rows, cfg) regardless of schedule: each copy uses an RNG substream
// derived from (cfg.seed, row index, copy index).
std::vector<ResampledSequence> augment_dataset(const std::vector<ResampledSequence>& rows,
                                               const AugmentConfig& cfg);

}  // namespace inkmotion
