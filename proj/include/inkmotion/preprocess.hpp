#pragma once

#include <filesystem>
#include <vector>

#include "inkmotion/sensor_data.hpp"

namespace inkmotion {

// Fixed-length resampled rotation trace, the classifier input. `values`
// holds N rows of (yaw, pitch, roll) in degrees, row-major.
struct ResampledSequence {
  std::vector<double> values;  // n_features x 3
  std::size_t n_features = 0;
  Label label;
  std::string subject_id;
  std::string sequence_id;

  double at(std::size_t row, std::size_t channel) const {
    return values[row * 3 + channel];
  }
  double& at(std::size_t row, std::size_t channel) {
    return values[row * 3 + channel];
  }
};

// Subtracts the subject's mean upright-hold orientation from every frame.
// td and acceleration are untouched. Throws on subject mismatch.
Sequence calibrate(const Sequence& seq, const CalibrationRecord& cal);

// Subtracts frame 0's rotation from all frames so traces are invariant to
// how the stylus was held. Idempotent.
Sequence zero_origin(const Sequence& seq);

// Piecewise-linear resampling of each rotation channel onto n linearly
// spaced timestamps spanning [t_min, t_max]. Duplicate timestamps collapse
// to the last frame seen; fewer than 2 distinct timestamps is an error.
ResampledSequence resample(const Sequence& seq, std::size_t n);

// Interleaved per-timestamp layout [y1,p1,r1, y2,p2,r2, ...].
std::vector<double> flatten(const ResampledSequence& r);

ResampledSequence unflatten(const std::vector<double>& flat, std::size_t n,
                            Label label, std::string subject_id,
                            std::string sequence_id);

struct PreprocessOptions {
  std::size_t n_features = 100;
  bool apply_calibration = true;
  bool apply_zero_origin = true;
};

// calibrate -> zero_origin -> resample for every sequence; errors carry the
// offending sequence id.
std::vector<ResampledSequence> preprocess_dataset(const Dataset& d,
                                                  const PreprocessOptions& opt);

// One line per sequence: subject_id,label,v_1,...,v_{3N} (flattened layout).
void write_resampled_csv(const std::vector<ResampledSequence>& rows,
                         const std::filesystem::path& file);

std::vector<ResampledSequence> read_resampled_csv(const std::filesystem::path& file);

}  // namespace inkmotion
