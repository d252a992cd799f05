#pragma once

#include <vector>

#include "inkmotion/preprocess.hpp"

namespace inkmotion {

struct TrainCurves {
  std::vector<int> epoch;
  std::vector<double> train_acc;
  std::vector<double> dev_acc;
};

// Common train/predict contract for the four classifiers. Dev rows are
// evaluated for learning curves only and never fitted on; prediction is
// deterministic after training.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual void train(const std::vector<ResampledSequence>& train_rows,
                     const std::vector<ResampledSequence>& dev_rows,
                     TrainCurves* curves) = 0;

  virtual Label predict(const ResampledSequence& row) const = 0;

  virtual std::vector<Label> predict_batch(
      const std::vector<ResampledSequence>& rows) const {
    std::vector<Label> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict(r));
    return out;
  }
};

}  // namespace inkmotion
