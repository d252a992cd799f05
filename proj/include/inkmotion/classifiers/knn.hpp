#pragma once

#include <filesystem>
#include <memory>

#include "inkmotion/classifiers/classifier.hpp"
#include "inkmotion/standardize.hpp"

namespace inkmotion {

struct KnnConfig {
  int k = 4;
};

struct KnnModel {
  std::vector<std::vector<double>> train_x;  // standardized 3N vectors
  std::vector<Label> train_y;
  int k = 4;
  Standardizer stand;
};

KnnModel knn_train(const std::vector<ResampledSequence>& rows, const KnnConfig& cfg);

// Euclidean distances against all training vectors; the K smallest (ties on
// distance broken by training index) vote by majority. Label ties break by
// smallest summed distance among the tied labels, then by label index.
// x is raw-unit; standardization is applied internally.
Label knn_predict(const KnnModel& model, const std::vector<double>& x);

void save_knn_csv(const KnnModel& model, const std::filesystem::path& file);
KnnModel load_knn_csv(const std::filesystem::path& file);

class KnnClassifier : public Classifier {
 public:
  explicit KnnClassifier(KnnConfig cfg) : cfg_(cfg) {}

  void train(const std::vector<ResampledSequence>& train_rows,
             const std::vector<ResampledSequence>& dev_rows,
             TrainCurves* curves) override;
  Label predict(const ResampledSequence& row) const override;
  std::vector<Label> predict_batch(
      const std::vector<ResampledSequence>& rows) const override;

  const KnnModel& model() const { return model_; }

 private:
  KnnConfig cfg_;
  KnnModel model_;
};

}  // namespace inkmotion
