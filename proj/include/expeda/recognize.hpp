#pragma once

// Random per-class train/test splits, 1-NN classification in the projected
// space, and accuracy accounting over repeated splits.

#include "expeda/eda.hpp"
#include "expeda/scatter.hpp"

#include <cstdint>
#include <vector>

namespace expeda {

struct SplitSpec {
  std::size_t per_class_train = 3;
  std::uint64_t seed = 0;
  std::size_t repeats = 10;
};

struct Split {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_index;  // columns of the source dataset
  std::vector<std::size_t> test_index;
};

/// Exactly `per_class_train` samples of every class go to training, chosen by
/// a shuffle seeded from (seed, repeat_index); the rest form the test set.
/// Both sides keep the source column order.
Split split(const LabeledDataset& ds, const SplitSpec& spec, std::size_t repeat_index);

/// Projected training set for repeated queries.
class NearestNeighbor {
 public:
  NearestNeighbor(const Matrix& v, const LabeledDataset& train);

  /// Label of argmin_i ||V^T (x_i - query)||; ties go to the lowest index.
  int classify(const Vector& query) const;
  std::vector<int> classify_all(const Matrix& queries) const;
  /// Projected distances from the query to every training sample.
  Vector distances(const Vector& query) const;

 private:
  Matrix v_;
  Matrix projected_;  // t x n_train
  std::vector<int> labels_;
};

/// One-shot form of NearestNeighbor::classify.
int nn_classify(const Matrix& v, const LabeledDataset& train, const Vector& query);

struct EvaluationReport {
  Method method = Method::arnoldi_eda;
  std::size_t t = 0;
  double tol = 0.0;
  std::size_t per_class_train = 0;
  double accuracy = 0.0;  // mean over repeats
  double accuracy_std = 0.0;
  double fit_seconds = 0.0;       // mean wall time per repeat
  double classify_seconds = 0.0;  // mean wall time per repeat
  std::vector<double> per_repeat_accuracy;
  std::vector<std::vector<int>> predictions;  // per repeat, aligned with the test split
};

/// Splits, fits and classifies over spec.repeats random splits.
EvaluationReport evaluate(const LabeledDataset& ds, Method method, const FitOptions& fit_opts,
                          const SplitSpec& spec);

}  // namespace expeda
