#pragma once

#include "expeda/dense.hpp"

#include <string>
#include <vector>

namespace expeda {

/// Column-sample matrix with class labels.
///
/// Samples are the columns of `data` (d x n). Labels are class indices in
/// [0, k), numbered by order of first appearance; `class_names` keeps the
/// original label text for reporting.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  /// Builds a dataset from raw labels. Classes are numbered by first
  /// appearance. If `normalize` is set each column is scaled to unit 2-norm;
  /// a zero column is a DataError naming its index.
  static LabeledDataset from_raw(Matrix data, const std::vector<std::string>& raw_labels,
                                 bool normalize = true);

  /// Builds a dataset from class indices already in [0, k).
  static LabeledDataset from_indices(Matrix data, std::vector<int> labels,
                                     std::vector<std::string> class_names = {},
                                     bool normalize = true);

  const Matrix& data() const noexcept { return data_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  bool normalized() const noexcept { return normalized_; }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.cols()); }
  std::size_t num_classes() const noexcept { return class_names_.size(); }
  std::vector<std::size_t> class_counts() const;

  /// Subset of columns, keeping the class numbering of this dataset.
  LabeledDataset select(const std::vector<std::size_t>& columns) const;

 private:
  Matrix data_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  bool normalized_ = false;
};

/// Factor matrices of the two scatter matrices: S_W = h_w h_w^T and
/// S_B = h_b h_b^T.
struct ScatterPair {
  Matrix h_w;              // d x n, columns x_i - mu_class(i)
  Matrix h_b;              // d x k, column j = sqrt(n_j) (mu_j - mu)
  Matrix centroids;        // d x k
  Vector global_centroid;  // d
};

/// Requires k >= 2 and no empty class.
ScatterPair build_scatter(const LabeledDataset& ds);

struct DenseScatter {
  Matrix s_w;
  Matrix s_b;
};

/// Materializes S_W and S_B; refused above the oracle cap.
DenseScatter dense_scatter(const ScatterPair& sp, std::size_t oracle_cap = kDefaultOracleCap);

/// trace(S_W) and trace(S_B) from the factors, without forming d x d.
double trace_within(const ScatterPair& sp);
double trace_between(const ScatterPair& sp);

}  // namespace expeda
