#include "expeda/scatter.hpp"

#include "expeda/error.hpp"

#include <cmath>
#include <unordered_map>

namespace expeda {

namespace {

void normalize_columns(Matrix& data) {
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double norm = data.col(j).norm();
    if (!(norm > 0.0)) {
      throw DataError("sample " + std::to_string(j) + " has zero norm and cannot be normalized");
    }
    data.col(j) /= norm;
  }
}

}  // namespace

LabeledDataset LabeledDataset::from_raw(Matrix data, const std::vector<std::string>& raw_labels,
                                        bool normalize) {
  std::unordered_map<std::string, int> index;
  std::vector<std::string> names;
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (const auto& raw : raw_labels) {
    auto [it, inserted] = index.try_emplace(raw, static_cast<int>(names.size()));
    if (inserted) names.push_back(raw);
    labels.push_back(it->second);
  }
  return from_indices(std::move(data), std::move(labels), std::move(names), normalize);
}

LabeledDataset LabeledDataset::from_indices(Matrix data, std::vector<int> labels,
                                            std::vector<std::string> class_names,
                                            bool normalize) {
  if (data.rows() < 1 || data.cols() < 1) throw DataError("dataset is empty");
  if (static_cast<std::size_t>(data.cols()) != labels.size()) {
    throw DimensionError("dataset has " + std::to_string(data.cols()) + " samples but " +
                         std::to_string(labels.size()) + " labels");
  }
  require_finite(data, "dataset");

  int k = 0;
  for (int label : labels) {
    if (label < 0) throw DataError("negative class index");
    k = std::max(k, label + 1);
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) throw DataError("class " + std::to_string(j) + " has no samples");
  }
  if (class_names.empty()) {
    for (int j = 0; j < k; ++j) class_names.push_back(std::to_string(j));
  } else if (class_names.size() != static_cast<std::size_t>(k)) {
    throw DimensionError("class name count does not match number of classes");
  }

  if (normalize) normalize_columns(data);

  LabeledDataset ds;
  ds.data_ = std::move(data);
  ds.labels_ = std::move(labels);
  ds.class_names_ = std::move(class_names);
  ds.normalized_ = normalize;
  return ds;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (int label : labels_) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

LabeledDataset LabeledDataset::select(const std::vector<std::size_t>& columns) const {
  LabeledDataset out;
  out.data_.resize(data_.rows(), static_cast<Eigen::Index>(columns.size()));
  out.labels_.reserve(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= size()) throw DimensionError("select: column index out of range");
    out.data_.col(static_cast<Eigen::Index>(j)) = data_.col(static_cast<Eigen::Index>(columns[j]));
    out.labels_.push_back(labels_[columns[j]]);
  }
  out.class_names_ = class_names_;
  out.normalized_ = normalized_;
  return out;
}

ScatterPair build_scatter(const LabeledDataset& ds) {
  const std::size_t k = ds.num_classes();
  const std::size_t n = ds.size();
  if (k < 2) throw DataError("at least two classes are required, got " + std::to_string(k));
  if (n < k) throw DataError("fewer samples than classes");

  const Matrix& x = ds.data();
  const auto counts = ds.class_counts();
  const Eigen::Index d = x.rows();

  ScatterPair sp;
  sp.centroids = Matrix::Zero(d, static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    sp.centroids.col(ds.labels()[i]) += x.col(static_cast<Eigen::Index>(i));
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) throw DataError("class " + std::to_string(j) + " is empty");
    sp.centroids.col(static_cast<Eigen::Index>(j)) /= static_cast<double>(counts[j]);
  }
  sp.global_centroid = x.rowwise().sum() / static_cast<double>(n);

  sp.h_w.resize(d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    sp.h_w.col(col) = x.col(col) - sp.centroids.col(ds.labels()[i]);
  }
  sp.h_b.resize(d, static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    sp.h_b.col(col) = std::sqrt(static_cast<double>(counts[j])) *
                      (sp.centroids.col(col) - sp.global_centroid);
  }
  return sp;
}

DenseScatter dense_scatter(const ScatterPair& sp, std::size_t oracle_cap) {
  require_oracle_scale(static_cast<std::size_t>(sp.h_w.rows()), oracle_cap);
  DenseScatter out;
  out.s_w = sp.h_w * sp.h_w.transpose();
  out.s_b = sp.h_b * sp.h_b.transpose();
  return out;
}

double trace_within(const ScatterPair& sp) { return sp.h_w.squaredNorm(); }
double trace_between(const ScatterPair& sp) { return sp.h_b.squaredNorm(); }

}  // namespace expeda
