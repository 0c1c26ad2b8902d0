#include "expeda/recognize.hpp"

#include "expeda/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace expeda {

Split split(const LabeledDataset& ds, const SplitSpec& spec, std::size_t repeat_index) {
  if (spec.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (spec.per_class_train < 1) throw ConfigError("per-class training count must be at least 1");
  const std::size_t k = ds.num_classes();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    members[static_cast<std::size_t>(ds.labels()[i])].push_back(i);
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (members[j].size() <= spec.per_class_train) {
      throw ConfigError("class '" + ds.class_names()[j] + "' has " +
                        std::to_string(members[j].size()) + " samples; need more than " +
                        std::to_string(spec.per_class_train) + " to leave a test sample");
    }
  }

  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(repeat_index)};
  std::mt19937_64 rng(seq);
  std::vector<bool> is_train(ds.size(), false);
  for (auto& m : members) {
    std::shuffle(m.begin(), m.end(), rng);
    for (std::size_t i = 0; i < spec.per_class_train; ++i) is_train[m[i]] = true;
  }

  Split out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (is_train[i] ? out.train_index : out.test_index).push_back(i);
  }
  out.train = ds.select(out.train_index);
  out.test = ds.select(out.test_index);
  return out;
}

NearestNeighbor::NearestNeighbor(const Matrix& v, const LabeledDataset& train)
    : v_(v), labels_(train.labels()) {
  if (train.size() == 0) throw DataError("nearest neighbor: empty training set");
  if (v.rows() != train.data().rows()) throw DimensionError("nearest neighbor: basis dimension mismatch");
  projected_ = v.transpose() * train.data();
}

Vector NearestNeighbor::distances(const Vector& query) const {
  if (query.size() != v_.rows()) throw DimensionError("nearest neighbor: query dimension mismatch");
  const Vector q = v_.transpose() * query;
  return (projected_.colwise() - q).colwise().norm().transpose();
}

int NearestNeighbor::classify(const Vector& query) const {
  const Vector dist = distances(query);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < dist.size(); ++i) {
    if (dist(i) < dist(best)) best = i;
  }
  return labels_[static_cast<std::size_t>(best)];
}

std::vector<int> NearestNeighbor::classify_all(const Matrix& queries) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index j = 0; j < queries.cols(); ++j) out.push_back(classify(queries.col(j)));
  return out;
}

int nn_classify(const Matrix& v, const LabeledDataset& train, const Vector& query) {
  return NearestNeighbor(v, train).classify(query);
}

EvaluationReport evaluate(const LabeledDataset& ds, Method method, const FitOptions& fit_opts,
                          const SplitSpec& spec) {
  using clock = std::chrono::steady_clock;
  EvaluationReport report;
  report.method = method;
  report.t = resolve_t(ds, fit_opts.t);
  report.tol = (method == Method::arnoldi_eda || method == Method::lanczos_eda) ? fit_opts.tol : 0.0;
  report.per_class_train = spec.per_class_train;

  FitOptions opts = fit_opts;
  opts.t = report.t;
  double fit_total = 0.0;
  double classify_total = 0.0;
  for (std::size_t r = 0; r < spec.repeats; ++r) {
    const Split s = split(ds, spec, r);

    const auto t0 = clock::now();
    const ProjectionBasis basis = fit(method, s.train, opts);
    const auto t1 = clock::now();
    const NearestNeighbor nn(basis.v, s.train);
    std::vector<int> predicted = nn.classify_all(s.test.data());
    const auto t2 = clock::now();

    fit_total += std::chrono::duration<double>(t1 - t0).count();
    classify_total += std::chrono::duration<double>(t2 - t1).count();

    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (predicted[i] == s.test.labels()[i]) ++correct;
    }
    report.per_repeat_accuracy.push_back(static_cast<double>(correct) /
                                         static_cast<double>(predicted.size()));
    report.predictions.push_back(std::move(predicted));
  }

  const auto n = static_cast<double>(spec.repeats);
  const auto& acc = report.per_repeat_accuracy;
  report.accuracy = std::accumulate(acc.begin(), acc.end(), 0.0) / n;
  double var = 0.0;
  for (double a : acc) var += (a - report.accuracy) * (a - report.accuracy);
  report.accuracy_std = spec.repeats > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  report.fit_seconds = fit_total / n;
  report.classify_seconds = classify_total / n;
  return report;
}

}  // namespace expeda
