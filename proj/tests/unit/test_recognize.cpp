#include "expeda/error.hpp"
#include "expeda/recognize.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace expeda;

TEST_CASE("split rejects training sizes that leave no test samples") {
  const auto ds = oracle::synthetic(10, 3, 4, 0);
  CHECK_THROWS_AS(split(ds, SplitSpec{4, 0, 1}, 0), ConfigError);
  CHECK_THROWS_AS(split(ds, SplitSpec{0, 0, 1}, 0), ConfigError);
  CHECK_NOTHROW(split(ds, SplitSpec{3, 0, 1}, 0));
}

TEST_CASE("split is deterministic per seed and repeat") {
  const auto ds = oracle::synthetic(10, 3, 6, 0);
  const SplitSpec spec{2, 42, 10};
  CHECK(split(ds, spec, 3).train_index == split(ds, spec, 3).train_index);
  CHECK(split(ds, spec, 3).train_index != split(ds, spec, 4).train_index);
  CHECK(split(ds, SplitSpec{2, 43, 10}, 3).train_index != split(ds, spec, 3).train_index);
}

TEST_CASE("every repeat draws exactly l training samples per class") {
  const auto ds = oracle::synthetic(10, 4, 7, 1);
  const SplitSpec spec{3, 5, 10};
  for (std::size_t r = 0; r < 10; ++r) {
    const auto s = split(ds, spec, r);
    CHECK(s.train.class_counts() == std::vector<std::size_t>(4, 3));
    CHECK(s.test.class_counts() == std::vector<std::size_t>(4, 4));
    std::set<std::size_t> all(s.train_index.begin(), s.train_index.end());
    all.insert(s.test_index.begin(), s.test_index.end());
    CHECK(all.size() == ds.size());
    for (std::size_t j = 0; j < s.train_index.size(); ++j) {
      CHECK(s.train.labels()[j] == ds.labels()[s.train_index[j]]);
    }
  }
}

TEST_CASE("nearest neighbour basics") {
  const auto ds = oracle::synthetic(10, 3, 4, 2);
  const Matrix v = oracle::orth(ds.data().leftCols(3));
  NearestNeighbor nn(v, ds);
  for (Eigen::Index i = 0; i < ds.data().cols(); ++i) {
    CHECK(nn.classify(ds.data().col(i)) == ds.labels()[static_cast<std::size_t>(i)]);
  }
  CHECK_THROWS_AS(nn.classify(Vector::Ones(9)), DimensionError);
}

TEST_CASE("nearest neighbour by direct distance") {
  Matrix x = Matrix::Identity(2, 2);
  const auto train = LabeledDataset::from_indices(x, {0, 1});
  const double a = 10.0 * M_PI / 180.0;
  Vector q(2);
  q << std::cos(a), std::sin(a);
  CHECK(nn_classify(Matrix::Identity(2, 2), train, q) == 0);
  const Vector dist = NearestNeighbor(Matrix::Identity(2, 2), train).distances(q);
  CHECK(dist(0) == doctest::Approx((q - Vector::Unit(2, 0)).norm()));
  CHECK(dist(1) == doctest::Approx((q - Vector::Unit(2, 1)).norm()));
  // Equidistant query goes to the lower index.
  Vector mid(2);
  mid << 1, 1;
  CHECK(nn_classify(Matrix::Identity(2, 2), train, mid) == 0);
}

TEST_CASE("well separated classes are recognized perfectly") {
  const auto ds = oracle::synthetic(50, 4, 8, 3, 0.02, 1.0);
  FitOptions opts;
  for (Method m : {Method::arnoldi_eda, Method::lanczos_eda, Method::eda_dense}) {
    const auto r = evaluate(ds, m, opts, SplitSpec{3, 0, 5});
    CHECK(r.accuracy == 1.0);
    CHECK(r.accuracy_std == 0.0);
    CHECK(r.per_repeat_accuracy.size() == 5);
    CHECK(r.predictions.size() == 5);
    CHECK(r.t == 3);
  }
}

TEST_CASE("shuffled labels give chance accuracy") {
  const auto base = oracle::synthetic(40, 4, 20, 4, 0.5, 1.0);
  std::vector<int> labels = base.labels();
  std::mt19937_64 rng(99);
  std::shuffle(labels.begin(), labels.end(), rng);
  const auto ds = LabeledDataset::from_indices(base.data(), labels);
  const SplitSpec spec{3, 1, 10};
  const auto r = evaluate(ds, Method::arnoldi_eda, FitOptions{}, spec);
  const double p = 0.25;
  const double tests = 10.0 * (80 - 12);
  CHECK(std::abs(r.accuracy - p) <= 3.0 * std::sqrt(p * (1 - p) / tests));
}

TEST_CASE("evaluation report statistics") {
  const auto ds = oracle::synthetic(30, 3, 6, 5, 1.5, 1.0);
  const auto r = evaluate(ds, Method::lanczos_eda, FitOptions{}, SplitSpec{2, 0, 4});
  double mean = 0.0;
  for (double a : r.per_repeat_accuracy) mean += a / 4.0;
  double var = 0.0;
  for (double a : r.per_repeat_accuracy) var += (a - mean) * (a - mean) / 3.0;
  CHECK(r.accuracy == doctest::Approx(mean).epsilon(1e-15));
  CHECK(r.accuracy_std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(r.fit_seconds >= 0.0);
  CHECK(r.tol == 1e-4);
  CHECK(evaluate(ds, Method::eda_dense, FitOptions{}, SplitSpec{2, 0, 1}).tol == 0.0);
}
