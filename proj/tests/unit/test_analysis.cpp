#include "expeda/analysis.hpp"
#include "expeda/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace expeda;

namespace {

ScatterFactorization factorize(const LabeledDataset& ds) { return preprocess(build_scatter(ds)); }

LabeledDataset constant_data() {
  Matrix x = Matrix::Zero(3, 4);
  x.row(1).setOnes();
  return LabeledDataset::from_indices(x, {0, 1, 0, 1});
}

}  // namespace

TEST_CASE("identity data spectra") {
  const auto s = spectrum_summary(factorize(oracle::identity3()));
  CHECK(s.nu.cwiseAbs().maxCoeff() < 1e-15);
  CHECK((s.mu.array() > 1e-12).count() == 2);
  const Interval b = eig_bounds(s, 0);
  CHECK(b.lower == doctest::Approx(std::exp(s.mu(0))).epsilon(1e-14));
  CHECK(b.upper == doctest::Approx(std::exp(s.mu(0))).epsilon(1e-14));
  CHECK(s.lambda_m(0) == doctest::Approx(std::exp(s.mu(0))).epsilon(1e-12));
  CHECK(count_unit_eigs(s) >= 1);

  const Interval c = criterion_bounds(s, 1, CriterionKind::eda);
  CHECK(c.upper == doctest::Approx(std::exp(s.mu(0))).epsilon(1e-14));
  CHECK(c.lower <= c.upper);
  const auto f = factorize(oracle::identity3());
  const double rho = eda_criterion(f, fit_eda_dense(f, 1, kDefaultOracleCap).v).value;
  CHECK(rho >= c.lower * (1 - 1e-12));
  CHECK(rho <= c.upper * (1 + 1e-12));
}

TEST_CASE("zero scatter: constant spectra and trivial bounds") {
  const auto s = spectrum_summary(factorize(constant_data()));
  CHECK(s.nu.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.mu.cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.lambda_m.array() - 1.0).abs().maxCoeff() < 1e-15);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(eig_bounds(s, i).lower == 1.0);
    CHECK(eig_bounds(s, i).upper == 1.0);
  }
  for (std::size_t t = 1; t <= 3; ++t) {
    const Interval c = criterion_bounds(s, t, CriterionKind::eda);
    CHECK(c.lower == doctest::Approx(double(t)));
    CHECK(c.upper == doctest::Approx(double(t)));
  }
  CHECK(count_unit_eigs(s) == 3);
  CHECK_THROWS_AS(eig_bounds(s, 3), DimensionError);
  CHECK_THROWS_AS(criterion_bounds(s, 0, CriterionKind::eda), DimensionError);
}

TEST_CASE("spectrum of M on a small hand-built example") {
  Matrix x(3, 4);
  x << 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1;
  const auto s = spectrum_summary(factorize(LabeledDataset::from_indices(x, {0, 0, 1, 1})));
  const auto ref = oracle::scatter(LabeledDataset::from_indices(x, {0, 0, 1, 1}));
  CHECK((oracle::eigvals_desc(oracle::dense_m(ref)) - s.lambda_m).norm() < 1e-12);
  CHECK(count_unit_eigs(s) >= 1);
}

TEST_CASE("eigenvalue sandwich on random data") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = oracle::synthetic(30, 3, 4, seed, 1.0, 1.0);
    const auto s = spectrum_summary(factorize(ds));
    const Vector lam = oracle::eigvals_desc(oracle::dense_m(oracle::scatter(ds)));
    CHECK((lam - s.lambda_m).norm() < 1e-10 * lam(0));
    for (std::size_t i = 0; i < 30; ++i) {
      const Interval b = eig_bounds(s, i);
      CHECK(b.lower <= lam(static_cast<Eigen::Index>(i)) + 1e-8);
      CHECK(lam(static_cast<Eigen::Index>(i)) <= b.upper + 1e-8);
    }
  }
}

TEST_CASE("compressed spectrum equals the dense spectrum") {
  const auto f = factorize(oracle::synthetic(60, 4, 4, 3));
  const auto dense = spectrum_summary(f, kDefaultOracleCap);
  const auto comp = spectrum_summary(f, 10);
  CHECK(dense.dense);
  CHECK_FALSE(comp.dense);
  CHECK((dense.lambda_m - comp.lambda_m).norm() < 1e-10 * dense.lambda_m(0));
  CHECK((dense.nu - comp.nu).norm() < 1e-12);
  CHECK((dense.mu - comp.mu).norm() < 1e-12);
}

TEST_CASE("criterion sandwiches on random data") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = oracle::synthetic(12, 3, 10, seed);
    const auto sp = build_scatter(ds);
    const auto f = preprocess(sp);
    const auto s = spectrum_summary(f);
    const double rho = eda_criterion(f, fit_eda_dense(f, 2, kDefaultOracleCap).v).value;
    const Interval e = criterion_bounds(s, 2, CriterionKind::eda);
    CHECK(e.lower <= rho * (1 + 1e-10));
    CHECK(rho <= e.upper * (1 + 1e-10));
    CHECK(rho == doctest::Approx(s.lambda_m.head(2).sum()).epsilon(1e-10));

    const double varrho = lda_criterion(sp, fit_classical_lda(sp, 2, kDefaultOracleCap).v).value;
    const Interval l = criterion_bounds(s, 2, CriterionKind::lda);
    CHECK(l.lower <= varrho * (1 + 1e-10));
    CHECK(varrho <= l.upper * (1 + 1e-10));
  }
  CHECK_THROWS_AS(criterion_bounds(spectrum_summary(factorize(oracle::identity3())), 1, CriterionKind::lda),
                  SmallSampleSizeError);
}

TEST_CASE("independent samples give at least d - n + 1 unit eigenvalues") {
  const auto ds = oracle::synthetic(30, 2, 5, 4);
  CHECK(count_unit_eigs(spectrum_summary(factorize(ds))) >= 21);
}

TEST_CASE("subspace angles") {
  const Matrix v = Matrix::Identity(4, 2);
  auto a = subspace_angle(v, v);
  CHECK(a.sin_angle < 1e-15);
  CHECK(a.cos_angle == doctest::Approx(1.0));

  a = subspace_angle(v, Matrix::Identity(4, 4).rightCols(2));
  CHECK(a.sin_angle == doctest::Approx(1.0));
  CHECK(a.cos_angle < 1e-15);

  const double theta = 0.3;
  Matrix x = Matrix::Zero(3, 1);
  x(0, 0) = 1;
  Matrix y = Matrix::Zero(3, 1);
  y(0, 0) = std::cos(theta);
  y(1, 0) = std::sin(theta);
  a = subspace_angle(x, y);
  CHECK(std::abs(a.sin_angle - std::sin(theta)) < 1e-12);
  CHECK(std::abs(a.cos_angle - std::cos(theta)) < 1e-12);

  std::mt19937_64 rng(2);
  const Matrix p = oracle::orth(oracle::random_matrix(20, 4, rng));
  const Matrix q = oracle::orth(oracle::random_matrix(20, 4, rng));
  a = subspace_angle(p, q);
  CHECK(a.sin_angle == doctest::Approx(oracle::sin_angle(p, q)).epsilon(1e-12));
  CHECK(a.sin_angle * a.sin_angle + a.cos_min * a.cos_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(subspace_angle(p, q.leftCols(3)), DimensionError);
}

TEST_CASE("distance bound") {
  SubspaceAngle exact;
  CHECK(distance_bound_check(0.7, 0.7, exact));
  CHECK_FALSE(distance_bound_check(0.7, 0.8, exact));

  // Rotate a 2-dimensional subspace of R^6 so that sin = 0.1.
  const double s = 0.1;
  const double c = std::sqrt(1 - s * s);
  Matrix v = Matrix::Identity(6, 2);
  Matrix w = Matrix::Zero(6, 2);
  w(0, 0) = c;
  w(2, 0) = s;
  w(1, 1) = 1;
  const auto ang = subspace_angle(v, w);
  CHECK(ang.sin_angle == doctest::Approx(0.1).epsilon(1e-12));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    Vector x = oracle::random_vector(6, rng);
    Vector y = oracle::random_vector(6, rng);
    x.normalize();
    y.normalize();
    const double d_exact = (v.transpose() * (x - y)).norm();
    const double d_tilde = (w.transpose() * (x - y)).norm();
    CHECK(distance_bound_check(d_exact, d_tilde, ang));
  }
  SubspaceAngle orthogonal{1.0, 0.0, 0.0};
  CHECK_THROWS_AS(distance_bound_check(1.0, 1.0, orthogonal), DataError);
}

TEST_CASE("distance bound end to end at a loose tolerance") {
  const auto ds = oracle::synthetic(100, 4, 8, 12);
  const auto f = std::make_shared<const ScatterFactorization>(factorize(ds));
  const auto exact = fit_eda_dense(*f, 3, kDefaultOracleCap);
  FitOptions opts;
  opts.tol = 1e-2;
  const auto approx = fit_arnoldi_eda(f, 3, opts);
  const auto ang = subspace_angle(exact.v, approx.v);
  const Matrix& x = ds.data();
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Vector diff = x.col(i) - x.col(j);
      CHECK(distance_bound_check((exact.v.transpose() * diff).norm(), (approx.v.transpose() * diff).norm(), ang));
    }
  }
}
