#include "expeda/eda.hpp"

#include "expeda/error.hpp"

#include <algorithm>
#include <cmath>

namespace expeda {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::arnoldi_eda:
      return "arnoldi_eda";
    case Method::lanczos_eda:
      return "lanczos_eda";
    case Method::eda_dense:
      return "eda_dense";
    case Method::classical_lda:
      return "classical_lda";
    case Method::lda_pca:
      return "lda_pca";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> all_methods() {
  return {Method::arnoldi_eda, Method::lanczos_eda, Method::eda_dense, Method::classical_lda,
          Method::lda_pca};
}

std::size_t resolve_t(const LabeledDataset& ds, std::size_t t) {
  if (t == 0) t = ds.num_classes() > 1 ? ds.num_classes() - 1 : 1;
  if (t > ds.dim()) {
    throw ConfigError("projection dimension t = " + std::to_string(t) + " exceeds d = " +
                      std::to_string(ds.dim()));
  }
  return t;
}

void require_orthonormal(const Matrix& v, double tol) {
  const Matrix gram = v.transpose() * v;
  if (max_abs(gram - Matrix::Identity(v.cols(), v.cols())) > tol) {
    throw DataError("projection basis is not orthonormal");
  }
}

namespace {

ProjectionBasis from_ritz(const std::vector<RitzPair>& pairs, Method method, double tol,
                          const SolveResult& res, const ScatterFactorization* back_transform) {
  const auto t = static_cast<Eigen::Index>(pairs.size());
  const Eigen::Index d = pairs.front().vector.size();
  Matrix x(d, t);
  ProjectionBasis out;
  out.eigenvalues.resize(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    x.col(i) = back_transform ? apply_sqrt_inv_w(*back_transform, p.vector) : p.vector;
    out.eigenvalues(i) = p.value;
  }
  out.v = orthonormalize(x);
  out.method = method;
  out.tol = tol;
  out.matvecs = res.matvecs;
  out.restarts = res.restarts;
  return out;
}

SolverOptions solver_options(const FitOptions& opts) {
  SolverOptions s;
  s.tol = opts.tol;
  s.max_basis = opts.max_basis;
  s.max_restarts = opts.max_restarts;
  s.seed = opts.seed;
  return s;
}

std::shared_ptr<const ScatterFactorization> factorize(const LabeledDataset& ds) {
  return std::make_shared<const ScatterFactorization>(preprocess(build_scatter(ds)));
}

}  // namespace

ProjectionBasis fit_arnoldi_eda(std::shared_ptr<const ScatterFactorization> f, std::size_t t,
                                const FitOptions& opts) {
  const ExponentialOperator op(std::move(f), OperatorMode::nonsymmetric);
  const SolveResult res = solve_dominant(op, t, solver_options(opts));
  return from_ritz(res.pairs, Method::arnoldi_eda, opts.tol, res, nullptr);
}

ProjectionBasis fit_lanczos_eda(std::shared_ptr<const ScatterFactorization> f, std::size_t t,
                                const FitOptions& opts) {
  const ExponentialOperator op(f, OperatorMode::symmetric);
  const SolveResult res = solve_dominant(op, t, solver_options(opts));
  return from_ritz(res.pairs, Method::lanczos_eda, opts.tol, res, f.get());
}

ProjectionBasis fit_arnoldi_eda(const LabeledDataset& ds, const FitOptions& opts) {
  const std::size_t t = resolve_t(ds, opts.t);
  return fit_arnoldi_eda(factorize(ds), t, opts);
}

ProjectionBasis fit_lanczos_eda(const LabeledDataset& ds, const FitOptions& opts) {
  const std::size_t t = resolve_t(ds, opts.t);
  return fit_lanczos_eda(factorize(ds), t, opts);
}

ProjectionBasis fit_eda_dense(const ScatterFactorization& f, std::size_t t, std::size_t oracle_cap) {
  const Matrix m = dense_operator(f, DenseKind::symmetric, oracle_cap);
  const Matrix half = dense_operator(f, DenseKind::sqrt_exp_neg_w, oracle_cap);
  const SymEig eig = sym_eig(m);
  const auto tt = static_cast<Eigen::Index>(t);
  ProjectionBasis out;
  out.v = orthonormalize(half * eig.vectors.leftCols(tt));
  out.eigenvalues = eig.values.head(tt);
  out.method = Method::eda_dense;
  return out;
}

ProjectionBasis fit_eda_dense(const LabeledDataset& ds, const FitOptions& opts) {
  const std::size_t t = resolve_t(ds, opts.t);
  require_oracle_scale(ds.dim(), opts.oracle_cap);
  return fit_eda_dense(*factorize(ds), t, opts.oracle_cap);
}

ProjectionBasis fit_classical_lda(const ScatterPair& sp, std::size_t t, std::size_t oracle_cap) {
  const DenseScatter s = dense_scatter(sp, oracle_cap);
  const Eigen::Index d = s.s_w.rows();
  const auto tt = static_cast<Eigen::Index>(t);
  if (tt < 1 || tt > d) throw ConfigError("classical LDA: t out of range");

  // Generalized problem S_B x = lambda S_W x restricted to range(S_W):
  // x = W y with W = U_r diag(nu_r^{-1/2}).
  const SymEig w_eig = sym_eig(s.s_w);
  const double nu_max = std::max(w_eig.values(0), 0.0);
  Eigen::Index rank = 0;
  while (rank < d && w_eig.values(rank) > kLdaRankCutoff * nu_max && nu_max > 0.0) ++rank;

  ProjectionBasis out;
  out.method = Method::classical_lda;
  out.small_sample_size = rank < d;
  out.eigenvalues = Vector::Zero(tt);
  Matrix x(d, tt);

  Eigen::Index filled = 0;
  if (rank > 0) {
    const Matrix w = w_eig.vectors.leftCols(rank) *
                     w_eig.values.head(rank).cwiseSqrt().cwiseInverse().asDiagonal();
    Matrix c = w.transpose() * s.s_b * w;
    c = 0.5 * (c + c.transpose());
    const SymEig c_eig = sym_eig(c);
    filled = std::min(tt, rank);
    x.leftCols(filled) = w * c_eig.vectors.leftCols(filled);
    out.eigenvalues.head(filled) = c_eig.values.head(filled).cwiseMax(0.0);
  }
  // Not enough nonsingular directions: complete with the null space of S_W,
  // where the pencil is degenerate.
  if (filled < tt) x.rightCols(tt - filled) = w_eig.vectors.middleCols(rank, tt - filled);
  out.v = orthonormalize(x);
  return out;
}

ProjectionBasis fit_classical_lda(const LabeledDataset& ds, const FitOptions& opts) {
  const std::size_t t = resolve_t(ds, opts.t);
  require_oracle_scale(ds.dim(), opts.oracle_cap);
  return fit_classical_lda(build_scatter(ds), t, opts.oracle_cap);
}

ProjectionBasis fit_lda_pca(const LabeledDataset& ds, const FitOptions& opts) {
  const std::size_t t = resolve_t(ds, opts.t);
  if (!(opts.pca_energy > 0.0 && opts.pca_energy <= 1.0)) {
    throw ConfigError("PCA energy must lie in (0, 1]");
  }
  const Matrix& x = ds.data();
  const Vector mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - mean;

  // Principal directions from the n x n Gram matrix; no d x d work.
  Matrix gram = centered.transpose() * centered;
  gram = 0.5 * (gram + gram.transpose());
  const SymEig g = sym_eig(gram);
  const double top = std::max(g.values(0), 0.0);
  const double total = g.values.cwiseMax(0.0).sum();
  Eigen::Index r = 0;
  double captured = 0.0;
  while (r < g.values.size() && g.values(r) > 1e-12 * top && top > 0.0) {
    captured += g.values(r);
    ++r;
    if (captured >= opts.pca_energy * total * (1.0 - 1e-12)) break;
  }
  if (r < static_cast<Eigen::Index>(t)) {
    throw ConfigError("PCA kept " + std::to_string(r) + " dimensions, fewer than t = " +
                      std::to_string(t));
  }
  const Matrix pca = orthonormalize(
      centered * g.vectors.leftCols(r) * g.values.head(r).cwiseSqrt().cwiseInverse().asDiagonal());

  const LabeledDataset reduced = LabeledDataset::from_indices(
      pca.transpose() * x, ds.labels(), ds.class_names(), /*normalize=*/false);
  ProjectionBasis inner = fit_classical_lda(build_scatter(reduced), t, static_cast<std::size_t>(r));

  ProjectionBasis out;
  out.method = Method::lda_pca;
  out.v = orthonormalize(pca * inner.v);
  out.eigenvalues = inner.eigenvalues;
  out.small_sample_size = inner.small_sample_size;
  return out;
}

ProjectionBasis fit(Method method, const LabeledDataset& ds, const FitOptions& opts) {
  switch (method) {
    case Method::arnoldi_eda:
      return fit_arnoldi_eda(ds, opts);
    case Method::lanczos_eda:
      return fit_lanczos_eda(ds, opts);
    case Method::eda_dense:
      return fit_eda_dense(ds, opts);
    case Method::classical_lda:
      return fit_classical_lda(ds, opts);
    case Method::lda_pca:
      return fit_lda_pca(ds, opts);
  }
  throw ConfigError("unknown method");
}

namespace {

double trace_ratio(const Matrix& denominator, const Matrix& numerator, CriterionKind kind) {
  const Matrix a = 0.5 * (denominator + denominator.transpose());
  const SymEig eig = sym_eig(a);
  const double top = eig.values(0);
  const double bottom = eig.values(eig.values.size() - 1);
  if (!(top > 0.0) || bottom <= 1e-12 * top) {
    if (kind == CriterionKind::lda) {
      throw SmallSampleSizeError("V^T S_W V is singular; the LDA criterion is undefined");
    }
    throw DataError("criterion denominator is not positive definite");
  }
  return a.llt().solve(numerator).trace();
}

}  // namespace

CriterionValue eda_criterion(const ScatterFactorization& f, const Matrix& v) {
  require_orthonormal(v);
  Matrix ew(v.rows(), v.cols());
  Matrix eb(v.rows(), v.cols());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    ew.col(j) = apply_exp_w(f, v.col(j));
    eb.col(j) = apply_exp_b(f, v.col(j));
  }
  return {trace_ratio(v.transpose() * ew, v.transpose() * eb, CriterionKind::eda),
          CriterionKind::eda};
}

CriterionValue lda_criterion(const ScatterPair& sp, const Matrix& v) {
  require_orthonormal(v);
  const Matrix pw = sp.h_w.transpose() * v;
  const Matrix pb = sp.h_b.transpose() * v;
  return {trace_ratio(pw.transpose() * pw, pb.transpose() * pb, CriterionKind::lda),
          CriterionKind::lda};
}

}  // namespace expeda
