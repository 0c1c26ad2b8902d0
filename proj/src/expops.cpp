#include "expeda/expops.hpp"

#include "expeda/error.hpp"

#include <cmath>
#include <utility>

namespace expeda {

namespace {

struct SpectralFactor {
  Matrix q;
  Vector d;
};

// Thin spectral factor of H H^T from H (d x m) without forming H H^T.
SpectralFactor factor_gram(const Matrix& h) {
  SpectralFactor out;
  Vector sigma;
  if (h.rows() >= h.cols()) {
    QRFactors qr = qr_skinny(h);
    SVDFactors svd = svd_small(qr.r);
    out.q = qr.q * svd.u;
    sigma = svd.sigma;
  } else {
    // Wide case (more samples than features): H^T = Q R gives H H^T = R^T R,
    // whose eigenvectors are the right singular vectors of R.
    QRFactors qr = qr_skinny(h.transpose());
    SVDFactors svd = svd_small(qr.r);
    out.q = svd.v;
    sigma = svd.sigma;
  }
  const double cutoff = sigma.size() > 0 ? kSingularCutoff * sigma(0) : 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) < cutoff) sigma(i) = 0.0;
  }
  out.d = sigma.array().square();
  return out;
}

void require_dim(const ScatterFactorization& f, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != f.dim()) {
    throw DimensionError("vector of length " + std::to_string(v.size()) +
                         " applied to operator of dimension " + std::to_string(f.dim()));
  }
}

}  // namespace

ScatterFactorization preprocess(const ScatterPair& sp) {
  if (sp.h_b.rows() != sp.h_w.rows()) throw DimensionError("preprocess: h_b and h_w differ in rows");
  SpectralFactor b = factor_gram(sp.h_b);
  SpectralFactor w = factor_gram(sp.h_w);

  ScatterFactorization f;
  f.q_b = std::move(b.q);
  f.d_b = std::move(b.d);
  f.q_w = std::move(w.q);
  f.d_w = std::move(w.d);
  f.exp_d_b = f.d_b.array().exp();
  f.exp_neg_d_w = (-f.d_w.array()).exp();
  f.exp_neg_half_d_w = (-0.5 * f.d_w.array()).exp();
  f.exp_d_w = f.d_w.array().exp();
  return f;
}

void apply_spectral_inplace(const Matrix& q, const Vector& g, Eigen::Ref<Vector> v,
                            Vector& work) {
  work.noalias() = q.transpose() * v;
  work.array() *= g.array() - 1.0;
  v.noalias() += q * work;
}

namespace {

// Copies v into out (reusing its storage) and applies the listed factors in order.
template <typename... Steps>
void chain(const ScatterFactorization& f, const Vector& v, Vector& out, const Steps&... steps) {
  require_dim(f, v);
  out = v;
  Vector work;
  (apply_spectral_inplace(steps.first, steps.second, out, work), ...);
}

using Step = std::pair<const Matrix&, const Vector&>;

}  // namespace

void apply_exp_b(const ScatterFactorization& f, const Vector& v, Vector& out) {
  chain(f, v, out, Step{f.q_b, f.exp_d_b});
}

void apply_exp_neg_w(const ScatterFactorization& f, const Vector& v, Vector& out) {
  chain(f, v, out, Step{f.q_w, f.exp_neg_d_w});
}

void apply_exp_w(const ScatterFactorization& f, const Vector& v, Vector& out) {
  chain(f, v, out, Step{f.q_w, f.exp_d_w});
}

void apply_sqrt_inv_w(const ScatterFactorization& f, const Vector& v, Vector& out) {
  chain(f, v, out, Step{f.q_w, f.exp_neg_half_d_w});
}

void apply_nonsym(const ScatterFactorization& f, const Vector& v, Vector& out) {
  chain(f, v, out, Step{f.q_b, f.exp_d_b}, Step{f.q_w, f.exp_neg_d_w});
}

void apply_sym(const ScatterFactorization& f, const Vector& v, Vector& out) {
  chain(f, v, out, Step{f.q_w, f.exp_neg_half_d_w}, Step{f.q_b, f.exp_d_b},
        Step{f.q_w, f.exp_neg_half_d_w});
}

#define EXPEDA_RETURNING(name)                                  \
  Vector name(const ScatterFactorization& f, const Vector& v) { \
    Vector out;                                                 \
    name(f, v, out);                                            \
    return out;                                                 \
  }
EXPEDA_RETURNING(apply_exp_b)
EXPEDA_RETURNING(apply_exp_neg_w)
EXPEDA_RETURNING(apply_exp_w)
EXPEDA_RETURNING(apply_sqrt_inv_w)
EXPEDA_RETURNING(apply_nonsym)
EXPEDA_RETURNING(apply_sym)
#undef EXPEDA_RETURNING

DenseOperator::DenseOperator(Matrix a, bool symmetric) : a_(std::move(a)), symmetric_(symmetric) {
  if (a_.rows() != a_.cols() || a_.rows() < 1) {
    throw DimensionError("DenseOperator: expected a non-empty square matrix");
  }
}

void DenseOperator::apply(const Vector& x, Vector& y) const {
  if (x.size() != a_.cols()) throw DimensionError("DenseOperator: dimension mismatch");
  y.noalias() = a_ * x;
}

ExponentialOperator::ExponentialOperator(std::shared_ptr<const ScatterFactorization> factors,
                                         OperatorMode mode)
    : factors_(std::move(factors)), mode_(mode) {
  if (!factors_) throw Error("ExponentialOperator: null factorization");
}

void ExponentialOperator::apply(const Vector& x, Vector& y) const {
  switch (mode_) {
    case OperatorMode::nonsymmetric:
      apply_nonsym(*factors_, x, y);
      break;
    case OperatorMode::symmetric:
      apply_sym(*factors_, x, y);
      break;
    case OperatorMode::sqrt_inv_w:
      apply_sqrt_inv_w(*factors_, x, y);
      break;
  }
}

namespace {

Matrix dense_function(const Matrix& q, const Vector& g) {
  const Eigen::Index d = q.rows();
  Matrix out = Matrix::Identity(d, d);
  out.noalias() += q * (g.array() - 1.0).matrix().asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

Matrix dense_operator(const ScatterFactorization& f, DenseKind kind, std::size_t oracle_cap) {
  require_oracle_scale(f.dim(), oracle_cap);
  switch (kind) {
    case DenseKind::exp_b:
      return dense_function(f.q_b, f.exp_d_b);
    case DenseKind::exp_neg_w:
      return dense_function(f.q_w, f.exp_neg_d_w);
    case DenseKind::exp_w:
      return dense_function(f.q_w, f.exp_d_w);
    case DenseKind::sqrt_exp_neg_w:
      return dense_function(f.q_w, f.exp_neg_half_d_w);
    case DenseKind::nonsymmetric:
      return dense_function(f.q_w, f.exp_neg_d_w) * dense_function(f.q_b, f.exp_d_b);
    case DenseKind::symmetric: {
      const Matrix half = dense_function(f.q_w, f.exp_neg_half_d_w);
      Matrix m = half * dense_function(f.q_b, f.exp_d_b) * half;
      return 0.5 * (m + m.transpose());
    }
  }
  throw Error("dense_operator: unknown kind");
}

}  // namespace expeda
