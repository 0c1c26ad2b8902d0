#pragma once

// Closed-form actions of exp(S_B), exp(-S_W) and their square roots on
// vectors, built from thin spectral factors of the scatter matrices.
//
// With S = Q D Q^T (Q d x p orthonormal, D diagonal) any f(S) acts as
//   f(S) v = Q f(D) Q^T v + f(0) (v - Q Q^T v),
// so each product costs O(p d) and no d x d matrix is ever formed.

#include "expeda/dense.hpp"
#include "expeda/scatter.hpp"

#include <memory>

namespace expeda {

struct ScatterFactorization {
  Matrix q_b;  // d x p_b, orthonormal
  Vector d_b;  // squared singular values of h_b, descending
  Matrix q_w;  // d x p_w, orthonormal
  Vector d_w;  // squared singular values of h_w, descending

  Vector exp_d_b;           // exp(d_b)
  Vector exp_neg_d_w;       // exp(-d_w)
  Vector exp_neg_half_d_w;  // exp(-d_w / 2)
  Vector exp_d_w;           // exp(d_w), used by the criterion

  std::size_t dim() const noexcept { return static_cast<std::size_t>(q_b.rows()); }
};

/// Relative cutoff below which singular values are treated as exact zeros.
inline constexpr double kSingularCutoff = 1e-12;

/// QR + small SVD of h_b and h_w. Cost O(d n^2).
ScatterFactorization preprocess(const ScatterPair& sp);

/// exp(-S_W) exp(S_B) v
Vector apply_nonsym(const ScatterFactorization& f, const Vector& v);
/// exp(-S_W/2) exp(S_B) exp(-S_W/2) v
Vector apply_sym(const ScatterFactorization& f, const Vector& v);
/// exp(-S_W/2) v
Vector apply_sqrt_inv_w(const ScatterFactorization& f, const Vector& v);
/// exp(S_B) v
Vector apply_exp_b(const ScatterFactorization& f, const Vector& v);
/// exp(-S_W) v
Vector apply_exp_neg_w(const ScatterFactorization& f, const Vector& v);
/// exp(S_W) v
Vector apply_exp_w(const ScatterFactorization& f, const Vector& v);

// Same products written into `out`, whose storage is reused when it already
// has the right size. These are the allocation-free forms used in the solver.
void apply_nonsym(const ScatterFactorization& f, const Vector& v, Vector& out);
void apply_sym(const ScatterFactorization& f, const Vector& v, Vector& out);
void apply_sqrt_inv_w(const ScatterFactorization& f, const Vector& v, Vector& out);
void apply_exp_b(const ScatterFactorization& f, const Vector& v, Vector& out);
void apply_exp_neg_w(const ScatterFactorization& f, const Vector& v, Vector& out);
void apply_exp_w(const ScatterFactorization& f, const Vector& v, Vector& out);

/// v <- Q diag(g) Q^T v + v - Q Q^T v, in place. `work` is resized as needed.
void apply_spectral_inplace(const Matrix& q, const Vector& g, Eigen::Ref<Vector> v,
                            Vector& work);

/// Matrix-free operator used by the Krylov solvers.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t dim() const = 0;
  virtual bool symmetric() const = 0;
  /// y = A x; y is resized by the callee.
  virtual void apply(const Vector& x, Vector& y) const = 0;
};

/// Wraps a dense square matrix; used by tests and small problems.
class DenseOperator final : public LinearOperator {
 public:
  DenseOperator(Matrix a, bool symmetric);
  std::size_t dim() const override { return static_cast<std::size_t>(a_.rows()); }
  bool symmetric() const override { return symmetric_; }
  void apply(const Vector& x, Vector& y) const override;

 private:
  Matrix a_;
  bool symmetric_;
};

enum class OperatorMode { nonsymmetric, symmetric, sqrt_inv_w };

/// exp(-S_W)exp(S_B), M, or exp(-S_W/2), applied through the factors.
/// Exposes products only, never entries.
class ExponentialOperator final : public LinearOperator {
 public:
  ExponentialOperator(std::shared_ptr<const ScatterFactorization> factors, OperatorMode mode);

  std::size_t dim() const override { return factors_->dim(); }
  bool symmetric() const override { return mode_ != OperatorMode::nonsymmetric; }
  void apply(const Vector& x, Vector& y) const override;

  OperatorMode mode() const noexcept { return mode_; }
  const ScatterFactorization& factors() const noexcept { return *factors_; }

 private:
  std::shared_ptr<const ScatterFactorization> factors_;
  OperatorMode mode_;
};

enum class DenseKind { exp_b, exp_neg_w, exp_w, sqrt_exp_neg_w, nonsymmetric, symmetric };

/// Assembles one of the operators densely from the factors. Oracle scale only.
Matrix dense_operator(const ScatterFactorization& f, DenseKind kind,
                      std::size_t oracle_cap = kDefaultOracleCap);

}  // namespace expeda
