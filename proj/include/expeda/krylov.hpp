#pragma once

// Restarted Arnoldi / Lanczos eigensolvers for the dominant eigenpairs of a
// matrix-free operator.
//
// The solver keeps a Krylov decomposition
//     A V_m = V_m S_m + v_{m+1} b^T,
// stored as V = [V_m, v_{m+1}] and H = [S_m; b^T]. A fresh Arnoldi run gives
// b = beta e_m and upper-Hessenberg S; after a thick restart S carries a
// bridge row/column. Restarting compresses onto the wanted Ritz directions
// (Krylov-Schur style) and continues the expansion.

#include "expeda/dense.hpp"
#include "expeda/error.hpp"
#include "expeda/expops.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace expeda {

struct KrylovDecomposition {
  Matrix v;                 // d x (capacity + 1); columns [0, m] are valid
  Matrix h;                 // (capacity + 1) x capacity; block [0, m] x [0, m) is valid
  Eigen::Index m = 0;       // current subspace dimension
  bool breakdown = false;   // last expansion found an invariant subspace

  Eigen::Index capacity() const noexcept { return h.cols(); }
  /// d x (m + 1)
  Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true> basis() const { return v.leftCols(m + 1); }
  /// (m + 1) x m
  Eigen::Block<const Matrix> projected() const { return h.topLeftCorner(m + 1, m); }
};

/// Starts a decomposition from v1 (normalized internally).
KrylovDecomposition start_decomposition(const Vector& v1, Eigen::Index capacity);

/// Grows the subspace by up to `steps` Arnoldi steps with two passes of
/// classical Gram-Schmidt. Stops early on breakdown (orthogonalized norm below
/// 1e-14 relative to ||A v||), setting `breakdown`.
void expand(const LinearOperator& op, KrylovDecomposition& state, Eigen::Index steps);

/// After a breakdown, continues the basis with a random unit vector orthogonal
/// to the current one. Returns false when the basis already spans the space.
bool inject_direction(KrylovDecomposition& state, std::mt19937_64& rng);

struct RitzPair {
  double value = 0.0;     // real part of the Ritz value
  double imag = 0.0;      // imaginary part; zero in the symmetric case
  Vector vector;          // unit 2-norm
  double residual = 0.0;  // ||A x - theta x||
};

/// Rayleigh-Ritz on the current decomposition. Returns the t pairs of largest
/// |value|; residuals come from the Krylov relation, |b^T y|. Complex Ritz
/// values with |imag| > 1e-8 |value| are skipped in the nonsymmetric case.
std::vector<RitzPair> ritz_extract(const KrylovDecomposition& state, std::size_t t,
                                   bool symmetric);

struct SolverOptions {
  double tol = 1e-4;
  std::size_t max_basis = 0;  // 0: max(2t + 10, 40), clamped to the dimension
  std::size_t max_restarts = 300;
  std::uint64_t seed = 0;
};

struct SolveResult {
  std::vector<RitzPair> pairs;  // residuals are true residuals (one extra matvec each)
  std::size_t restarts = 0;
  std::size_t matvecs = 0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<RitzPair> best, std::size_t restarts)
      : Error(what), best_(std::move(best)), restarts_(restarts) {}
  const std::vector<RitzPair>& best() const noexcept { return best_; }
  std::size_t restarts() const noexcept { return restarts_; }

 private:
  std::vector<RitzPair> best_;
  std::size_t restarts_;
};

/// The t dominant eigenpairs of `op`, each with
/// residual <= tol * max(1, |theta|). Deterministic for a fixed seed.
SolveResult solve_dominant(const LinearOperator& op, std::size_t t, const SolverOptions& opts);

/// Default basis size for t wanted pairs in dimension d.
std::size_t default_max_basis(std::size_t t, std::size_t d);

}  // namespace expeda
