#pragma once

// Dense kernels used by the factorization path and by the reference
// (oracle-scale) computations. Everything here is a pure function.

#include <Eigen/Dense>

#include <cstddef>

namespace expeda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default dimension above which dense d x d work is refused.
inline constexpr std::size_t kDefaultOracleCap = 1000;

struct QRFactors {
  Matrix q;  // d x m, orthonormal columns
  Matrix r;  // m x m, upper triangular, diag(r) >= 0
};

struct SVDFactors {
  Matrix u;      // m x m
  Vector sigma;  // descending
  Matrix v;      // m x m
};

struct SymEig {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, aligned with values
};

/// Throws DataError if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& a, const char* what);

/// Throws OracleScaleError if dim > cap.
void require_oracle_scale(std::size_t dim, std::size_t cap);

/// Householder QR of a tall matrix, thin factors. Column signs are flipped so
/// that diag(r) >= 0; diagonal entries at rounding level are set to zero.
QRFactors qr_skinny(const Matrix& a);

/// Full SVD of a small square matrix, singular values descending.
SVDFactors svd_small(const Matrix& r);

/// Eigendecomposition of a symmetric matrix, values descending. Ties keep
/// the order produced by the underlying solver.
SymEig sym_eig(const Matrix& a);

/// exp(a) for symmetric a via its spectral decomposition.
Matrix expm_sym(const Matrix& a, std::size_t oracle_cap = kDefaultOracleCap);

/// Orthonormal basis of span(a) via Householder QR. Each column is signed so
/// its largest-magnitude entry (first one on ties) is positive.
Matrix orthonormalize(const Matrix& a);

/// Largest |a_ij|.
double max_abs(const Eigen::Ref<const Matrix>& a);

}  // namespace expeda
