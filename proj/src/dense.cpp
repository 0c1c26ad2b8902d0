#include "expeda/dense.hpp"

#include "expeda/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace expeda {

void require_finite(const Eigen::Ref<const Matrix>& a, const char* what) {
  if (!a.allFinite()) {
    throw DataError(std::string(what) + ": non-finite entry");
  }
}

void require_oracle_scale(std::size_t dim, std::size_t cap) {
  if (dim > cap) throw OracleScaleError(dim, cap);
}

double max_abs(const Eigen::Ref<const Matrix>& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

QRFactors qr_skinny(const Matrix& a) {
  const Eigen::Index d = a.rows();
  const Eigen::Index m = a.cols();
  if (d < 1 || m < 1) throw DimensionError("qr_skinny: empty matrix");
  if (d < m) {
    throw DimensionError("qr_skinny: need rows >= cols, got " +
                         std::to_string(d) + "x" + std::to_string(m));
  }
  require_finite(a, "qr_skinny");

  Eigen::HouseholderQR<Matrix> qr(a);
  QRFactors out;
  out.q = qr.householderQ() * Matrix::Identity(d, m);
  out.r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();

  const double scale = std::max(1.0, max_abs(out.r));
  const double tiny = std::numeric_limits<double>::epsilon() *
                      static_cast<double>(std::max(d, m)) * scale;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (out.r(j, j) < 0.0) {
      out.r.row(j) *= -1.0;
      out.q.col(j) *= -1.0;
    }
    if (out.r(j, j) <= tiny) out.r(j, j) = 0.0;
  }
  return out;
}

SVDFactors svd_small(const Matrix& r) {
  if (r.rows() != r.cols() || r.rows() < 1) {
    throw DimensionError("svd_small: expected a non-empty square matrix");
  }
  require_finite(r, "svd_small");
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw DimensionError("sym_eig: expected a non-empty square matrix");
  }
  require_finite(a, "sym_eig");
  const double amax = max_abs(a);
  if (max_abs(a - a.transpose()) > 1e-12 * amax) {
    throw SymmetryError("sym_eig: matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw Error("sym_eig: eigensolver did not converge");
  }
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return ev(x) > ev(y); });

  SymEig out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = ev(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Matrix expm_sym(const Matrix& a, std::size_t oracle_cap) {
  require_oracle_scale(static_cast<std::size_t>(a.rows()), oracle_cap);
  const SymEig eig = sym_eig(a);
  const Vector e = eig.values.array().exp();
  Matrix out = eig.vectors * e.asDiagonal() * eig.vectors.transpose();
  // Symmetrize away the rounding asymmetry of the triple product.
  return 0.5 * (out + out.transpose());
}

Matrix orthonormalize(const Matrix& a) {
  Matrix q = qr_skinny(a).q;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const double v = std::abs(q(i, j));
      if (v > best) {
        best = v;
        imax = i;
      }
    }
    if (q(imax, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace expeda
