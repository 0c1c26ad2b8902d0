#pragma once

// Numeric checks of the spectral theory behind EDA: eigenvalue and
// criterion sandwiches, the count of unit eigenvalues of M, subspace angles
// and the distance-perturbation inequality used to justify loose solver
// tolerances. All indices are 0-based.

#include "expeda/dense.hpp"
#include "expeda/eda.hpp"
#include "expeda/expops.hpp"
#include "expeda/scatter.hpp"

namespace expeda {

/// Aligned descending spectra of S_W (nu), S_B (mu) and M (lambda_m), each of
/// length d.
struct SpectrumSummary {
  Vector nu;
  Vector mu;
  Vector lambda_m;
  bool dense = false;  // lambda_m from a dense eigensolve rather than compressed
};

/// nu and mu come from the factor spectra padded with zeros. lambda_m is
/// computed densely when d <= oracle_cap, otherwise from M restricted to
/// span{Q_B, Q_W} padded with ones (M is the identity on its complement).
SpectrumSummary spectrum_summary(const ScatterFactorization& f,
                                 std::size_t oracle_cap = kDefaultOracleCap);

/// Always uses the compressed route; works at any d.
SpectrumSummary spectrum_summary_compressed(const ScatterFactorization& f);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Sandwich for lambda_i(M):
///   max{exp(mu_i - nu_1), exp(mu_d - nu_{d-i+1})} <= lambda_i(M)
///                  <= min{exp(mu_i - nu_d), exp(mu_1 - nu_{d-i+1})}
/// (1-based in the formula; `i` here is 0-based).
Interval eig_bounds(const SpectrumSummary& s, std::size_t i);

/// Bounds on the optimal EDA criterion (kind = eda) or the optimal ratio-trace
/// LDA criterion (kind = lda) for projection dimension t. The LDA bounds need
/// a nonsingular S_W: nu_d > 1e-10 nu_1, else SmallSampleSizeError.
Interval criterion_bounds(const SpectrumSummary& s, std::size_t t, CriterionKind kind);

/// Number of lambda_i(M) with |lambda_i - 1| <= tol_eq.
std::size_t count_unit_eigs(const SpectrumSummary& s, double tol_eq = 1e-8);

struct SubspaceAngle {
  double sin_angle = 0.0;  // ||(I - V V^T) W||_2, sine of the largest principal angle
  double cos_angle = 1.0;  // ||V^T W||_2
  double cos_min = 1.0;    // sigma_min(V^T W), cosine of the largest principal angle
};

/// Both inputs must have orthonormal columns, the same d and the same t.
SubspaceAngle subspace_angle(const Matrix& v, const Matrix& w);

/// The distance-perturbation inequality for unit-norm samples:
///   (d_tilde - 2 sin) / cos <= d_exact <= d_tilde cos + 2 sin.
/// `slack` absorbs rounding. Throws DataError if cos_angle == 0.
bool distance_bound_check(double d_exact, double d_tilde, const SubspaceAngle& ang,
                          double slack = 1e-12);

}  // namespace expeda
