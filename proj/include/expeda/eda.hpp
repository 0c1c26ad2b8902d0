#pragma once

// Fitting pipelines: the two inexact Krylov EDA solvers, the dense EDA
// reference, and the classical LDA and LDA+PCA baselines.

#include "expeda/dense.hpp"
#include "expeda/expops.hpp"
#include "expeda/krylov.hpp"
#include "expeda/scatter.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace expeda {

enum class Method { arnoldi_eda, lanczos_eda, eda_dense, classical_lda, lda_pca };

std::string_view method_name(Method m);
/// Accepts the names printed by method_name; throws ConfigError otherwise.
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

/// d x t projection with orthonormal columns.
struct ProjectionBasis {
  Matrix v;
  Method method = Method::arnoldi_eda;
  double tol = 0.0;           // solver tolerance; 0 for direct methods
  Vector eigenvalues;         // descending, aligned with the columns before orthonormalization
  bool small_sample_size = false;  // S_W was singular (LDA baselines)
  std::size_t matvecs = 0;
  std::size_t restarts = 0;

  std::size_t t() const noexcept { return static_cast<std::size_t>(v.cols()); }
};

struct FitOptions {
  std::size_t t = 0;  // 0 selects k - 1
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::size_t max_basis = 0;
  std::size_t max_restarts = 300;
  std::size_t oracle_cap = kDefaultOracleCap;
  double pca_energy = 0.99;
};

/// Relative cutoff for the pseudo-inverse of S_W in classical LDA.
inline constexpr double kLdaRankCutoff = 1e-10;

ProjectionBasis fit_arnoldi_eda(const LabeledDataset& ds, const FitOptions& opts);
ProjectionBasis fit_lanczos_eda(const LabeledDataset& ds, const FitOptions& opts);
ProjectionBasis fit_eda_dense(const LabeledDataset& ds, const FitOptions& opts);
ProjectionBasis fit_classical_lda(const LabeledDataset& ds, const FitOptions& opts);
ProjectionBasis fit_lda_pca(const LabeledDataset& ds, const FitOptions& opts);

/// Variants working from an existing factorization.
ProjectionBasis fit_arnoldi_eda(std::shared_ptr<const ScatterFactorization> f, std::size_t t,
                                const FitOptions& opts);
ProjectionBasis fit_lanczos_eda(std::shared_ptr<const ScatterFactorization> f, std::size_t t,
                                const FitOptions& opts);
ProjectionBasis fit_eda_dense(const ScatterFactorization& f, std::size_t t, std::size_t oracle_cap);
ProjectionBasis fit_classical_lda(const ScatterPair& sp, std::size_t t, std::size_t oracle_cap);

ProjectionBasis fit(Method method, const LabeledDataset& ds, const FitOptions& opts);

/// Resolves opts.t (0 -> k - 1) and checks 1 <= t <= d.
std::size_t resolve_t(const LabeledDataset& ds, std::size_t t);

enum class CriterionKind { eda, lda };

struct CriterionValue {
  double value = 0.0;
  CriterionKind kind = CriterionKind::eda;
};

/// tr((V^T exp(S_W) V)^{-1} V^T exp(S_B) V) through the factors; V must be
/// orthonormal.
CriterionValue eda_criterion(const ScatterFactorization& f, const Matrix& v);
/// tr((V^T S_W V)^{-1} V^T S_B V); SmallSampleSizeError if V^T S_W V is singular.
CriterionValue lda_criterion(const ScatterPair& sp, const Matrix& v);

/// Throws if ||V^T V - I||_max > tol.
void require_orthonormal(const Matrix& v, double tol = 1e-10);

}  // namespace expeda
