#include "expeda/analysis.hpp"

#include "expeda/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace expeda {

namespace {

Vector padded(const Vector& values, Eigen::Index d, double fill) {
  Vector out = Vector::Constant(d, fill);
  const Eigen::Index n = std::min(values.size(), d);
  out.head(n) = values.head(n);
  std::sort(out.data(), out.data() + out.size(), std::greater<>());
  return out;
}

SpectrumSummary factor_spectra(const ScatterFactorization& f) {
  const auto d = static_cast<Eigen::Index>(f.dim());
  SpectrumSummary s;
  s.nu = padded(f.d_w, d, 0.0);
  s.mu = padded(f.d_b, d, 0.0);
  return s;
}

}  // namespace

SpectrumSummary spectrum_summary_compressed(const ScatterFactorization& f) {
  SpectrumSummary s = factor_spectra(f);
  const auto d = static_cast<Eigen::Index>(f.dim());
  const Eigen::Index p = f.q_b.cols() + f.q_w.cols();

  Matrix z;
  if (p >= d) {
    z = Matrix::Identity(d, d);
  } else {
    Matrix joined(d, p);
    joined << f.q_b, f.q_w;
    z = qr_skinny(joined).q;
  }
  Matrix mz(d, z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) mz.col(j) = apply_sym(f, z.col(j));
  Matrix c = z.transpose() * mz;
  c = 0.5 * (c + c.transpose());
  s.lambda_m = padded(sym_eig(c).values, d, 1.0);
  s.dense = false;
  return s;
}

SpectrumSummary spectrum_summary(const ScatterFactorization& f, std::size_t oracle_cap) {
  if (f.dim() > oracle_cap) return spectrum_summary_compressed(f);
  SpectrumSummary s = factor_spectra(f);
  s.lambda_m = sym_eig(dense_operator(f, DenseKind::symmetric, oracle_cap)).values;
  s.dense = true;
  return s;
}

Interval eig_bounds(const SpectrumSummary& s, std::size_t i) {
  const auto d = static_cast<std::size_t>(s.nu.size());
  if (i >= d) throw DimensionError("eig_bounds: index " + std::to_string(i) + " out of range");
  const auto ii = static_cast<Eigen::Index>(i);
  const auto last = static_cast<Eigen::Index>(d - 1);
  Interval out;
  out.lower = std::max(std::exp(s.mu(ii) - s.nu(0)), std::exp(s.mu(last) - s.nu(last - ii)));
  out.upper = std::min(std::exp(s.mu(ii) - s.nu(last)), std::exp(s.mu(0) - s.nu(last - ii)));
  return out;
}

Interval criterion_bounds(const SpectrumSummary& s, std::size_t t, CriterionKind kind) {
  const auto d = static_cast<Eigen::Index>(s.nu.size());
  const auto tt = static_cast<Eigen::Index>(t);
  if (tt < 1 || tt > d) throw DimensionError("criterion_bounds: t out of range");
  const Eigen::Index last = d - 1;

  std::function<double(double, double)> ratio;
  if (kind == CriterionKind::eda) {
    ratio = [](double mu, double nu) { return std::exp(mu - nu); };
  } else {
    if (!(s.nu(last) > 1e-10 * s.nu(0))) {
      throw SmallSampleSizeError("LDA criterion bounds need a nonsingular S_W");
    }
    ratio = [](double mu, double nu) { return mu / nu; };
  }

  Interval out;
  for (Eigen::Index j = 0; j < tt; ++j) {
    out.lower += std::max(ratio(s.mu(d - tt + j), s.nu(0)), ratio(s.mu(last), s.nu(tt - 1 - j)));
    out.upper += std::min(ratio(s.mu(j), s.nu(last)), ratio(s.mu(0), s.nu(last - j)));
  }
  return out;
}

std::size_t count_unit_eigs(const SpectrumSummary& s, double tol_eq) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < s.lambda_m.size(); ++i) {
    if (std::abs(s.lambda_m(i) - 1.0) <= tol_eq) ++count;
  }
  return count;
}

SubspaceAngle subspace_angle(const Matrix& v, const Matrix& w) {
  if (v.rows() != w.rows() || v.cols() != w.cols() || v.cols() < 1) {
    throw DimensionError("subspace_angle: bases must have the same shape");
  }
  const Matrix overlap = v.transpose() * w;
  const Matrix outside = w - v * overlap;

  SubspaceAngle out;
  const Vector outside_sv = Eigen::JacobiSVD<Matrix>(outside).singularValues();
  const Vector overlap_sv = Eigen::JacobiSVD<Matrix>(overlap).singularValues();
  out.sin_angle = std::clamp(outside_sv(0), 0.0, 1.0);
  out.cos_angle = std::clamp(overlap_sv(0), 0.0, 1.0);
  out.cos_min = std::clamp(overlap_sv(overlap_sv.size() - 1), 0.0, 1.0);
  return out;
}

bool distance_bound_check(double d_exact, double d_tilde, const SubspaceAngle& ang, double slack) {
  if (!(ang.cos_angle > 0.0)) {
    throw DataError("distance bound is inapplicable: the subspaces are orthogonal");
  }
  const double lower = (d_tilde - 2.0 * ang.sin_angle) / ang.cos_angle;
  const double upper = d_tilde * ang.cos_angle + 2.0 * ang.sin_angle;
  return lower - slack <= d_exact && d_exact <= upper + slack;
}

}  // namespace expeda
