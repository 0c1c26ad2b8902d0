#include "expeda/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace expeda {

namespace {

constexpr double kBreakdownTol = 1e-14;
constexpr double kComplexTol = 1e-8;

// Ritz data in the coordinates of the current basis.
struct SmallRitz {
  double value = 0.0;
  double imag = 0.0;
  Vector y;       // real part of the unit eigenvector of S
  Vector y_imag;  // imaginary part, complex pairs only
  double estimate = 0.0;
  bool is_complex() const { return y_imag.size() > 0; }
};

Vector random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return v / v.norm();
}

std::vector<SmallRitz> rayleigh_ritz(const KrylovDecomposition& state, bool symmetric) {
  const Eigen::Index m = state.m;
  const Matrix s = state.h.topLeftCorner(m, m);
  const Vector b = state.h.row(m).head(m).transpose();

  std::vector<SmallRitz> out;
  out.reserve(static_cast<std::size_t>(m));
  if (symmetric) {
    const Matrix sym = 0.5 * (s + s.transpose());
    const SymEig eig = sym_eig(sym);
    for (Eigen::Index i = 0; i < m; ++i) {
      SmallRitz r;
      r.value = eig.values(i);
      r.y = eig.vectors.col(i);
      r.estimate = std::abs(b.dot(r.y));
      out.push_back(std::move(r));
    }
  } else {
    Eigen::EigenSolver<Matrix> es(s, true);
    if (es.info() != Eigen::Success) throw Error("Rayleigh-Ritz: projected eigensolver failed");
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::complex<double> lambda = es.eigenvalues()(i);
      const Eigen::VectorXcd z = es.eigenvectors().col(i);
      SmallRitz r;
      r.value = lambda.real();
      r.imag = lambda.imag();
      if (std::abs(lambda.imag()) <= kComplexTol * std::abs(lambda)) {
        r.imag = 0.0;
        Vector y = z.real();
        if (y.norm() < 0.5 * z.norm()) y = z.imag();
        r.y = y / y.norm();
        r.estimate = std::abs(b.dot(r.y));
      } else {
        // Conjugate pairs: keep one representative, the one with imag > 0.
        if (lambda.imag() < 0.0) continue;
        const double nz = z.norm();
        r.y = z.real() / nz;
        r.y_imag = z.imag() / nz;
        r.estimate = std::hypot(b.dot(r.y), b.dot(r.y_imag));
      }
      out.push_back(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SmallRitz& x, const SmallRitz& y) {
    return std::hypot(x.value, x.imag) > std::hypot(y.value, y.imag);
  });
  return out;
}

std::vector<const SmallRitz*> wanted_set(const std::vector<SmallRitz>& all, std::size_t t) {
  std::vector<const SmallRitz*> out;
  for (const auto& r : all) {
    if (out.size() == t) break;
    if (!r.is_complex()) out.push_back(&r);
  }
  return out;
}

bool accepted(double residual, double value, double tol) {
  return residual <= tol * std::max(1.0, std::abs(value));
}

RitzPair lift(const KrylovDecomposition& state, const SmallRitz& r) {
  RitzPair p;
  p.value = r.value;
  p.imag = r.imag;
  p.vector = state.v.leftCols(state.m) * r.y;
  p.vector /= p.vector.norm();
  p.residual = r.estimate;
  return p;
}

// Compresses the decomposition onto the span of the leading `keep` Ritz
// directions. Returns false if that span is not numerically invariant for S
// (ill-conditioned eigenvectors), in which case nothing is modified.
bool compress(KrylovDecomposition& state, const std::vector<SmallRitz>& all, Eigen::Index keep) {
  const Eigen::Index m = state.m;
  Matrix x(m, keep + 1);
  Eigen::Index cols = 0;
  for (const auto& r : all) {
    if (cols >= keep) break;
    if (r.is_complex()) {
      if (cols + 2 > m - 1) continue;
      x.col(cols++) = r.y;
      x.col(cols++) = r.y_imag;
    } else {
      x.col(cols++) = r.y;
    }
  }
  if (cols == 0) return false;

  Eigen::HouseholderQR<Matrix> qr(x.leftCols(cols));
  const Matrix y = qr.householderQ() * Matrix::Identity(m, cols);
  const Matrix s = state.h.topLeftCorner(m, m);
  const Vector b = state.h.row(m).head(m).transpose();
  const Matrix s_new = y.transpose() * s * y;
  const double drift = (s * y - y * s_new).norm();
  if (drift > 1e-10 * std::max(1.0, s.norm())) return false;

  const Vector b_new = y.transpose() * b;
  const Matrix v_new = state.v.leftCols(m) * y;
  const Vector residual_vec = state.v.col(m);

  state.v.leftCols(cols) = v_new;
  state.v.col(cols) = residual_vec;
  state.v.rightCols(state.v.cols() - cols - 1).setZero();
  state.h.setZero();
  state.h.topLeftCorner(cols, cols) = s_new;
  state.h.row(cols).head(cols) = b_new.transpose();
  state.m = cols;
  return true;
}

}  // namespace

std::size_t default_max_basis(std::size_t t, std::size_t d) {
  return std::min(std::max<std::size_t>(2 * t + 10, 40), d);
}

KrylovDecomposition start_decomposition(const Vector& v1, Eigen::Index capacity) {
  if (capacity < 1) throw DimensionError("Krylov capacity must be positive");
  const double norm = v1.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DataError("starting vector must be nonzero and finite");
  KrylovDecomposition state;
  state.v = Matrix::Zero(v1.size(), capacity + 1);
  state.h = Matrix::Zero(capacity + 1, capacity);
  state.v.col(0) = v1 / norm;
  return state;
}

void expand(const LinearOperator& op, KrylovDecomposition& state, Eigen::Index steps) {
  if (static_cast<Eigen::Index>(op.dim()) != state.v.rows()) {
    throw DimensionError("expand: operator dimension " + std::to_string(op.dim()) +
                         " does not match basis dimension " + std::to_string(state.v.rows()));
  }
  if (steps < 1) throw DimensionError("expand: steps must be positive");

  Vector w;
  for (Eigen::Index s = 0; s < steps; ++s) {
    if (state.breakdown || state.m >= state.capacity()) break;
    const Eigen::Index j = state.m;
    op.apply(state.v.col(j), w);
    const double applied_norm = w.norm();

    const auto basis = state.v.leftCols(j + 1);
    Vector c = basis.transpose() * w;
    w.noalias() -= basis * c;
    const Vector c2 = basis.transpose() * w;
    w.noalias() -= basis * c2;
    c += c2;

    state.h.col(j).head(j + 1) = c;
    const double beta = w.norm();
    state.m = j + 1;
    if (beta <= kBreakdownTol * applied_norm || applied_norm == 0.0) {
      state.h(j + 1, j) = 0.0;
      state.v.col(j + 1).setZero();
      state.breakdown = true;
      break;
    }
    state.h(j + 1, j) = beta;
    state.v.col(j + 1) = w / beta;
  }
}

bool inject_direction(KrylovDecomposition& state, std::mt19937_64& rng) {
  const Eigen::Index m = state.m;
  if (m >= state.v.rows() || m > state.capacity()) return false;
  const auto basis = state.v.leftCols(m);
  for (int attempt = 0; attempt < 5; ++attempt) {
    Vector w = random_unit(static_cast<std::size_t>(state.v.rows()), rng);
    for (int pass = 0; pass < 2; ++pass) w.noalias() -= basis * (basis.transpose() * w);
    const double norm = w.norm();
    if (norm > 1e-8) {
      state.v.col(m) = w / norm;
      if (m > 0) state.h.row(m).setZero();
      state.breakdown = false;
      return true;
    }
  }
  return false;
}

std::vector<RitzPair> ritz_extract(const KrylovDecomposition& state, std::size_t t, bool symmetric) {
  if (t == 0) return {};
  if (static_cast<std::size_t>(state.m) < t) {
    throw DimensionError("ritz_extract: subspace dimension " + std::to_string(state.m) +
                         " is smaller than t = " + std::to_string(t));
  }
  const auto all = rayleigh_ritz(state, symmetric);
  std::vector<RitzPair> out;
  for (const SmallRitz* r : wanted_set(all, t)) out.push_back(lift(state, *r));
  return out;
}

SolveResult solve_dominant(const LinearOperator& op, std::size_t t, const SolverOptions& opts) {
  SolveResult result;
  if (t == 0) return result;
  if (!(opts.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  const std::size_t d = op.dim();
  std::size_t max_basis = opts.max_basis == 0 ? default_max_basis(t, d) : std::min(opts.max_basis, d);
  if (t > max_basis || (t == max_basis && max_basis < d)) {
    throw ConfigError("need t < max_basis <= d (t = " + std::to_string(t) +
                      ", max_basis = " + std::to_string(max_basis) + ", d = " + std::to_string(d) + ")");
  }
  const bool symmetric = op.symmetric();
  const auto cap = static_cast<Eigen::Index>(max_basis);

  std::mt19937_64 rng(opts.seed);
  KrylovDecomposition state = start_decomposition(random_unit(d, rng), cap);

  Vector av;
  // Ritz estimates are checked after every expansion step once t directions
  // exist, so a loose tolerance stops the solve early instead of finishing
  // the cycle. The small eigenproblem is cheap next to a matvec at large d.
  // A breakdown means one Krylov sequence has been exhausted; it holds only one
  // vector per distinct eigenvalue, so a multiple eigenvalue may be short of
  // directions. Early acceptance is then suspended until the cycle completes
  // from the injected directions.
  auto try_converge = [&](const std::vector<SmallRitz>& all, std::vector<RitzPair>& pairs) {
    const auto wanted = wanted_set(all, t);
    pairs.clear();
    for (const SmallRitz* r : wanted) pairs.push_back(lift(state, *r));
    if (wanted.size() != t) return false;
    for (const SmallRitz* r : wanted) {
      if (!accepted(r->estimate, r->value, opts.tol)) return false;
    }
    // Confirm against the operator itself.
    for (auto& p : pairs) {
      op.apply(p.vector, av);
      ++result.matvecs;
      p.residual = (av - p.value * p.vector).norm();
      if (!accepted(p.residual, p.value, opts.tol)) return false;
    }
    return true;
  };

  std::vector<RitzPair> pairs;
  std::vector<SmallRitz> all;
  for (std::size_t restart = 0;; ++restart) {
    bool broke_down = false;
    for (;;) {
      broke_down = broke_down || state.breakdown;
      const bool cycle_done = state.m >= cap || (state.breakdown && state.m >= state.v.rows());
      if (static_cast<std::size_t>(state.m) >= t && (!broke_down || cycle_done)) {
        all = rayleigh_ritz(state, symmetric);
        if (try_converge(all, pairs)) {
          result.pairs = std::move(pairs);
          result.restarts = restart;
          return result;
        }
      }
      if (state.m >= cap) break;
      if (state.breakdown && !inject_direction(state, rng)) break;
      expand(op, state, 1);
      ++result.matvecs;
    }

    if (restart >= opts.max_restarts) {
      throw ConvergenceError("Krylov solver did not converge in " + std::to_string(restart) +
                                 " restarts",
                             std::move(pairs), restart);
    }

    const Eigen::Index m = state.m;
    const auto tt = static_cast<Eigen::Index>(t);
    const Eigen::Index keep = std::clamp<Eigen::Index>(tt + (m - tt) / 2, std::min(tt, m - 1), m - 1);
    if (keep < 1 || !compress(state, all, keep)) {
      // Explicit restart from the combined wanted directions.
      Vector v1 = Vector::Zero(static_cast<Eigen::Index>(d));
      for (const auto& p : pairs) v1 += p.vector;
      if (!(v1.norm() > 0.0)) v1 = random_unit(d, rng);
      state = start_decomposition(v1, cap);
    }
  }
}

}  // namespace expeda
