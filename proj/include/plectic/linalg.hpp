#pragma once

// Floating-point dense linear algebra: one-sided Jacobi SVD, rank, kernels,
// LU solves and subspace comparisons. Works for real and complex scalars at
// any precision.

#include "plectic/dense.hpp"

#include <cmath>
#include <numeric>

namespace plectic {

template <class S>
struct Svd {
  std::vector<RealOf<S>> sigma;  // descending
  Matrix<S> U;                   // rows(A) x n, columns orthonormal where sigma > 0
  Matrix<S> V;                   // n x n unitary
};

/// A = U diag(sigma) V^H via Hestenes one-sided Jacobi rotations.
template <class S>
Svd<S> svd(const Matrix<S>& A) {
  using R = RealOf<S>;
  using std::abs;
  using std::sqrt;
  const std::size_t m = A.rows(), n = A.cols();
  const std::size_t mp = std::max(m, n);
  Matrix<S> W(mp, n);
  W.set_block(0, 0, A);
  Matrix<S> V = Matrix<S>::identity(n);
  const R eps = machine_epsilon<R>();

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        R alpha(0), beta(0);
        S gamma(0);
        for (std::size_t i = 0; i < mp; ++i) {
          alpha += abs2_of(W(i, p));
          beta += abs2_of(W(i, q));
          gamma += conj_of(W(i, p)) * W(i, q);
        }
        R g = abs_of(gamma);
        if (g == R(0) || g <= eps * sqrt(alpha * beta)) continue;
        rotated = true;
        // Rotate q by the phase of gamma so the pair becomes a real problem.
        S phase = conj_of(gamma) / S(g);
        if constexpr (ScalarTraits<S>::is_complex) {
          for (std::size_t i = 0; i < mp; ++i) W(i, q) *= phase;
          for (std::size_t i = 0; i < n; ++i) V(i, q) *= phase;
        } else {
          if (phase < R(0)) {
            for (std::size_t i = 0; i < mp; ++i) W(i, q) = -W(i, q);
            for (std::size_t i = 0; i < n; ++i) V(i, q) = -V(i, q);
          }
        }
        R zeta = (beta - alpha) / (R(2) * g);
        R t = (zeta >= R(0) ? R(1) : R(-1)) / (abs(zeta) + sqrt(R(1) + zeta * zeta));
        R c = R(1) / sqrt(R(1) + t * t);
        R s = c * t;
        for (std::size_t i = 0; i < mp; ++i) {
          S wp = W(i, p), wq = W(i, q);
          W(i, p) = S(c) * wp - S(s) * wq;
          W(i, q) = S(s) * wp + S(c) * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          S vp = V(i, p), vq = V(i, q);
          V(i, p) = S(c) * vp - S(s) * vq;
          V(i, q) = S(s) * vp + S(c) * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<R> sig(n);
  for (std::size_t j = 0; j < n; ++j) {
    R s(0);
    for (std::size_t i = 0; i < mp; ++i) s += abs2_of(W(i, j));
    sig[j] = sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sig[a] > sig[b]; });

  Svd<S> out;
  out.sigma.resize(n);
  out.U = Matrix<S>(m, n);
  out.V = Matrix<S>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = order[k];
    out.sigma[k] = sig[j];
    for (std::size_t i = 0; i < n; ++i) out.V(i, k) = V(i, j);
    if (sig[j] > R(0))
      for (std::size_t i = 0; i < m; ++i) out.U(i, k) = W(i, j) / S(sig[j]);
  }
  return out;
}

/// Singular values above tol * sigma_max count towards the rank.
template <class R>
std::size_t numerical_rank(const std::vector<R>& sigma, const R& tol) {
  if (sigma.empty() || sigma.front() == R(0)) return 0;
  R thresh = tol * sigma.front();
  std::size_t r = 0;
  for (const auto& s : sigma)
    if (s > thresh) ++r;
  return r;
}

template <class S>
std::size_t rank(const Matrix<S>& A, const RealOf<S>& tol) {
  if (A.empty()) return 0;
  return numerical_rank(svd(A).sigma, tol);
}

/// Orthonormal basis (columns) of ker A.
template <class S>
Matrix<S> null_space(const Matrix<S>& A, const RealOf<S>& tol) {
  const std::size_t n = A.cols();
  if (A.rows() == 0) return Matrix<S>::identity(n);
  auto d = svd(A);
  std::size_t r = numerical_rank(d.sigma, tol);
  return d.V.block(0, r, n, n - r);
}

/// Orthonormal basis (columns) of the column span of A.
template <class S>
Matrix<S> orthonormal_basis(const Matrix<S>& A, const RealOf<S>& tol) {
  if (A.cols() == 0) return Matrix<S>(A.rows(), 0);
  auto d = svd(A);
  std::size_t r = numerical_rank(d.sigma, tol);
  return d.U.block(0, 0, A.rows(), r);
}

template <class S>
struct LU {
  Matrix<S> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

/// Partial-pivot LU; throws NumericalError on a (numerically) singular matrix.
template <class S>
LU<S> lu_decompose(const Matrix<S>& A) {
  using R = RealOf<S>;
  if (A.rows() != A.cols()) throw DimensionError("LU of non-square matrix " + A.shape());
  const std::size_t n = A.rows();
  LU<S> f{A, std::vector<std::size_t>(n), 1};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  R scale = max_abs(A);
  R tiny = machine_epsilon<R>() * scale * R(static_cast<long long>(n + 1));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    R best = abs_of(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      R a = abs_of(f.lu(i, k));
      if (a > best) best = a, piv = i;
    }
    if (best <= tiny) throw NumericalError("singular matrix in LU decomposition");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      S l = f.lu(i, k) / f.lu(k, k);
      f.lu(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
    }
  }
  return f;
}

template <class S>
Matrix<S> lu_solve(const LU<S>& f, const Matrix<S>& B) {
  const std::size_t n = f.lu.rows();
  if (B.rows() != n) throw DimensionError("solve: rhs has wrong row count");
  Matrix<S> X(n, B.cols());
  for (std::size_t c = 0; c < B.cols(); ++c) {
    std::vector<S> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      S s = B(f.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      S s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * X(j, c);
      X(ii, c) = s / f.lu(ii, ii);
    }
  }
  return X;
}

template <class S>
Matrix<S> solve(const Matrix<S>& A, const Matrix<S>& B) {
  return lu_solve(lu_decompose(A), B);
}

template <class S>
Matrix<S> inverse(const Matrix<S>& A) {
  return solve(A, Matrix<S>::identity(A.rows()));
}

template <class S>
S determinant(const Matrix<S>& A) {
  if (A.rows() != A.cols()) throw DimensionError("determinant of non-square matrix");
  if (A.rows() == 0) return S(1);
  LU<S> f;
  try {
    f = lu_decompose(A);
  } catch (const NumericalError&) {
    return S(0);
  }
  S d = S(f.sign);
  for (std::size_t i = 0; i < A.rows(); ++i) d *= f.lu(i, i);
  return d;
}

/// Minimum-norm least-squares solution of A X = B.
template <class S>
Matrix<S> least_squares(const Matrix<S>& A, const Matrix<S>& B, const RealOf<S>& tol) {
  if (A.rows() != B.rows()) throw DimensionError("least squares: row mismatch");
  auto d = svd(A);
  std::size_t r = numerical_rank(d.sigma, tol);
  Matrix<S> UhB = d.U.block(0, 0, A.rows(), r).adjoint() * B;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < B.cols(); ++j) UhB(i, j) /= S(d.sigma[i]);
  return d.V.block(0, 0, A.cols(), r) * UhB;
}

/// Frobenius norm of the component of B orthogonal to span(A).
template <class S>
RealOf<S> projection_residual(const Matrix<S>& A, const Matrix<S>& B, const RealOf<S>& tol) {
  Matrix<S> Q = orthonormal_basis(A, tol);
  if (Q.cols() == 0) return frobenius_norm(B);
  return frobenius_norm(B - Q * (Q.adjoint() * B));
}

/// Sine of the largest principal angle between span(A) and span(B); 1 when
/// dimensions differ.
template <class S>
RealOf<S> subspace_distance(const Matrix<S>& A, const Matrix<S>& B, const RealOf<S>& tol) {
  using R = RealOf<S>;
  Matrix<S> Qa = orthonormal_basis(A, tol);
  Matrix<S> Qb = orthonormal_basis(B, tol);
  if (Qa.cols() != Qb.cols()) return R(1);
  if (Qa.cols() == 0) return R(0);
  Matrix<S> resid = Qb - Qa * (Qa.adjoint() * Qb);
  auto d = svd(resid);
  return d.sigma.empty() ? R(0) : d.sigma.front();
}

}  // namespace plectic
