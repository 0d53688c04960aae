#pragma once

// Exact integer-matrix and lattice algebra: Smith and Hermite normal forms,
// integer kernels and solves, quotients modulo torsion, and real lattice
// membership.

#include "plectic/linalg.hpp"

#include <optional>

namespace plectic {

// ---------------------------------------------------------------------------
// Integer helpers

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

inline BigInt mod_floor(const BigInt& a, const BigInt& b) { return a - floor_div(a, b) * b; }

inline BigInt gcd_of(const BigInt& a, const BigInt& b) { return mp::gcd(a, b); }

inline BigInt abs_int(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }

inline BigInt round_div(const BigRational& q) {
  BigInt n = mp::numerator(q), d = mp::denominator(q);
  return floor_div(2 * n + d, 2 * d);
}

inline bool is_integral(const BigRational& q) { return mp::denominator(q) == 1; }

/// Row vector v times matrix m.
template <class T>
std::vector<T> row_times(const std::vector<T>& v, const Matrix<T>& m) {
  if (v.size() != m.rows()) throw DimensionError("row vector length mismatch");
  std::vector<T> r(m.cols(), T(0));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != T(0))
      for (std::size_t j = 0; j < m.cols(); ++j) r[j] += v[i] * m(i, j);
  return r;
}

template <class T>
std::vector<T> times_col(const Matrix<T>& m, const std::vector<T>& v) {
  if (v.size() != m.cols()) throw DimensionError("column vector length mismatch");
  std::vector<T> r(m.rows(), T(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

// ---------------------------------------------------------------------------
// Smith normal form

struct SmithForm {
  IntMatrix U, D, V;  // U * m * V = D
  std::size_t rank = 0;
  std::vector<BigInt> invariants() const {
    std::vector<BigInt> d;
    for (std::size_t i = 0; i < rank; ++i) d.push_back(D(i, i));
    return d;
  }
};

namespace detail {

inline void swap_rows(IntMatrix& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(i, c), a(j, c));
}
inline void swap_cols(IntMatrix& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
}
// row_i += k * row_j
inline void add_row(IntMatrix& a, std::size_t i, std::size_t j, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) += k * a(j, c);
}
inline void add_col(IntMatrix& a, std::size_t i, std::size_t j, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t r = 0; r < a.rows(); ++r) a(r, i) += k * a(r, j);
}
inline void negate_row(IntMatrix& a, std::size_t i) {
  for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) = -a(i, c);
}

}  // namespace detail

inline SmithForm smith_normal_form(const IntMatrix& m) {
  using namespace detail;
  const std::size_t R = m.rows(), C = m.cols();
  SmithForm s{IntMatrix::identity(R), m, IntMatrix::identity(C), 0};
  IntMatrix& D = s.D;
  std::size_t t = 0;
  for (; t < std::min(R, C); ++t) {
    // Smallest nonzero entry in the trailing block becomes the pivot.
    for (;;) {
      std::size_t pi = R, pj = C;
      BigInt best;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j)
          if (D(i, j) != 0 && (pi == R || abs_int(D(i, j)) < best)) best = abs_int(D(i, j)), pi = i, pj = j;
      if (pi == R) goto done;
      swap_rows(D, t, pi);
      swap_rows(s.U, t, pi);
      swap_cols(D, t, pj);
      swap_cols(s.V, t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        BigInt q = floor_div(D(i, t), D(t, t));
        add_row(D, i, t, -q);
        add_row(s.U, i, t, -q);
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        BigInt q = floor_div(D(t, j), D(t, t));
        add_col(D, j, t, -q);
        add_col(s.V, j, t, -q);
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility: fold an offending row into row t and repeat.
      bool divides = true;
      for (std::size_t i = t + 1; i < R && divides; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (D(i, j) % D(t, t) != 0) {
            add_row(D, t, i, BigInt(1));
            add_row(s.U, t, i, BigInt(1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (D(t, t) < 0) {
      negate_row(D, t);
      negate_row(s.U, t);
    }
  }
done:
  s.rank = t;
  return s;
}

// ---------------------------------------------------------------------------
// Hermite normal form (row style)

struct HermiteForm {
  IntMatrix H;  // U * m = H, nonzero rows first, echelon with positive pivots
  IntMatrix U;
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

inline HermiteForm hermite_normal_form(const IntMatrix& m) {
  using namespace detail;
  const std::size_t R = m.rows(), C = m.cols();
  HermiteForm h{m, IntMatrix::identity(R), 0, {}};
  IntMatrix& H = h.H;
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    for (;;) {
      std::size_t pi = R;
      BigInt best;
      for (std::size_t i = row; i < R; ++i)
        if (H(i, col) != 0 && (pi == R || abs_int(H(i, col)) < best)) best = abs_int(H(i, col)), pi = i;
      if (pi == R) break;
      swap_rows(H, row, pi);
      swap_rows(h.U, row, pi);
      bool clean = true;
      for (std::size_t i = row + 1; i < R; ++i) {
        BigInt q = floor_div(H(i, col), H(row, col));
        add_row(H, i, row, -q);
        add_row(h.U, i, row, -q);
        if (H(i, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (H(row, col) == 0) continue;
    if (H(row, col) < 0) {
      negate_row(H, row);
      negate_row(h.U, row);
    }
    for (std::size_t i = 0; i < row; ++i) {
      BigInt q = floor_div(H(i, col), H(row, col));
      add_row(H, i, row, -q);
      add_row(h.U, i, row, -q);
    }
    h.pivots.push_back(col);
    ++row;
  }
  h.rank = row;
  return h;
}

/// Nonzero rows of the Hermite form: a canonical basis of the row lattice.
inline IntMatrix row_lattice_basis(const IntMatrix& m) {
  auto h = hermite_normal_form(m);
  return h.H.block(0, 0, h.rank, m.cols());
}

// ---------------------------------------------------------------------------
// Exact rational linear algebra

inline std::size_t rational_rank(const RatMatrix& m) {
  RatMatrix a = m;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r, j), a(p, j));
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (a(i, c) == 0) continue;
      BigRational f = a(i, c) / a(r, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  return r;
}

inline std::size_t rational_rank(const IntMatrix& m) { return rational_rank(to_rational(m)); }

/// Solves A X = B over Q; absent when inconsistent or A singular.
inline std::optional<RatMatrix> rational_solve(const RatMatrix& A, const RatMatrix& B) {
  if (A.rows() != A.cols() || A.rows() != B.rows()) throw DimensionError("rational_solve shape");
  const std::size_t n = A.rows();
  RatMatrix a = A, b = B;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return std::nullopt;
    for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(p, j));
    for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(c, j), b(p, j));
    BigRational inv = BigRational(1) / a(c, c);
    for (std::size_t j = 0; j < n; ++j) a(c, j) *= inv;
    for (std::size_t j = 0; j < b.cols(); ++j) b(c, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      BigRational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(c, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(c, j);
    }
  }
  return b;
}

inline std::optional<RatMatrix> rational_inverse(const RatMatrix& A) {
  return rational_solve(A, RatMatrix::identity(A.rows()));
}

/// Bareiss fraction-free determinant.
inline BigInt determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return BigInt(1);
  IntMatrix a = m;
  BigInt prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return BigInt(0);
      detail::swap_rows(a, k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

inline bool is_unimodular(const IntMatrix& m) {
  if (m.rows() != m.cols()) return false;
  BigInt d = determinant(m);
  return d == 1 || d == -1;
}

/// Inverse of a unimodular integer matrix.
inline IntMatrix unimodular_inverse(const IntMatrix& m) {
  if (!is_unimodular(m)) throw InputError("matrix is not unimodular");
  auto inv = rational_inverse(to_rational(m));
  return inv->map<BigInt>([](const BigRational& q) { return BigInt(mp::numerator(q)); });
}

// ---------------------------------------------------------------------------
// Integer kernels and solves

/// Z-basis (columns) of {x in Z^n : A x = 0}.
inline IntMatrix integer_kernel(const IntMatrix& A) {
  auto s = smith_normal_form(A);
  const std::size_t n = A.cols();
  return s.V.block(0, s.rank, n, n - s.rank);
}

/// Integer solution of A x = b (any one), absent if none exists.
inline std::optional<std::vector<BigInt>> integer_solve(const IntMatrix& A, const std::vector<BigInt>& b) {
  if (b.size() != A.rows()) throw DimensionError("integer_solve: rhs length");
  auto s = smith_normal_form(A);
  auto ub = times_col(s.U, b);
  std::vector<BigInt> y(A.cols(), BigInt(0));
  for (std::size_t i = 0; i < ub.size(); ++i) {
    if (i < s.rank) {
      if (ub[i] % s.D(i, i) != 0) return std::nullopt;
      y[i] = ub[i] / s.D(i, i);
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  return times_col(s.V, y);
}

// ---------------------------------------------------------------------------
// Lattices

struct Lattice {
  std::size_t ambient_rank = 0;
  IntMatrix basis;  // rows are Z-independent generators

  std::size_t rank() const { return basis.rows(); }

  static Lattice standard(std::size_t n) { return {n, IntMatrix::identity(n)}; }

  static Lattice from_basis(const IntMatrix& rows) {
    if (rational_rank(rows) != rows.rows()) throw InputError("lattice basis rows are linearly dependent");
    return {rows.cols(), rows};
  }

  /// Lattice generated by arbitrary (possibly dependent) rows.
  static Lattice generated_by(const IntMatrix& rows) { return {rows.cols(), row_lattice_basis(rows)}; }
};

/// Coordinates c (rows) with c * ambient.basis = sub.basis; absent when sub is
/// not contained in ambient.
inline std::optional<IntMatrix> coordinates_in(const Lattice& sub, const Lattice& ambient) {
  if (sub.ambient_rank != ambient.ambient_rank) throw DimensionError("lattices live in different ambient spaces");
  IntMatrix At = ambient.basis.transpose();
  IntMatrix C(sub.rank(), ambient.rank());
  for (std::size_t i = 0; i < sub.rank(); ++i) {
    auto x = integer_solve(At, sub.basis.row(i));
    if (!x) return std::nullopt;
    C.set_row(i, *x);
  }
  return C;
}

inline bool contains(const Lattice& ambient, const Lattice& sub) { return coordinates_in(sub, ambient).has_value(); }

struct QuotientResult {
  Lattice quotient;        // lifts in the ambient space of generators of ambient/sub mod torsion
  IntMatrix projection;    // ambient coordinates (row) * projection = quotient coordinates
  Lattice saturation;      // (sub ⊗ Q) ∩ ambient
  std::vector<BigInt> torsion;  // invariants d_i > 1 of ambient/sub
};

inline QuotientResult torsion_free_quotient_full(const Lattice& sub, const Lattice& ambient) {
  auto C = coordinates_in(sub, ambient);
  if (!C) throw InputError("torsion_free_quotient: sub is not contained in ambient");
  const std::size_t m = ambient.rank();
  auto s = smith_normal_form(*C);
  // Rows of V^{-1} * ambient.basis form an adapted basis: sub = span(d_i * b'_i).
  IntMatrix Bp = unimodular_inverse(s.V) * ambient.basis;
  QuotientResult q;
  q.quotient = {ambient.ambient_rank, Bp.block(s.rank, 0, m - s.rank, Bp.cols())};
  q.projection = s.V.block(0, s.rank, m, m - s.rank);
  q.saturation = {ambient.ambient_rank, Bp.block(0, 0, s.rank, Bp.cols())};
  for (const auto& d : s.invariants())
    if (d > 1) q.torsion.push_back(d);
  return q;
}

inline Lattice torsion_free_quotient(const Lattice& sub, const Lattice& ambient) {
  return torsion_free_quotient_full(sub, ambient).quotient;
}

inline Lattice saturation(const Lattice& sub, const Lattice& ambient) {
  return torsion_free_quotient_full(sub, ambient).saturation;
}

/// Integer coordinates c with ||v - c^T basis|| < tol, where basis rows are
/// real vectors; absent when no lattice vector is that close to the
/// least-squares solution.
template <class Real>
std::optional<std::vector<BigInt>> lattice_membership(const std::vector<Real>& v, const RMatrix<Real>& basis,
                                                      const Real& tol) {
  using std::sqrt;
  if (v.size() != basis.cols()) throw DimensionError("lattice_membership: vector length differs from embedding");
  const std::size_t k = basis.rows();
  if (k == 0) {
    Real s(0);
    for (const auto& x : v) s += x * x;
    if (sqrt(s) < tol) return std::vector<BigInt>{};
    return std::nullopt;
  }
  RMatrix<Real> Bt = basis.transpose();
  auto d = svd(Bt);
  if (numerical_rank(d.sigma, Real(64) * machine_epsilon<Real>() * Real(static_cast<long long>(k))) < k)
    throw InputError("lattice_membership: rank-deficient embedding");
  RMatrix<Real> x = least_squares(Bt, RMatrix<Real>::column(v), Real(0));
  std::vector<BigInt> c(k);
  std::vector<Real> r = v;
  for (std::size_t i = 0; i < k; ++i) {
    c[i] = round_to_bigint(x(i, 0));
    Real ci = to_real<Real>(c[i]);
    for (std::size_t j = 0; j < v.size(); ++j) r[j] -= ci * basis(i, j);
  }
  Real s(0);
  for (const auto& y : r) s += y * y;
  if (sqrt(s) < tol) return c;
  return std::nullopt;
}

template <class Real>
std::optional<std::vector<BigInt>> lattice_membership(const std::vector<Real>& v, const Lattice& L, const Real& tol) {
  return lattice_membership<Real>(v, to_floating<Real>(L.basis), tol);
}

/// Reduces v modulo the real lattice spanned by basis rows: returns the
/// representative v - c^T basis with c = round(least-squares coordinates), and c.
template <class Real>
std::pair<std::vector<Real>, std::vector<BigInt>> reduce_modulo(const std::vector<Real>& v, const RMatrix<Real>& basis) {
  const std::size_t k = basis.rows();
  RMatrix<Real> x = least_squares(basis.transpose(), RMatrix<Real>::column(v), Real(0));
  std::vector<BigInt> c(k);
  std::vector<Real> r = v;
  for (std::size_t i = 0; i < k; ++i) {
    c[i] = round_to_bigint(x(i, 0));
    Real ci = to_real<Real>(c[i]);
    for (std::size_t j = 0; j < v.size(); ++j) r[j] -= ci * basis(i, j);
  }
  return {r, c};
}

}  // namespace plectic
