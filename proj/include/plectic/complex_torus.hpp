#pragma once

// Endomorphisms and homomorphisms of complex tori, found as integer kernels of
// the complex-linearity condition K2 N = N K1 via floating-point LLL.

#include "plectic/torus.hpp"

#include <array>
#include <cmath>

namespace plectic {

namespace detail {

/// LLL reduction (delta = 0.99) of the rows of a real matrix, in long double.
/// Returns the reduced rows; the caller embeds an identity block to recover
/// integer transforms.
inline std::vector<std::vector<long double>> lll_reduce(std::vector<std::vector<long double>> b) {
  const std::size_t n = b.size();
  if (n == 0) return b;
  const std::size_t D = b[0].size();
  const long double delta = 0.99L;
  auto dot = [&](const std::vector<long double>& x, const std::vector<long double>& y) {
    long double s = 0;
    for (std::size_t i = 0; i < D; ++i) s += x[i] * y[i];
    return s;
  };
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0));
  std::vector<long double> B(n, 0);
  std::vector<std::vector<long double>> bs(n);
  auto gram_schmidt = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      bs[i] = b[i];
      for (std::size_t j = 0; j < i; ++j) {
        mu[i][j] = B[j] > 0 ? dot(b[i], bs[j]) / B[j] : 0;
        for (std::size_t k = 0; k < D; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
      }
      B[i] = dot(bs[i], bs[i]);
    }
  };
  gram_schmidt();
  std::size_t k = 1;
  std::size_t iterations = 0;
  while (k < n) {
    if (++iterations > 200000) throw NumericalError("LLL did not converge");
    for (std::size_t jj = k; jj-- > 0;) {
      long double q = std::round(mu[k][jj]);
      if (q == 0) continue;
      for (std::size_t c = 0; c < D; ++c) b[k][c] -= q * b[jj][c];
      for (std::size_t l = 0; l < jj; ++l) mu[k][l] -= q * mu[jj][l];
      mu[k][jj] -= q;
    }
    if (B[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      ++k;
      continue;
    }
    std::swap(b[k], b[k - 1]);
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu[k][j], mu[k - 1][j]);
    long double m = mu[k][k - 1];
    long double Bn = B[k] + m * m * B[k - 1];
    if (Bn <= 0) {
      gram_schmidt();
    } else {
      mu[k][k - 1] = m * B[k - 1] / Bn;
      B[k] = B[k - 1] * B[k] / Bn;
      B[k - 1] = Bn;
      for (std::size_t i = k + 1; i < n; ++i) {
        long double t = mu[i][k];
        mu[i][k] = mu[i][k - 1] - m * t;
        mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
      }
    }
    if (k > 1) --k;
  }
  return b;
}

}  // namespace detail

/// Integer matrices N (rows2 x cols1 = 2g2 x 2g1) with K2 N = N K1, where K_i
/// are the transported complex structures. Returns an LLL-reduced Z-basis of
/// the solutions (verified at working precision).
template <class Real>
std::vector<IntMatrix> complex_linear_integer_maps(const RMatrix<Real>& K1, const RMatrix<Real>& K2, const Real& tol) {
  const std::size_t a = K2.rows(), b = K1.rows();
  const std::size_t nv = a * b;
  // Column of the linear map vec(N) -> vec(K2 N - N K1) for the unit matrix E_{rc}.
  RMatrix<Real> C(nv, nv);
  Real cmax(0);
  for (std::size_t r = 0; r < a; ++r)
    for (std::size_t c = 0; c < b; ++c) {
      std::size_t col = r * b + c;
      for (std::size_t i = 0; i < a; ++i) C(i * b + c, col) += K2(i, r);
      for (std::size_t j = 0; j < b; ++j) C(r * b + j, col) -= K1(c, j);
    }
  for (const auto& x : C.data()) {
    Real ax = abs_of(x);
    if (ax > cmax) cmax = ax;
  }
  if (cmax == Real(0)) cmax = Real(1);

  std::size_t expected = null_space(C, tol).cols();
  if (expected == 0) return {};

  // The real null space only bounds the integral rank, so keep the scale
  // that yields the most verified solutions.
  std::vector<IntMatrix> out, best;
  for (long double scale : {1e8L, 1e11L, 1e14L}) {
    std::vector<std::vector<long double>> rows(nv, std::vector<long double>(2 * nv, 0));
    for (std::size_t i = 0; i < nv; ++i) {
      rows[i][i] = 1;
      for (std::size_t k = 0; k < nv; ++k)
        rows[i][nv + k] = scale * to_long_double(Real(C(k, i) / cmax));
    }
    auto red = detail::lll_reduce(rows);
    out.clear();
    for (const auto& row : red) {
      IntMatrix N(a, b);
      for (std::size_t i = 0; i < nv; ++i) N(i / b, i % b) = BigInt(static_cast<long long>(std::llround(row[i])));
      if (is_zero(N)) continue;
      RMatrix<Real> Nf = to_floating<Real>(N);
      Real res = max_abs(RMatrix<Real>(K2 * Nf - Nf * K1));
      Real nn = max_abs(Nf);
      if (res <= tol * cmax * (Real(1) + nn)) out.push_back(N);
    }
    if (out.size() > best.size()) best = out;
    if (best.size() >= expected) break;
  }
  if (best.size() > expected) best.resize(expected);
  return best;
}

template <class Real>
struct Endomorphism {
  IntMatrix rational;     // 2g x 2g action on lattice coordinates
  CMatrix<Real> analytic; // g x g with analytic * periods = periods * rational
  Real residual{};
};

/// Complex matrix M with M Π = Π N.
template <class Real>
std::pair<CMatrix<Real>, Real> analytic_representation(const CMatrix<Real>& periods, const IntMatrix& N) {
  ComplexTorus<Real> t(periods);
  return complex_map_for(t, t, N);
}

/// Z-basis of End(T) ⊂ End_Z(Λ), restricted to basis elements with entries
/// bounded by height_bound.
template <class Real>
std::vector<Endomorphism<Real>> endomorphisms(const ComplexTorus<Real>& t, long long height_bound, const Real& tol) {
  if (height_bound < 1) throw InputError("height_bound must be at least 1");
  RMatrix<Real> K = lattice_complex_structure(t.periods);
  std::vector<Endomorphism<Real>> out;
  for (const auto& N : complex_linear_integer_maps(K, K, tol)) {
    if (max_abs(to_floating<Real>(N)) > Real(height_bound)) continue;
    auto [M, res] = analytic_representation(t.periods, N);
    if (res > tol) continue;
    out.push_back({N, M, res});
  }
  return out;
}

/// Integer matrices N with A Π1 = Π2 N for some complex A.
template <class Real>
std::vector<IntMatrix> homomorphism_lattice(const ComplexTorus<Real>& t1, const ComplexTorus<Real>& t2, const Real& tol) {
  return complex_linear_integer_maps(lattice_complex_structure(t1.periods), lattice_complex_structure(t2.periods), tol);
}

template <class Real>
struct TorusIsomorphism {
  IntMatrix U;      // Π2 U = A Π1
  CMatrix<Real> A;
  Real residual{};
};

/// Searches the homomorphism lattice for a unimodular element, trying
/// integer combinations of the reduced basis with coefficients in
/// [-coeff_bound, coeff_bound].
template <class Real>
std::optional<TorusIsomorphism<Real>> find_isomorphism(const ComplexTorus<Real>& t1, const ComplexTorus<Real>& t2,
                                                       const Real& tol, int coeff_bound = 1) {
  if (t1.g != t2.g) return std::nullopt;
  auto basis = homomorphism_lattice(t1, t2, tol);
  const std::size_t r = basis.size();
  if (r == 0) return std::nullopt;
  std::vector<int> c(r, -coeff_bound);
  const std::size_t dim = 2 * t1.g;
  for (;;) {
    IntMatrix N(dim, dim);
    for (std::size_t i = 0; i < r; ++i)
      if (c[i] != 0) N += basis[i] * BigInt(c[i]);
    if (is_unimodular(N)) {
      auto [A, res] = complex_map_for(t1, t2, N);
      if (res < tol) return TorusIsomorphism<Real>{N, A, res};
    }
    std::size_t i = 0;
    while (i < r && c[i] == coeff_bound) c[i++] = -coeff_bound;
    if (i == r) break;
    ++c[i];
  }
  return std::nullopt;
}

/// Reduces τ in the upper half plane to the standard fundamental domain.
/// Returns τ' and (a, b, c, d) with τ' = (aτ + b) / (cτ + d).
template <class Real>
std::pair<Complex<Real>, std::array<BigInt, 4>> reduce_upper_half_plane(Complex<Real> tau) {
  if (!(tau.imag() > Real(0))) throw InputError("tau must lie in the upper half plane");
  std::array<BigInt, 4> m{BigInt(1), BigInt(0), BigInt(0), BigInt(1)};
  for (int it = 0; it < 10000; ++it) {
    BigInt k = round_to_bigint(tau.real());
    if (k != 0) {
      tau -= Complex<Real>(to_real<Real>(k), Real(0));
      m[0] -= k * m[2];
      m[1] -= k * m[3];
    }
    if (abs2_of(tau) < Real(1) - Real(64) * machine_epsilon<Real>()) {
      tau = Complex<Real>(Real(-1), Real(0)) / tau;
      m = {BigInt(-m[2]), BigInt(-m[3]), m[0], m[1]};
    } else {
      break;
    }
  }
  return {tau, m};
}

}  // namespace plectic
