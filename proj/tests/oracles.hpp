#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's algorithms beyond its value types.

#include "plectic/dense.hpp"

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace oracle {

using plectic::BigInt;
using plectic::IntMatrix;

/// Determinant by cofactor expansion along the first row.
inline BigInt laplace_det(const std::vector<std::vector<BigInt>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  BigInt total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    std::vector<std::vector<BigInt>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<BigInt> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    BigInt c = a[0][j] * laplace_det(minor);
    total += (j % 2 == 0) ? c : BigInt(-c);
  }
  return total;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Smith invariants via determinantal divisors: d_k = gcd of k x k minors,
/// s_k = d_k / d_{k-1}. Returns the nonzero invariants.
inline std::vector<BigInt> smith_invariants(const IntMatrix& m) {
  std::vector<BigInt> out;
  BigInt prev = 1;
  for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(m.rows(), k, 0, cur, rs);
    subsets(m.cols(), k, 0, cur, cs);
    BigInt g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        std::vector<std::vector<BigInt>> a(k, std::vector<BigInt>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) a[i][j] = m(r[i], c[j]);
        BigInt d = laplace_det(a);
        if (d < 0) d = -d;
        g = boost::multiprecision::gcd(g, d);
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

/// Brute-force Kunneth count: bidegree sums over all pairs of factor pieces,
/// returns the multiset of (|alpha|, |beta|) totals for a product of n
/// elliptic H^1 structures.
inline std::map<std::pair<int, int>, int> kunneth_hodge_numbers(int n) {
  std::map<std::pair<int, int>, int> h;
  for (int mask = 0; mask < (1 << n); ++mask) {
    int p = __builtin_popcount(mask);
    h[{p, n - p}] += 1;
  }
  return h;
}

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Exhaustive endomorphism search on an elliptic curve C/(Z + tau Z) with
/// lattice basis (1, tau): integer matrices N = [[a, b], [c, d]] acting on
/// column coordinates, such that multiplication by m = a + c tau preserves
/// the lattice: m * 1 = a + c tau, m * tau = b + d tau. Returns all (a,b,c,d)
/// with |entries| <= bound.
inline std::vector<std::array<long long, 4>> elliptic_endomorphisms(std::complex<double> tau, long long bound,
                                                                     double tol = 1e-9) {
  std::vector<std::array<long long, 4>> out;
  for (long long a = -bound; a <= bound; ++a)
    for (long long b = -bound; b <= bound; ++b)
      for (long long c = -bound; c <= bound; ++c)
        for (long long d = -bound; d <= bound; ++d) {
          std::complex<double> m = double(a) + double(c) * tau;
          std::complex<double> lhs = m * tau;
          std::complex<double> rhs = double(b) + double(d) * tau;
          if (std::abs(lhs - rhs) < tol) out.push_back({a, b, c, d});
        }
  return out;
}


/// Exhaustive search for integer 4x4 N with |entries| <= bound and
/// A Π = Π N for some complex 2x2 A, on a 2-dimensional torus whose first two
/// periods are C-independent. A is fixed by the first two columns of N; the
/// last two columns are then forced and only need an integrality test.
inline std::vector<std::array<long long, 16>> torus2_endomorphisms(const std::array<std::complex<double>, 8>& pi,
                                                                  long long bound, double tol = 1e-7) {
  using cd = std::complex<double>;
  auto col = [&](int j) { return std::array<cd, 2>{pi[j], pi[4 + j]}; };
  // M = [Π e1 Π e2]^{-1}
  cd a = pi[0], b = pi[1], c = pi[4], d = pi[5];
  cd det = a * d - b * c;
  cd Mi[2][2] = {{d / det, -b / det}, {-c / det, a / det}};
  // s[k][j]: A Π e_j = Σ_k s[k][j] Π v_k
  cd s[2][2];
  for (int j = 0; j < 2; ++j) {
    auto pj = col(2 + j);
    for (int k = 0; k < 2; ++k) s[k][j] = Mi[k][0] * pj[0] + Mi[k][1] * pj[1];
  }
  // Real coordinates w.r.t. the lattice basis: solve the 4x4 real system.
  double P[4][4];
  for (int j = 0; j < 4; ++j) {
    P[0][j] = pi[j].real();
    P[1][j] = pi[4 + j].real();
    P[2][j] = pi[j].imag();
    P[3][j] = pi[4 + j].imag();
  }
  auto coords = [&](std::array<cd, 2> w) {
    double A[4][5];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) A[i][j] = P[i][j];
    }
    A[0][4] = w[0].real();
    A[1][4] = w[1].real();
    A[2][4] = w[0].imag();
    A[3][4] = w[1].imag();
    for (int k = 0; k < 4; ++k) {
      int piv = k;
      for (int i = k + 1; i < 4; ++i)
        if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
      for (int j = 0; j < 5; ++j) std::swap(A[k][j], A[piv][j]);
      for (int i = 0; i < 4; ++i) {
        if (i == k) continue;
        double f = A[i][k] / A[k][k];
        for (int j = k; j < 5; ++j) A[i][j] -= f * A[k][j];
      }
    }
    std::array<double, 4> x;
    for (int i = 0; i < 4; ++i) x[i] = A[i][4] / A[i][i];
    return x;
  };
  std::vector<std::array<long long, 4>> vs;
  std::vector<std::array<double, 8>> part1, part2;  // contributions to columns 3 and 4
  const long long w = 2 * bound + 1;
  for (long long idx = 0; idx < w * w * w * w; ++idx) {
    std::array<long long, 4> v;
    long long t = idx;
    for (auto& e : v) {
      e = t % w - bound;
      t /= w;
    }
    std::array<cd, 2> pv{0, 0};
    for (int j = 0; j < 4; ++j) {
      pv[0] += double(v[j]) * pi[j];
      pv[1] += double(v[j]) * pi[4 + j];
    }
    std::array<double, 8> c1, c2;
    for (int j = 0; j < 2; ++j) {
      auto x1 = coords({s[0][j] * pv[0], s[0][j] * pv[1]});
      auto x2 = coords({s[1][j] * pv[0], s[1][j] * pv[1]});
      for (int i = 0; i < 4; ++i) {
        c1[4 * j + i] = x1[i];
        c2[4 * j + i] = x2[i];
      }
    }
    vs.push_back(v);
    part1.push_back(c1);
    part2.push_back(c2);
  }
  std::vector<std::array<long long, 16>> out;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t k = 0; k < vs.size(); ++k) {
      bool ok = true;
      std::array<long long, 8> rest{};
      for (int e = 0; e < 8 && ok; ++e) {
        double x = part1[i][e] + part2[k][e];
        double r = std::round(x);
        if (std::abs(x - r) > tol || std::abs(r) > double(bound)) ok = false;
        else rest[e] = static_cast<long long>(r);
      }
      if (!ok) continue;
      std::array<long long, 16> N{};
      for (int r = 0; r < 4; ++r) {
        N[r * 4 + 0] = vs[i][r];
        N[r * 4 + 1] = vs[k][r];
        N[r * 4 + 2] = rest[r];
        N[r * 4 + 3] = rest[4 + r];
      }
      out.push_back(N);
    }
  return out;
}


/// A constant form c · g_1 ∧ ... ∧ g_k with generators keyed dz_j -> j,
/// dz̄_j -> n + j and kept in ascending order.
struct ConstantForm {
  std::vector<int> gens;
  std::complex<double> coeff;
};

inline std::vector<int> generators(unsigned alpha, unsigned beta, int n) {
  std::vector<int> g;
  for (int j = 0; j < n; ++j)
    if (alpha >> j & 1u) g.push_back(j);
  for (int j = 0; j < n; ++j)
    if (beta >> j & 1u) g.push_back(n + j);
  return g;
}

/// gen ∧ form, moving gen into place by adjacent swaps.
inline std::optional<ConstantForm> wedge_left(int gen, ConstantForm f) {
  std::vector<int> seq{gen};
  seq.insert(seq.end(), f.gens.begin(), f.gens.end());
  int sign = 1;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i] == seq[i + 1]) return std::nullopt;
    if (seq[i] > seq[i + 1]) {
      std::swap(seq[i], seq[i + 1]);
      sign = -sign;
    } else {
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (seq[i] == seq[i + 1]) return std::nullopt;
  return ConstantForm{seq, f.coeff * double(sign)};
}

/// The frequency ξ in R^2 with <ξ, ω_c> = k_c for the lattice with columns
/// ω_c = (B[0 + c], B[2 + c]) (row-major 2x2).
inline std::array<double, 2> dual_frequency(const std::vector<double>& B, long long k1, long long k2) {
  // B^T ξ = k
  double a = B[0], b = B[2], c = B[1], d = B[3];
  double det = a * d - b * c;
  return {(d * double(k1) - b * double(k2)) / det, (-c * double(k1) + a * double(k2)) / det};
}

inline double dual_norm2(const std::vector<double>& B, long long k1, long long k2) {
  auto x = dual_frequency(B, k1, k2);
  return x[0] * x[0] + x[1] * x[1];
}

/// ∂/∂z (bar = false) or ∂/∂z̄ of e^{2πi<ξ,x>} divided by the function:
/// with ζ = ξ_x + i ξ_y these are πi conj(ζ) and πi ζ.
inline std::complex<double> frequency_derivative(const std::vector<double>& B, long long k1, long long k2, bool bar) {
  auto x = dual_frequency(B, k1, k2);
  // ∂_z = (∂_x - i ∂_y)/2, ∂_x e = 2πi ξ_x e.
  std::complex<double> I(0, 1);
  std::complex<double> dx = 2.0 * M_PI * I * x[0], dy = 2.0 * M_PI * I * x[1];
  return bar ? (dx + I * dy) / 2.0 : (dx - I * dy) / 2.0;
}

}  // namespace oracle
