#pragma once

// Real multiplication on complex tori: detection, the tori C^Σ/(O·z + 𝔅),
// enlargement to the maximal order, Steinitz decomposition of the lattice,
// and algebraization to a (z, 𝔅) normal form.

#include "plectic/complex_torus.hpp"
#include "plectic/number_field.hpp"
#include "plectic/plectic_hodge.hpp"

#include <map>

namespace plectic {

/// θ: O → End(Λ); action[k] = θ(b_k) on lattice coordinates (column vectors).
struct RMStructure {
  FieldOrder field;
  std::vector<IntMatrix> action;

  std::size_t lattice_rank() const { return action.empty() ? 0 : action[0].rows(); }
};

/// Exact check: θ(1) = id, pairwise commutation, and θ(b_i)θ(b_j) = Σ_k c_ijk θ(b_k).
inline void validate_rm(const RMStructure& rm) {
  validate_order(rm.field);
  const std::size_t d = rm.field.degree;
  if (rm.action.size() != d) throw InputError("RM action needs one matrix per integral basis element");
  const std::size_t m = rm.action[0].rows();
  for (const auto& a : rm.action)
    if (a.rows() != m || a.cols() != m) throw DimensionError("RM action matrices must be square of equal size");
  if (rm.action[0] != IntMatrix::identity(m)) throw InputError("RM action of 1 is not the identity");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      IntMatrix prod = rm.action[i] * rm.action[j];
      if (prod != rm.action[j] * rm.action[i]) throw InputError("RM action matrices do not commute");
      IntMatrix expect(m, m);
      for (std::size_t k = 0; k < d; ++k) expect += rm.action[k] * rm.field.mult_table[i][j][k];
      if (prod != expect) throw InputError("RM action violates the multiplication table");
    }
}

/// Every action matrix must be complex-linear on the torus.
template <class Real>
void validate_rm_on_torus(const ComplexTorus<Real>& t, const RMStructure& rm, const Real& tol) {
  validate_rm(rm);
  if (rm.lattice_rank() != 2 * t.g) throw DimensionError("RM action size does not match the torus lattice");
  for (const auto& a : rm.action) {
    auto [M, res] = analytic_representation(t.periods, a);
    if (res > tol) throw InputError("RM action matrix is not an endomorphism of the torus");
  }
}

// ---------------------------------------------------------------------------
// Construction

template <class Real>
struct RMTorus {
  ComplexTorus<Real> torus;
  RMStructure rm;
};

/// C^Σ / (O·z + 𝔅): lattice basis [σ(b_k) z_σ]_k followed by [σ(β_i)]_i, with
/// O acting by its regular representation on both blocks.
template <class Real>
RMTorus<Real> construct_rm_torus(const FieldOrder& field, const std::vector<Complex<Real>>& z,
                                 const FractionalIdealRep& ideal) {
  validate_order(field);
  const std::size_t d = field.degree;
  if (d >= 2 && !is_totally_real(field.min_poly)) throw InputError("field is not totally real");
  if (z.size() != d) throw DimensionError("z must have one component per real embedding");
  for (const auto& zi : z)
    if (!(zi.imag() > Real(0))) throw InputError("every component of z must have positive imaginary part");
  validate_ideal(ideal);
  RMatrix<Real> E = embedding_matrix<Real>(field);
  CMatrix<Real> P(d, 2 * d);
  for (std::size_t s = 0; s < d; ++s) {
    for (std::size_t k = 0; k < d; ++k) P(s, k) = z[s] * E(s, k);
    for (std::size_t i = 0; i < d; ++i) {
      Real v(0);
      for (std::size_t k = 0; k < d; ++k) v += E(s, k) * to_real<Real>(ideal.basis(i, k));
      P(s, d + i) = Complex<Real>(v, Real(0));
    }
  }
  RMStructure rm{field, {}};
  RatMatrix Bt = ideal.basis.transpose();
  RatMatrix Btinv = *rational_inverse(Bt);
  for (std::size_t k = 0; k < d; ++k) {
    IntMatrix R = field.regular(k);
    RatMatrix Ri = Btinv * to_rational(R) * Bt;
    IntMatrix Rint = Ri.map<BigInt>([](const BigRational& q) {
      if (!is_integral(q)) throw InputError("ideal is not stable under the order");
      return BigInt(mp::numerator(q));
    });
    rm.action.push_back(block_diag(R, Rint));
  }
  return {ComplexTorus<Real>(P), rm};
}

// ---------------------------------------------------------------------------
// Detection

namespace detail {

/// Minimal polynomial of an integer matrix (monic, ascending, exact).
inline Poly matrix_min_poly(const IntMatrix& N) {
  const std::size_t m = N.rows();
  std::vector<IntMatrix> pows{IntMatrix::identity(m)};
  for (std::size_t k = 1; k <= m; ++k) {
    pows.push_back(pows.back() * N);
    // Is pows[k] in the Q-span of pows[0..k-1]? Solve Σ c_i vec(pows[i]) = -vec(pows[k]).
    RatMatrix A(m * m, k);
    std::vector<BigRational> rhs(m * m);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t e = 0; e < m * m; ++e) A(e, i) = BigRational(pows[i].data()[e]);
    for (std::size_t e = 0; e < m * m; ++e) rhs[e] = BigRational(-pows[k].data()[e]);
    RatMatrix Aug = hcat(A, RatMatrix::column(rhs));
    if (rational_rank(Aug) == rational_rank(A)) {
      // Least-squares-free exact solve via normal equations on independent columns.
      RatMatrix AtA = A.transpose() * A;
      RatMatrix Atb = A.transpose() * RatMatrix::column(rhs);
      auto c = rational_solve(AtA, Atb);
      Poly p(k + 1);
      for (std::size_t i = 0; i < k; ++i) {
        if (!is_integral((*c)(i, 0))) throw NumericalError("non-integral minimal polynomial");
        p[i] = mp::numerator((*c)(i, 0));
      }
      p[k] = 1;
      return p;
    }
  }
  throw NumericalError("minimal polynomial not found");
}

/// n = s^2 * D with D squarefree; returns (s, D).
inline std::pair<BigInt, BigInt> squarefree_split(BigInt n) {
  if (n <= 0) throw InputError("squarefree_split expects a positive integer");
  BigInt s = 1, D = 1;
  for (BigInt p = 2; p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      s *= p;
    }
    if (n % p == 0) {
      n /= p;
      D *= p;
    }
  }
  D *= n;
  return {s, D};
}

/// Builds the largest quadratic order acting through Q[N], for N with
/// irreducible totally real min_poly x^2 + p1 x + p0.
inline RMStructure quadratic_rm_from(const IntMatrix& N, const Poly& mp2) {
  const std::size_t m = N.rows();
  BigInt p0 = mp2[0], p1 = mp2[1];
  BigInt disc = p1 * p1 - 4 * p0;
  auto [s, D0] = squarefree_split(disc);
  if (D0 > BigInt(std::numeric_limits<long long>::max())) throw InputError("radicand too large");
  long long D = D0.convert_to<long long>();
  // θ = (-p1 + s√D)/2 expressed as a + b ω.
  BigRational a, b;
  if (D % 4 == 1) {
    a = BigRational(-p1 - s, 2);
    b = BigRational(s);
  } else {
    a = BigRational(-p1, 2);
    b = BigRational(s, 2);
  }
  RatMatrix W = (to_rational(N) - RatMatrix::identity(m) * a) * (BigRational(1) / b);
  BigInt f = detail::common_denominator(W);
  FieldOrder order = quadratic_order(D, f.convert_to<long long>());
  IntMatrix fW = (W * BigRational(f)).map<BigInt>([](const BigRational& q) { return BigInt(mp::numerator(q)); });
  RMStructure rm{order, {IntMatrix::identity(m), fW}};
  validate_rm(rm);
  return rm;
}

}  // namespace detail

/// Searches small combinations (coefficients in [-2, 2]) of the endomorphism
/// basis for elements whose minimal polynomial has degree g, is irreducible
/// and totally real. For g = 2 every real quadratic field met is reported
/// once, with the smallest conductor seen, ordered by radicand; tori with a
/// large End (products, CM) contain several. For g >= 3 the first hit is
/// returned. g = 1 always yields the rational structure.
template <class Real>
std::vector<RMStructure> detect_rm_candidates(const ComplexTorus<Real>& t, long long height_bound, const Real& tol) {
  const std::size_t g = t.g;
  if (g == 1) return {RMStructure{rational_field(), {IntMatrix::identity(2)}}};
  auto ends = endomorphisms(t, height_bound, tol);
  const std::size_t r = ends.size();
  if (r < 2) return {};
  std::map<long long, RMStructure> quad;
  for (int cb = 1; cb <= 2; ++cb) {
    std::vector<int> c(r, -cb);
    for (;;) {
      IntMatrix N(2 * g, 2 * g);
      for (std::size_t i = 0; i < r; ++i)
        if (c[i] != 0) N += ends[i].rational * BigInt(c[i]);
      Poly p = is_zero(N) ? Poly{} : detail::matrix_min_poly(N);
      if (p.size() == g + 1 && is_totally_real(p) && (g > 3 || is_irreducible_small(p))) {
        if (g != 2) {
          RMStructure rm{monogenic_order(p), {IntMatrix::identity(2 * g)}};
          IntMatrix pw = IntMatrix::identity(2 * g);
          for (std::size_t k = 1; k < g; ++k) {
            pw = pw * N;
            rm.action.push_back(pw);
          }
          validate_rm(rm);
          return {rm};
        }
        RMStructure cand = detail::quadratic_rm_from(N, p);
        auto it = quad.find(cand.field.radicand);
        if (it == quad.end()) quad.emplace(cand.field.radicand, cand);
        else if (cand.field.conductor < it->second.field.conductor) it->second = cand;
      }
      std::size_t i = 0;
      while (i < r && c[i] == cb) c[i++] = -cb;
      if (i == r) break;
      ++c[i];
    }
  }
  std::vector<RMStructure> out;
  for (auto& [D, rm] : quad) out.push_back(rm);
  return out;
}

/// The first candidate of detect_rm_candidates (smallest radicand for g = 2).
template <class Real>
std::optional<RMStructure> detect_rm(const ComplexTorus<Real>& t, long long height_bound, const Real& tol) {
  auto c = detect_rm_candidates(t, height_bound, tol);
  if (c.empty()) return std::nullopt;
  return c.front();
}

// ---------------------------------------------------------------------------
// Enlargement to the maximal order

template <class Real>
struct Enlargement {
  ComplexTorus<Real> torus;
  RMStructure rm;
  IntMatrix isogeny;  // coordinates of the old lattice in the new basis
  BigInt index = 1;   // [Λ' : Λ]
  BigInt order_index = 1;
};

/// Λ' = Λ + ωΛ for the quadratic order Z[fω]; Λ ⊆ Λ' ⊆ (1/f)Λ.
template <class Real>
Enlargement<Real> enlarge_to_maximal(const ComplexTorus<Real>& t, const RMStructure& rm) {
  validate_rm(rm);
  const std::size_t m = rm.lattice_rank();
  if (m != 2 * t.g) throw DimensionError("RM action size does not match the torus lattice");
  if (rm.field.degree >= 2 && rm.field.degree <= 3 && !is_irreducible_small(rm.field.min_poly))
    throw InputError("cannot compute the maximal order: min_poly is reducible");
  if (rm.field.is_maximal) return {t, rm, IntMatrix::identity(m), BigInt(1), BigInt(1)};
  if (rm.field.degree != 2) throw InputError("maximal order computation is implemented for quadratic fields only");
  const long long f = rm.field.conductor;
  RatMatrix W = to_rational(rm.action[1]) * BigRational(1, f);
  // Columns of f*[I | W] generate f Λ' in old coordinates.
  IntMatrix gens(2 * m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      gens(i, j) = (i == j) ? BigInt(f) : BigInt(0);
      gens(m + i, j) = mp::numerator(W(j, i) * BigRational(f));
    }
  IntMatrix H = row_lattice_basis(gens);  // rows: f * basis vectors of Λ'
  RatMatrix Bp = to_rational(H.transpose()) * BigRational(1, f);
  RatMatrix Bpinv = *rational_inverse(Bp);
  auto to_int = [](const RatMatrix& q) {
    return q.map<BigInt>([](const BigRational& x) {
      if (!is_integral(x)) throw NumericalError("enlargement produced a non-integral matrix");
      return BigInt(mp::numerator(x));
    });
  };
  IntMatrix iso = to_int(Bpinv);
  IntMatrix omega = to_int(Bpinv * W * Bp);
  CMatrix<Real> P = t.periods * to_floating<Complex<Real>>(H.transpose());
  P *= Complex<Real>(Real(1) / Real(f), Real(0));
  Enlargement<Real> e{ComplexTorus<Real>(P), RMStructure{quadratic_field(rm.field.radicand), {IntMatrix::identity(m), omega}},
                      iso, abs_int(determinant(iso)), BigInt(f)};
  validate_rm(e.rm);
  return e;
}

// ---------------------------------------------------------------------------
// Steinitz decomposition

struct SteinitzDecomposition {
  IntMatrix iso;  // columns: new lattice basis [b_k λ1]_k, [s(β_i)]_i in old coordinates
  FractionalIdealRep ideal;
  std::vector<IntMatrix> action_in_new_basis;
};

/// Λ ≅ O_L ⊕ 𝔟 as O_L-modules (maximal order, Λ of O_L-rank 2).
inline SteinitzDecomposition steinitz_decompose(const RMStructure& rm, int search_height = 3) {
  validate_rm(rm);
  const FieldOrder& F = rm.field;
  const std::size_t d = F.degree, m = rm.lattice_rank();
  if (!F.is_maximal) throw InputError("steinitz_decompose requires the maximal order");
  if (m != 2 * d) throw InputError("lattice is not of O_L-rank two (rank " + std::to_string(m) + ", degree " + std::to_string(d) + ")");

  auto orbit = [&](const std::vector<BigInt>& v) {
    IntMatrix S(m, d);
    for (std::size_t k = 0; k < d; ++k) S.set_col(k, times_col(rm.action[k], v));
    return S;
  };
  // λ1 with O_L λ1 saturated in Λ.
  std::optional<std::vector<BigInt>> lambda1;
  for (int h = 1; h <= search_height && !lambda1; ++h) {
    std::vector<int> c(m, -h);
    for (;;) {
      int mx = 0;
      for (int x : c) mx = std::max(mx, std::abs(x));
      if (mx == h) {
        std::vector<BigInt> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = c[i];
        auto s = smith_normal_form(orbit(v));
        bool ok = s.rank == d;
        for (const auto& x : s.invariants()) ok = ok && x == 1;
        if (ok) {
          lambda1 = v;
          break;
        }
      }
      std::size_t i = 0;
      while (i < m && c[i] == h) c[i++] = -h;
      if (i == m) break;
      ++c[i];
    }
  }
  if (!lambda1) throw NumericalError("no saturated cyclic submodule found within the search height");

  // w: a lattice basis vector completing λ1 to an L-basis of Λ ⊗ Q.
  RatMatrix Phi;
  std::vector<BigInt> w;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<BigInt> e(m, BigInt(0));
    e[j] = 1;
    IntMatrix cand = hcat(orbit(*lambda1), orbit(e));
    if (rational_rank(cand) == m) {
      Phi = to_rational(cand);
      w = e;
      break;
    }
  }
  if (w.empty()) throw InputError("lattice is not of O_L-rank two");
  RatMatrix Phiinv = *rational_inverse(Phi);
  // L-coordinates (x, y) of the lattice basis e_j are the columns of Phi^{-1}.
  RatMatrix X = Phiinv.block(0, 0, d, m), Y = Phiinv.block(d, 0, d, m);
  RatMatrix Yrows = Y.transpose();  // m x d
  BigInt den = detail::common_denominator(Yrows);
  IntMatrix Yi = Yrows.map<BigInt>([&](const BigRational& q) { return BigInt(mp::numerator(q * den)); });
  auto hnf = hermite_normal_form(Yi);
  if (hnf.rank != d) throw NumericalError("projection to the second factor is not of full rank");
  RatMatrix beta = hnf.H.block(0, 0, d, d).map<BigRational>([&](const BigInt& z) { return BigRational(z, den); });
  // x-coordinates of the lifts Σ_j U_ij e_j.
  RatMatrix Ur = to_rational(hnf.U.block(0, 0, d, m));
  RatMatrix xl = Ur * X.transpose();  // d x d, row i = x_i

  // γ with γ β_i ≡ x_i mod O_L for all i.
  std::vector<RatMatrix> Mi;
  for (std::size_t i = 0; i < d; ++i) Mi.push_back(F.regular_of(beta.row(i)));
  RatMatrix M0inv = *rational_inverse(Mi[0]);
  std::vector<BigRational> gamma;
  {
    std::vector<BigRational> x0 = xl.row(0);
    std::vector<BigInt> k0(d, BigInt(0));
    if (d > 1) {
      // (M_i M_0^{-1}) k0 - k_i = x_i - M_i M_0^{-1} x0 for i >= 1
      std::vector<RatMatrix> Ai;
      std::vector<std::vector<BigRational>> ri;
      BigInt Dn = 1;
      for (std::size_t i = 1; i < d; ++i) {
        RatMatrix A = Mi[i] * M0inv;
        auto Ax0 = times_col(A, x0);
        std::vector<BigRational> r(d);
        for (std::size_t k = 0; k < d; ++k) r[k] = xl(i, k) - Ax0[k];
        Ai.push_back(A);
        ri.push_back(r);
        BigInt cd = detail::common_denominator(hcat(A, RatMatrix::column(r)));
        Dn = Dn / gcd_of(Dn, cd) * cd;
      }
      const std::size_t rowsG = (d - 1) * d, colsG = d + (d - 1) * d;
      IntMatrix G(rowsG, colsG);
      std::vector<BigInt> rhs(rowsG);
      for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
          std::size_t row = i * d + k;
          for (std::size_t l = 0; l < d; ++l) G(row, l) = mp::numerator(Ai[i](k, l) * BigRational(Dn));
          G(row, d + i * d + k) = -Dn;
          rhs[row] = mp::numerator(ri[i][k] * BigRational(Dn));
        }
      auto sol = integer_solve(G, rhs);
      if (!sol) throw NumericalError("congruence system for the O_L-linear splitting has no solution");
      for (std::size_t k = 0; k < d; ++k) k0[k] = (*sol)[k];
    }
    std::vector<BigRational> t(d);
    for (std::size_t k = 0; k < d; ++k) t[k] = x0[k] + BigRational(k0[k]);
    gamma = times_col(M0inv, t);
  }

  IntMatrix iso(m, m);
  IntMatrix O1 = orbit(*lambda1);
  for (std::size_t k = 0; k < d; ++k) iso.set_col(k, O1.col(k));
  for (std::size_t i = 0; i < d; ++i) {
    auto gb = F.multiply(gamma, beta.row(i));
    std::vector<BigRational> coords(m);
    for (std::size_t k = 0; k < d; ++k) {
      coords[k] = gb[k];
      coords[d + k] = beta(i, k);
    }
    auto v = times_col(Phi, coords);
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_integral(v[r])) throw NumericalError("O_L-linear splitting is not integral");
      iso(r, d + i) = mp::numerator(v[r]);
    }
  }
  if (!is_unimodular(iso)) throw NumericalError("Steinitz basis is not unimodular");
  SteinitzDecomposition out{iso, FractionalIdealRep{F, beta}, {}};
  IntMatrix inv = unimodular_inverse(iso);
  for (const auto& a : rm.action) out.action_in_new_basis.push_back(inv * a * iso);
  return out;
}

// ---------------------------------------------------------------------------
// Algebraization

template <class Real>
struct Algebraization {
  std::vector<Complex<Real>> z;
  FractionalIdealRep ideal;
  CMatrix<Real> iso;       // iso * Π_t = Π_model * U
  IntMatrix lattice_map;   // U
  std::vector<BigRational> sign_element;  // x
  Real residual{};
  ComplexTorus<Real> model;
};

/// Executes the proof of algebraicity: diagonalize the O_L action on V, read
/// off λ, μ from a Steinitz basis, and fix signs with a field element x so
/// that every component of x λ / μ lies in the upper half plane.
template <class Real>
Algebraization<Real> algebraize_rm(const ComplexTorus<Real>& t, const RMStructure& rm, const Real& tol,
                                   long long sign_bound = 50) {
  validate_rm_on_torus(t, rm, tol);
  const FieldOrder& F = rm.field;
  const std::size_t d = F.degree, g = t.g;
  if (g != d) throw InputError("RM field degree must equal the torus dimension");
  if (!F.is_maximal) throw InputError("algebraize_rm requires the maximal order (run enlarge_to_maximal first)");
  auto st = steinitz_decompose(rm);
  CMatrix<Real> Ps = t.periods * to_floating<Complex<Real>>(st.iso);
  RMatrix<Real> Emb = embedding_matrix<Real>(F);

  CMatrix<Real> E(g, g);
  if (d == 1) {
    E(0, 0) = Complex<Real>(Real(1), Real(0));
  } else {
    auto [M1, res] = analytic_representation(t.periods, rm.action[1]);
    for (std::size_t s = 0; s < d; ++s) {
      CMatrix<Real> shifted = M1 - CMatrix<Real>::identity(g) * Complex<Real>(Emb(s, 1), Real(0));
      CMatrix<Real> ker = null_space(shifted, Real(1e3) * tol);
      if (ker.cols() != 1)
        throw NumericalError("eigen-decomposition failure: eigenspace for embedding " + std::to_string(s) +
                             " has dimension " + std::to_string(ker.cols()));
      E.set_col(s, ker.col(0));
    }
  }
  CMatrix<Real> Einv = inverse(E);
  CMatrix<Real> C = Einv * Ps;  // row σ: coordinates in V^σ
  std::vector<Complex<Real>> lambda(d), mu(d), z(d);
  RMatrix<Real> beta_emb(d, d);  // σ(β_i)
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t i = 0; i < d; ++i) {
      Real v(0);
      for (std::size_t k = 0; k < d; ++k) v += Emb(s, k) * to_real<Real>(st.ideal.basis(i, k));
      beta_emb(s, i) = v;
    }
  for (std::size_t s = 0; s < d; ++s) {
    lambda[s] = C(s, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i < d; ++i)
      if (abs_of(beta_emb(s, i)) > abs_of(beta_emb(s, best))) best = i;
    mu[s] = C(s, d + best) / Complex<Real>(beta_emb(s, best), Real(0));
    z[s] = lambda[s] / mu[s];
    if (abs_of(z[s].imag()) <= tol) throw NumericalError("period ratio is real: the lattice is degenerate");
  }

  // Sign correction: x with sign σ(x) = sign Im z_σ, by increasing height.
  std::optional<std::vector<BigRational>> x;
  for (long long h = 1; h <= sign_bound && !x; ++h) {
    std::vector<long long> c(d, -h);
    for (;;) {
      long long mx = 0;
      for (auto v : c) mx = std::max(mx, v < 0 ? -v : v);
      if (mx == h) {
        std::vector<BigRational> cand(d);
        for (std::size_t k = 0; k < d; ++k) cand[k] = c[k];
        auto sx = embed<Real>(Emb, cand);
        bool ok = true;
        for (std::size_t s = 0; s < d && ok; ++s) ok = (sx[s] * z[s].imag() > Real(0));
        if (ok) {
          x = cand;
          break;
        }
      }
      std::size_t i = 0;
      while (i < d && c[i] == h) c[i++] = -h;
      if (i == d) break;
      ++c[i];
    }
  }
  if (!x) throw NumericalError("sign-correction search exhausted within the configured bound");
  auto sx = embed<Real>(Emb, *x);

  Algebraization<Real> out;
  out.sign_element = *x;
  out.z.resize(d);
  CMatrix<Real> D(g, g);
  for (std::size_t s = 0; s < d; ++s) {
    out.z[s] = z[s] * Complex<Real>(sx[s], Real(0));
    D(s, s) = Complex<Real>(sx[s], Real(0)) / mu[s];
  }
  out.ideal = ideal_scale(st.ideal, *x);
  out.iso = D * Einv;

  if (d == 1) {
    // Normalize 𝔅 = Z and τ to the standard fundamental domain.
    BigRational q = out.ideal.basis(0, 0);
    if (q < 0) q = -q;
    Complex<Real> qinv(Real(1) / to_real<Real>(q), Real(0));
    out.z[0] *= qinv;
    out.iso *= qinv;
    out.ideal = unit_ideal(F);
    auto [tau, mat] = reduce_upper_half_plane(out.z[0]);
    Complex<Real> denom = Complex<Real>(to_real<Real>(mat[2]), Real(0)) * out.z[0] + Complex<Real>(to_real<Real>(mat[3]), Real(0));
    out.z[0] = tau;
    out.iso *= Complex<Real>(Real(1), Real(0)) / denom;
  }
  out.model = construct_rm_torus(F, out.z, out.ideal).torus;
  auto chk = isomorphism_residual(t, out.model, out.iso);
  if (!chk.unimodular) throw NumericalError("algebraization did not produce a lattice isomorphism");
  out.lattice_map = chk.U;
  out.residual = chk.residual;
  return out;
}

// ---------------------------------------------------------------------------
// Certificates for weight-one Hodge structures with RM

template <class Real>
struct AbelianCertificate {
  FieldOrder field;
  std::vector<Complex<Real>> z;
  FractionalIdealRep ideal;
  CMatrix<Real> iso;
  Real residual{};
  BigInt isogeny_index = 1;
  ComplexTorus<Real> jacobian;
};

/// The torus H \ H_C / F^1 of a classical weight-one structure.
template <class Real>
ComplexTorus<Real> classical_jacobian(const ClassicalHodgeStructure<Real>& h, const Real& tol) {
  const std::size_t m = h.rank();
  auto it10 = h.pieces.find({1, 0}), it01 = h.pieces.find({0, 1});
  if (it10 == h.pieces.end() || it01 == h.pieces.end()) throw InputError("structure must be effective of weight one");
  for (const auto& [pq, b] : h.pieces)
    if (b.cols() > 0 && pq != std::make_pair(1, 0) && pq != std::make_pair(0, 1))
      throw InputError("structure must be effective of weight one");
  if (it10->second.cols() * 2 != m || it01->second.cols() * 2 != m) throw InputError("F^1 must have half the rank");
  CMatrix<Real> B = hcat(it10->second, it01->second);
  if (rank(B, tol) != m) throw NumericalError("degenerate projection: F^1 and its conjugate are not complementary");
  CMatrix<Real> Binv = inverse(B);
  return ComplexTorus<Real>(Binv.block(m / 2, 0, m / 2, m));
}

/// Runs detection (or takes the supplied action), enlargement and
/// algebraization on the Jacobian of h.
template <class Real>
AbelianCertificate<Real> jacobian_is_abelian_certificate(const ClassicalHodgeStructure<Real>& h,
                                                         const std::optional<RMStructure>& action, const Real& tol,
                                                         long long height_bound = 3) {
  const std::size_t m = h.rank();
  if (action) {
    if (2 * action->field.degree != m)
      throw InputError("rank/degree mismatch: rank " + std::to_string(m) + " but 2[L:Q] = " +
                       std::to_string(2 * action->field.degree));
    if (action->field.degree >= 2 && !is_totally_real(action->field.min_poly))
      throw InputError("RM field is not totally real");
  }
  ComplexTorus<Real> J = classical_jacobian(h, tol);
  RMStructure rm;
  if (action) {
    rm = *action;
    validate_rm_on_torus(J, rm, tol);
  } else {
    auto det = detect_rm(J, height_bound, tol);
    if (!det) throw NumericalError("no real multiplication detected within the height bound");
    rm = *det;
  }
  auto en = enlarge_to_maximal(J, rm);
  auto alg = algebraize_rm(en.torus, en.rm, tol);
  return {en.rm.field, alg.z, alg.ideal, alg.iso, alg.residual, en.index, J};
}

}  // namespace plectic
