#pragma once

// Complex tori V/Λ presented by period matrices, duals, and isomorphism
// residuals.

#include "plectic/lattice.hpp"

namespace plectic {

/// V = C^g modulo the lattice generated by the 2g columns of `periods`.
template <class Real>
struct ComplexTorus {
  std::size_t g = 0;
  CMatrix<Real> periods;  // g x 2g

  ComplexTorus() = default;
  explicit ComplexTorus(CMatrix<Real> p) : g(p.rows()), periods(std::move(p)) {
    if (periods.cols() != 2 * g) throw DimensionError("period matrix must be g x 2g, got " + periods.shape());
  }
};

/// Real 2g x 2g matrix [Re Π; Im Π]; the lattice is full iff it is invertible.
template <class Real>
RMatrix<Real> real_form(const CMatrix<Real>& periods) {
  return realify_rows(periods);
}

template <class Real>
bool is_full_lattice(const ComplexTorus<Real>& t, const Real& tol) {
  RMatrix<Real> P = real_form(t.periods);
  return rank(P, tol) == P.cols();
}

template <class Real>
void require_full_lattice(const ComplexTorus<Real>& t, const Real& tol) {
  if (!is_full_lattice(t, tol)) throw InputError("period columns do not span a full lattice");
}

/// Complex structure of V transported to R^{2g} through the lattice basis:
/// K = P^{-1} J P, where J is multiplication by i on [Re; Im] coordinates.
template <class Real>
RMatrix<Real> lattice_complex_structure(const CMatrix<Real>& periods) {
  const std::size_t g = periods.rows();
  RMatrix<Real> P = real_form(periods);
  RMatrix<Real> J(2 * g, 2 * g);
  for (std::size_t k = 0; k < g; ++k) {
    J(k, g + k) = Real(-1);
    J(g + k, k) = Real(1);
  }
  return solve(P, J * P);
}

/// The dual torus: antilinear functionals a ↦ (v ↦ Σ a_k conj(v_k)) modulo
/// the lattice {a : Im a(Λ) ⊂ Z}. Column c of the result is the basis
/// element with Im(a_c^T conj(Π_b)) = δ_bc.
template <class Real>
ComplexTorus<Real> dual_torus(const ComplexTorus<Real>& t) {
  const std::size_t g = t.g;
  RMatrix<Real> P = real_part(t.periods), Q = imag_part(t.periods);
  // Im((x + i y)^T (p - i q)) = y.p - x.q
  RMatrix<Real> M = hcat(RMatrix<Real>(-Q.transpose()), P.transpose());
  RMatrix<Real> X = solve(M, RMatrix<Real>::identity(2 * g));
  CMatrix<Real> D(g, 2 * g);
  for (std::size_t k = 0; k < g; ++k)
    for (std::size_t c = 0; c < 2 * g; ++c) D(k, c) = Complex<Real>(X(k, c), X(g + k, c));
  return ComplexTorus<Real>(D);
}

template <class Real>
ComplexTorus<Real> product_torus(const ComplexTorus<Real>& a, const ComplexTorus<Real>& b) {
  // Lattice basis order: a's generators, then b's.
  CMatrix<Real> P(a.g + b.g, 2 * (a.g + b.g));
  P.set_block(0, 0, a.periods);
  P.set_block(a.g, 2 * a.g, b.periods);
  return ComplexTorus<Real>(P);
}

template <class Real>
struct IsomorphismCheck {
  IntMatrix U;       // lattice change of basis: A Π1 = Π2 U
  Real residual{};   // ||A Π1 - Π2 U|| / max(1, ||Π2||)
  bool unimodular = false;
};

/// Given a complex-linear map A, recovers the integer matrix U with
/// A Π1 ≈ Π2 U by rounding and reports the residual.
template <class Real>
IsomorphismCheck<Real> isomorphism_residual(const ComplexTorus<Real>& t1, const ComplexTorus<Real>& t2,
                                            const CMatrix<Real>& A) {
  if (t1.g != t2.g || A.rows() != t2.g || A.cols() != t1.g) throw DimensionError("isomorphism_residual: shapes");
  CMatrix<Real> image = A * t1.periods;
  RMatrix<Real> coords = solve(real_form(t2.periods), real_form(image));
  IsomorphismCheck<Real> out;
  out.U = coords.template map<BigInt>([](const Real& x) { return round_to_bigint(x); });
  CMatrix<Real> diff = image - t2.periods * to_floating<Complex<Real>>(out.U);
  Real scale = frobenius_norm(t2.periods);
  out.residual = frobenius_norm(diff) / (scale > Real(1) ? scale : Real(1));
  out.unimodular = is_unimodular(out.U);
  return out;
}

/// Best complex-linear A with A Π1 ≈ Π2 U for a given integer U, and the
/// residual. A is determined by the first g independent columns; the residual
/// measures the rest.
template <class Real>
std::pair<CMatrix<Real>, Real> complex_map_for(const ComplexTorus<Real>& t1, const ComplexTorus<Real>& t2,
                                               const IntMatrix& U) {
  CMatrix<Real> target = t2.periods * to_floating<Complex<Real>>(U);
  // A = target Π1^H (Π1 Π1^H)^{-1}
  CMatrix<Real> P1h = t1.periods.adjoint();
  CMatrix<Real> A = (target * P1h) * inverse(CMatrix<Real>(t1.periods * P1h));
  CMatrix<Real> diff = A * t1.periods - target;
  Real scale = frobenius_norm(t2.periods);
  return {A, frobenius_norm(diff) / (scale > Real(1) ? scale : Real(1))};
}

}  // namespace plectic
