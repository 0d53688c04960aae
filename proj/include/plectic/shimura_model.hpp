#pragma once

// Strongly primitive plectic structures built from commuting integral
// involutions Fr_1..Fr_r and a holomorphic subspace W, their ν-th weight-one
// structures, and the character decomposition feeding RM algebraization.

#include "plectic/real_multiplication.hpp"

namespace plectic {

template <class Real>
struct StronglyPrimitiveDatum {
  std::size_t r = 0;
  std::size_t rank = 0;             // 2^r * h
  std::vector<IntMatrix> frobenii;  // Fr_1..Fr_r on lattice coordinates
  CMatrix<Real> holo;               // rank x h basis of W
  std::vector<IntMatrix> hecke;     // optional, must commute with the frobenii

  std::size_t h() const { return holo.cols(); }
};

/// Fr_β = ∏_{μ: β_μ = 1} Fr_μ.
template <class Real>
IntMatrix frobenius_translate(const StronglyPrimitiveDatum<Real>& d, const std::vector<int>& beta) {
  IntMatrix F = IntMatrix::identity(d.rank);
  for (std::size_t mu = 0; mu < d.r; ++mu)
    if (beta[mu]) F = d.frobenii[mu] * F;
  return F;
}

template <class Real>
void validate_datum(const StronglyPrimitiveDatum<Real>& d, const Real& tol) {
  if (d.r == 0) throw InputError("plectic degree r must be positive");
  if (d.frobenii.size() != d.r) throw DimensionError("need exactly r Frobenius involutions");
  if (d.holo.rows() != d.rank) throw DimensionError("holomorphic basis must have one row per lattice coordinate");
  if (d.h() == 0 || (std::size_t(1) << d.r) * d.h() != d.rank)
    throw InputError("lattice rank must equal 2^r * dim W");
  const IntMatrix I = IntMatrix::identity(d.rank);
  for (std::size_t mu = 0; mu < d.r; ++mu) {
    const auto& F = d.frobenii[mu];
    if (F.rows() != d.rank || F.cols() != d.rank) throw DimensionError("Frobenius matrix has the wrong shape");
    if (!(F * F == I)) throw InputError("Fr_" + std::to_string(mu + 1) + " is not an involution");
    for (std::size_t nu = 0; nu < mu; ++nu)
      if (!(F * d.frobenii[nu] == d.frobenii[nu] * F)) throw InputError("Frobenius involutions do not commute");
    for (const auto& T : d.hecke) {
      if (T.rows() != d.rank || T.cols() != d.rank) throw DimensionError("Hecke matrix has the wrong shape");
      if (!(T * F == F * T)) throw InputError("Hecke operator does not commute with the Frobenius involutions");
    }
  }
  if (rank(d.holo, tol) != d.h()) throw InputError("holomorphic basis is rank deficient");
}

/// H^{α,β} := Fr_β^*(W) for α + β = 1̲, validated as a plectic structure.
template <class Real>
PlecticHodgeStructure<Real> build_plectic_from_frobenii(const StronglyPrimitiveDatum<Real>& d, const Real& tol) {
  validate_datum(d, tol);
  PlecticHodgeStructure<Real> h;
  h.n = d.r;
  h.lattice = Lattice::standard(d.rank);
  for (unsigned mask = 0; mask < (1u << d.r); ++mask) {
    Bidegree bd;
    for (std::size_t mu = 0; mu < d.r; ++mu) {
      int b = int(mask >> mu & 1u);
      bd.beta.push_back(b);
      bd.alpha.push_back(1 - b);
    }
    h.pieces.emplace(bd, CMatrix<Real>(to_floating<Complex<Real>>(frobenius_translate(d, bd.beta)) * d.holo));
  }
  auto rep = validate(h, tol);
  if (rep.span_defect > Real(0)) throw InputError("the Frobenius translates of W are not in direct sum");
  if (!(rep.symmetry_residual < tol))
    throw InputError("conjugation-symmetry failure: conj(W) is not Fr_{1̲}(W), residual " +
                     to_decimal_string(rep.symmetry_residual));
  return h;
}

/// L_ν: H → target, of bidegree (1_ν, 1_ν). ν is 1-based.
template <class Real>
struct CupOperator {
  std::size_t nu = 1;
  IntMatrix matrix;
  PlecticHodgeStructure<Real> target;
};

template <class Real>
struct StronglyPrimitiveResult {
  PlecticHodgeStructure<Real> structure;
  IntMatrix kernel;        // columns: Z-basis of ker(⊕ L_ν) in the source lattice
  Real kernel_residual{};  // max distance between ker(L_ν ⊗ C) and ⊕_{α_ν=1 or β_ν=1} H^{α,β}
};

template <class Real>
void check_cup(const PlecticHodgeStructure<Real>& h, const CupOperator<Real>& L, const Real& tol) {
  if (L.nu < 1 || L.nu > h.n) throw InputError("cup index ν out of range");
  if (L.matrix.rows() != L.target.rank() || L.matrix.cols() != h.rank())
    throw DimensionError("cup matrix " + L.matrix.shape() + " does not match source/target ranks");
  const std::size_t v = L.nu - 1;
  CMatrix<Real> F = to_floating<Complex<Real>>(L.matrix);
  for (const auto& [bd, m] : h.pieces) {
    if (m.cols() == 0) continue;
    CMatrix<Real> img = F * m;
    Real scale = frobenius_norm(m) * (Real(1) + max_abs(F));
    Real res;
    if (bd.alpha[v] == 0 && bd.beta[v] == 0) {
      Bidegree shifted = bd;
      shifted.alpha[v] = 1;
      shifted.beta[v] = 1;
      const CMatrix<Real>* t = L.target.piece(shifted);
      res = t == nullptr ? frobenius_norm(img) : projection_residual(*t, img, tol);
    } else {
      res = frobenius_norm(img);
    }
    if (res > tol * scale) throw InputError("cup is not a plectic morphism of bidegree (1_ν,1_ν) on piece " + bd.str());
  }
}

/// The structure carried by ker(⊕_ν L_ν): pieces with α_ν = 1 or β_ν = 1 for
/// every cup, written in a Z-basis of the (saturated) kernel.
template <class Real>
StronglyPrimitiveResult<Real> strongly_primitive(const PlecticHodgeStructure<Real>& h,
                                                 const std::vector<CupOperator<Real>>& cups, const Real& tol) {
  check_piece_shapes(h);
  for (const auto& L : cups) check_cup(h, L, tol);
  StronglyPrimitiveResult<Real> out;
  const std::size_t m = h.rank();
  IntMatrix stacked(0, m);
  for (const auto& L : cups) stacked = vcat(stacked, L.matrix);
  out.kernel = stacked.rows() == 0 ? IntMatrix::identity(m) : integer_kernel(stacked);

  for (const auto& L : cups) {
    const std::size_t v = L.nu - 1;
    CMatrix<Real> expected(m, 0);
    for (const auto& [bd, p] : h.pieces)
      if (bd.alpha[v] == 1 || bd.beta[v] == 1) expected = hcat(expected, p);
    CMatrix<Real> ker = null_space(to_floating<Complex<Real>>(L.matrix), tol);
    Real d = subspace_distance(ker, expected, tol);
    if (d > out.kernel_residual) out.kernel_residual = d;
  }
  if (out.kernel_residual > tol) throw NumericalError("kernel of L_ν differs from ⊕_{α_ν=1 or β_ν=1} H^{α,β}");

  CMatrix<Real> K = to_floating<Complex<Real>>(out.kernel);
  auto& s = out.structure;
  s.n = h.n;
  s.lattice = Lattice::standard(out.kernel.cols());
  for (const auto& [bd, p] : h.pieces) {
    bool keep = true;
    for (const auto& L : cups)
      if (bd.alpha[L.nu - 1] == 0 && bd.beta[L.nu - 1] == 0) keep = false;
    if (!keep) continue;
    CMatrix<Real> y = least_squares(K, p, tol);
    if (frobenius_norm(CMatrix<Real>(K * y - p)) > tol * (Real(1) + frobenius_norm(p)))
      throw NumericalError("piece " + bd.str() + " does not lie in the kernel");
    s.pieces.emplace(bd, y);
  }
  return out;
}

/// H_Z(X_B, ν) = (H, F^{1_ν}) with F^{1_ν} = ⊕_{β_ν=0} Fr_β(W); the Fr_μ,
/// μ ≠ ν, are checked to preserve F^{1_ν}.
template <class Real>
ClassicalHodgeStructure<Real> nu_hodge_structure(const StronglyPrimitiveDatum<Real>& d, std::size_t nu, const Real& tol) {
  auto h = build_plectic_from_frobenii(d, tol);
  if (nu < 1 || nu > d.r) throw InputError("ν out of range");
  CMatrix<Real> F1 = hodge_filtration(h, nu);
  for (std::size_t mu = 1; mu <= d.r; ++mu) {
    if (mu == nu) continue;
    CMatrix<Real> img = to_floating<Complex<Real>>(d.frobenii[mu - 1]) * F1;
    if (projection_residual(F1, img, tol) > tol * (Real(1) + frobenius_norm(img)))
      throw NumericalError("Fr_" + std::to_string(mu) + " is not an automorphism of the ν-th Hodge structure");
  }
  ClassicalHodgeStructure<Real> c;
  c.lattice = Lattice::standard(d.rank);
  c.pieces.emplace(std::make_pair(1, 0), F1);
  c.pieces.emplace(std::make_pair(0, 1), F1.conj());
  return c;
}

/// Characters of {±1}^{r-1}, listed as sign vectors indexed by μ ≠ ν.
struct CharacterPiece {
  std::vector<int> chi;  // chi[k] = χ_μ(−1) for the k-th μ ≠ ν
  IntMatrix basis;       // columns: Z-basis of the saturated eigenlattice
};

template <class Real>
std::vector<CharacterPiece> character_decompose(const StronglyPrimitiveDatum<Real>& d, std::size_t nu, const Real& tol) {
  validate_datum(d, tol);
  if (nu < 1 || nu > d.r) throw InputError("ν out of range");
  std::vector<std::size_t> others;
  for (std::size_t mu = 1; mu <= d.r; ++mu)
    if (mu != nu) others.push_back(mu);
  const IntMatrix I = IntMatrix::identity(d.rank);
  std::vector<CharacterPiece> out;
  std::size_t total = 0;
  for (unsigned mask = 0; mask < (1u << others.size()); ++mask) {
    CharacterPiece p;
    IntMatrix stacked(0, d.rank);
    for (std::size_t k = 0; k < others.size(); ++k) {
      int sign = (mask >> k & 1u) ? -1 : 1;
      p.chi.push_back(sign);
      stacked = vcat(stacked, IntMatrix(d.frobenii[others[k] - 1] - I * BigInt(sign)));
    }
    p.basis = stacked.rows() == 0 ? I : integer_kernel(stacked);
    if (p.basis.cols() != 2 * d.h())
      throw InputError("dimension formula fails: character piece has rational dimension " + std::to_string(p.basis.cols()) +
                       ", expected 2 dim W = " + std::to_string(2 * d.h()));
    total += p.basis.cols();
    out.push_back(std::move(p));
  }
  if (total != d.rank) throw InputError("character pieces do not span the rational space");
  return out;
}

/// The sub-Hodge structure of H_Z(X_B, ν) on one character lattice.
template <class Real>
ClassicalHodgeStructure<Real> character_structure(const StronglyPrimitiveDatum<Real>& d, std::size_t nu,
                                                  const CharacterPiece& piece, const Real& tol) {
  auto c = nu_hodge_structure(d, nu, tol);
  const CMatrix<Real>& F1 = c.pieces.at({1, 0});
  // Projector ∏ (I + χ_μ Fr_μ) / 2 onto the χ-eigenspace.
  CMatrix<Real> P = CMatrix<Real>::identity(d.rank);
  std::size_t k = 0;
  for (std::size_t mu = 1; mu <= d.r; ++mu) {
    if (mu == nu) continue;
    CMatrix<Real> Fm = to_floating<Complex<Real>>(d.frobenii[mu - 1]);
    P = P * CMatrix<Real>((CMatrix<Real>::identity(d.rank) + Fm * Complex<Real>(Real(piece.chi[k]))) *
                          Complex<Real>(Real(1) / Real(2)));
    ++k;
  }
  CMatrix<Real> Fchi = orthonormal_basis(CMatrix<Real>(P * F1), tol);
  if (Fchi.cols() != d.h()) throw NumericalError("F^1 does not split evenly over the characters");
  CMatrix<Real> K = to_floating<Complex<Real>>(piece.basis);
  CMatrix<Real> y = least_squares(K, Fchi, tol);
  if (frobenius_norm(CMatrix<Real>(K * y - Fchi)) > tol * (Real(1) + frobenius_norm(Fchi)))
    throw NumericalError("F^1 component does not lie in the character lattice");
  ClassicalHodgeStructure<Real> s;
  s.lattice = Lattice::standard(piece.basis.cols());
  s.pieces.emplace(std::make_pair(1, 0), y);
  s.pieces.emplace(std::make_pair(0, 1), y.conj());
  return s;
}

template <class Real>
struct CharacterCertificate {
  std::vector<int> chi;
  std::optional<AbelianCertificate<Real>> certificate;
  std::string note;  // why no certificate was produced
};

template <class Real>
struct QsvJacobian {
  ComplexTorus<Real> torus;
  std::vector<CharacterCertificate<Real>> certificates;
};

/// J_plectic(X_B, ν) and, per character piece, an abelian-variety
/// certificate from an RM action on its Jacobian: elliptic pieces use Q,
/// larger pieces use the detected real-multiplication field matching
/// rm_hint (or the first one detected).
template <class Real>
QsvJacobian<Real> plectic_jacobian_qsv(const StronglyPrimitiveDatum<Real>& d, std::size_t nu,
                                       const std::optional<FieldOrder>& rm_hint, const Real& tol,
                                       long long height_bound = 3) {
  QsvJacobian<Real> out;
  out.torus = classical_jacobian(nu_hodge_structure(d, nu, tol), tol);
  for (const auto& piece : character_decompose(d, nu, tol)) {
    CharacterCertificate<Real> cc;
    cc.chi = piece.chi;
    auto sub = character_structure(d, nu, piece, tol);
    auto J = classical_jacobian(sub, tol);
    std::optional<RMStructure> action;
    if (J.g == 1) {
      action = RMStructure{rational_field(), {IntMatrix::identity(2)}};
    } else {
      for (auto& cand : detect_rm_candidates(J, height_bound, tol)) {
        if (cand.field.degree != J.g) continue;
        if (rm_hint && (cand.field.degree != rm_hint->degree || cand.field.radicand != rm_hint->radicand)) continue;
        action = cand;
        break;
      }
    }
    if (!action) {
      cc.note = "no real multiplication of degree " + std::to_string(J.g) + " found on this piece";
    } else {
      try {
        cc.certificate = jacobian_is_abelian_certificate(sub, action, tol, height_bound);
      } catch (const std::exception& e) {
        cc.note = e.what();
      }
    }
    out.certificates.push_back(std::move(cc));
  }
  return out;
}

}  // namespace plectic
