#pragma once

// n-plectic Hodge structures: a lattice H with a decomposition
// H ⊗ C = ⊕ H^{α,β} satisfying H^{α,β} = conj(H^{β,α}).

#include "plectic/torus.hpp"

#include <map>

namespace plectic {

struct Bidegree {
  std::vector<int> alpha, beta;

  std::size_t n() const { return alpha.size(); }
  int abs_alpha() const {
    int s = 0;
    for (int a : alpha) s += a;
    return s;
  }
  int abs_beta() const {
    int s = 0;
    for (int b : beta) s += b;
    return s;
  }
  Bidegree swapped() const { return {beta, alpha}; }
  bool is_weight_one_effective() const {
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      if (alpha[k] < 0 || beta[k] < 0 || alpha[k] + beta[k] != 1) return false;
    }
    return true;
  }
  std::string str() const {
    std::string s = "(";
    for (int a : alpha) s += std::to_string(a);
    s += ",";
    for (int b : beta) s += std::to_string(b);
    return s + ")";
  }
  friend bool operator<(const Bidegree& a, const Bidegree& b) {
    return std::tie(a.alpha, a.beta) < std::tie(b.alpha, b.beta);
  }
  friend bool operator==(const Bidegree& a, const Bidegree& b) = default;
};

inline Bidegree concat(const Bidegree& a, const Bidegree& b) {
  Bidegree r = a;
  r.alpha.insert(r.alpha.end(), b.alpha.begin(), b.alpha.end());
  r.beta.insert(r.beta.end(), b.beta.begin(), b.beta.end());
  return r;
}

/// Bidegree of weight 1̲ from a bitmask: bit k set means α_k = 1.
inline Bidegree weight_one_bidegree(std::size_t n, unsigned alpha_mask) {
  Bidegree b{std::vector<int>(n), std::vector<int>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    b.alpha[k] = (alpha_mask >> k) & 1u;
    b.beta[k] = 1 - b.alpha[k];
  }
  return b;
}

template <class Real>
struct PlecticHodgeStructure {
  std::size_t n = 0;
  Lattice lattice;
  std::map<Bidegree, CMatrix<Real>> pieces;  // columns: basis of H^{α,β} in lattice coordinates

  std::size_t rank() const { return lattice.rank(); }
  std::size_t total_columns() const {
    std::size_t c = 0;
    for (const auto& [b, m] : pieces) c += m.cols();
    return c;
  }
  const CMatrix<Real>* piece(const Bidegree& b) const {
    auto it = pieces.find(b);
    return it == pieces.end() ? nullptr : &it->second;
  }
};

template <class Real>
struct ClassicalHodgeStructure {
  Lattice lattice;
  std::map<std::pair<int, int>, CMatrix<Real>> pieces;

  std::size_t rank() const { return lattice.rank(); }
  std::size_t dim(int p, int q) const {
    auto it = pieces.find({p, q});
    return it == pieces.end() ? 0 : it->second.cols();
  }
};

template <class Real>
struct ValidationReport {
  std::size_t rank = 0;
  std::size_t total_columns = 0;
  Real span_defect{};         // rank - numerical rank of the concatenated pieces
  Real min_singular_value{};  // of the concatenated, piecewise-orthonormalized bases
  Real symmetry_residual{};   // max sine of principal angle between conj(H^{α,β}) and H^{β,α}
  bool pass = false;
};

template <class Real>
void check_piece_shapes(const PlecticHodgeStructure<Real>& h) {
  for (const auto& [b, m] : h.pieces) {
    if (b.alpha.size() != h.n || b.beta.size() != h.n)
      throw DimensionError("bidegree " + b.str() + " has wrong length for n = " + std::to_string(h.n));
    if (m.rows() != h.rank())
      throw DimensionError("piece " + b.str() + " has " + std::to_string(m.rows()) + " rows, lattice rank is " +
                           std::to_string(h.rank()));
  }
  if (h.total_columns() != h.rank())
    throw DimensionError("pieces have " + std::to_string(h.total_columns()) + " columns in total, lattice rank is " +
                         std::to_string(h.rank()));
}

template <class Real>
ValidationReport<Real> validate(const PlecticHodgeStructure<Real>& h, const Real& tol) {
  check_piece_shapes(h);
  ValidationReport<Real> r;
  r.rank = h.rank();
  r.total_columns = h.total_columns();
  CMatrix<Real> all(h.rank(), 0);
  for (const auto& [b, m] : h.pieces) {
    if (m.cols() == 0) continue;
    CMatrix<Real> q = orthonormal_basis(m, tol);
    all = hcat(all, q);
  }
  if (all.cols() == 0) {
    r.span_defect = Real(static_cast<long long>(h.rank()));
  } else {
    auto d = svd(all);
    std::size_t rk = numerical_rank(d.sigma, tol);
    r.span_defect = Real(static_cast<long long>(h.rank() - std::min(rk, h.rank())));
    r.min_singular_value = d.sigma.back();
  }
  r.symmetry_residual = Real(0);
  for (const auto& [b, m] : h.pieces) {
    if (m.cols() == 0) continue;
    const CMatrix<Real>* partner = h.piece(b.swapped());
    Real res = (partner == nullptr || partner->cols() == 0) ? Real(1) : subspace_distance(m.conj(), *partner, tol);
    if (res > r.symmetry_residual) r.symmetry_residual = res;
  }
  r.pass = r.span_defect < tol && r.symmetry_residual < tol;
  return r;
}

template <class Real>
ClassicalHodgeStructure<Real> refine_to_classical(const PlecticHodgeStructure<Real>& h) {
  ClassicalHodgeStructure<Real> c;
  c.lattice = h.lattice;
  for (const auto& [b, m] : h.pieces) {
    auto key = std::make_pair(b.abs_alpha(), b.abs_beta());
    auto it = c.pieces.find(key);
    if (it == c.pieces.end())
      c.pieces.emplace(key, m);
    else
      it->second = hcat(it->second, m);
  }
  return c;
}

template <class Real>
bool is_effective_weight_one(const PlecticHodgeStructure<Real>& h) {
  for (const auto& [b, m] : h.pieces)
    if (m.cols() > 0 && !b.is_weight_one_effective()) return false;
  return true;
}

/// F^{1_j} = ⊕_{α_j ≥ 1} H^{α,β}; j is 1-based.
template <class Real>
CMatrix<Real> hodge_filtration(const PlecticHodgeStructure<Real>& h, std::size_t j) {
  if (j < 1 || j > h.n) throw InputError("filtration index j = " + std::to_string(j) + " out of range 1.." + std::to_string(h.n));
  if (!is_effective_weight_one(h)) throw InputError("hodge_filtration requires an effective structure of weight 1");
  CMatrix<Real> F(h.rank(), 0);
  for (const auto& [b, m] : h.pieces)
    if (b.alpha[j - 1] >= 1) F = hcat(F, m);
  return F;
}

/// ⊕_{α_j = 0} H^{α,β}, the conjugate of F^{1_j} for weight-1̲ structures.
template <class Real>
CMatrix<Real> conjugate_filtration(const PlecticHodgeStructure<Real>& h, std::size_t j) {
  if (j < 1 || j > h.n) throw InputError("filtration index out of range");
  CMatrix<Real> F(h.rank(), 0);
  for (const auto& [b, m] : h.pieces)
    if (b.alpha[j - 1] == 0) F = hcat(F, m);
  return F;
}

template <class Real>
PlecticHodgeStructure<Real> tensor(const PlecticHodgeStructure<Real>& a, const PlecticHodgeStructure<Real>& b) {
  PlecticHodgeStructure<Real> t;
  t.n = a.n + b.n;
  t.lattice = {a.lattice.ambient_rank * b.lattice.ambient_rank, kron(a.lattice.basis, b.lattice.basis)};
  for (const auto& [ba, ma] : a.pieces)
    for (const auto& [bb, mb] : b.pieces) {
      if (ma.cols() == 0 || mb.cols() == 0) continue;
      t.pieces.emplace(concat(ba, bb), kron(ma, mb));
    }
  return t;
}

/// The weight-1 structure H^1(T, Z) = Hom(Λ, Z) of a complex torus, in the
/// basis dual to the period columns: H^{1,0} is spanned by the dz_k, whose
/// coordinates are the rows of Π.
template <class Real>
PlecticHodgeStructure<Real> h1_structure(const ComplexTorus<Real>& t) {
  PlecticHodgeStructure<Real> h;
  h.n = 1;
  h.lattice = Lattice::standard(2 * t.g);
  h.pieces.emplace(Bidegree{{1}, {0}}, t.periods.transpose());
  h.pieces.emplace(Bidegree{{0}, {1}}, t.periods.adjoint());
  return h;
}

/// The rank-1 structure with a single piece at bidegree (0,0), n = 1.
template <class Real>
PlecticHodgeStructure<Real> trivial_structure() {
  PlecticHodgeStructure<Real> h;
  h.n = 1;
  h.lattice = Lattice::standard(1);
  h.pieces.emplace(Bidegree{{0}, {0}}, CMatrix<Real>::identity(1));
  return h;
}

/// J_plectic(H, j) = H \ (H ⊗ C) / F^{1_j}. The quotient is identified with
/// the complement ⊕_{α_j=0} H^{α,β}; the period of lattice vector e_k is its
/// coordinate vector in that complement.
template <class Real>
ComplexTorus<Real> plectic_jacobian(const PlecticHodgeStructure<Real>& h, std::size_t j, const Real& tol) {
  CMatrix<Real> F = hodge_filtration(h, j);
  CMatrix<Real> Fbar = conjugate_filtration(h, j);
  const std::size_t m = h.rank();
  if (m % 2 != 0 || F.cols() != m / 2 || Fbar.cols() != m / 2)
    throw NumericalError("degenerate projection: F^{1_j} does not have half the rank");
  CMatrix<Real> B = hcat(F, Fbar);
  if (rank(B, tol) != m) throw NumericalError("degenerate projection: F^{1_j} and its conjugate are not complementary");
  CMatrix<Real> Binv = inverse(B);
  ComplexTorus<Real> t(Binv.block(m / 2, 0, m / 2, m));
  if (!is_full_lattice(t, tol)) throw NumericalError("degenerate projection: lattice image is not a full lattice");
  return t;
}

/// True iff f (integer, dst.rank x src.rank, acting on column vectors)
/// carries each H^{α,β}(src) into H^{α,β}(dst).
template <class Real>
bool check_morphism(const IntMatrix& f, const PlecticHodgeStructure<Real>& src, const PlecticHodgeStructure<Real>& dst,
                    const Real& tol) {
  if (f.rows() != dst.rank() || f.cols() != src.rank())
    throw DimensionError("morphism matrix " + f.shape() + " does not map rank " + std::to_string(src.rank()) +
                         " to rank " + std::to_string(dst.rank()));
  if (src.n != dst.n) throw DimensionError("morphism between structures of different plectic degree");
  CMatrix<Real> F = to_floating<Complex<Real>>(f);
  for (const auto& [b, m] : src.pieces) {
    if (m.cols() == 0) continue;
    CMatrix<Real> img = F * m;
    Real scale = frobenius_norm(m);
    const CMatrix<Real>* target = dst.piece(b);
    Real res = (target == nullptr || target->cols() == 0) ? frobenius_norm(img) : projection_residual(*target, img, tol);
    if (res > tol * (scale > Real(1) ? scale : Real(1))) return false;
  }
  return true;
}

template <class Real>
struct OrthogonalityReport {
  Real max_defect{};
  bool pass = false;
};

/// Each H^{α,β} must equal the annihilator, under v^T Q w, of the sum of all
/// pieces other than H^{α^c,β^c}, α^c = 1̲ - α, β^c = 1̲ - β.
template <class Real>
OrthogonalityReport<Real> orthogonality_report(const PlecticHodgeStructure<Real>& h, const IntMatrix& pairing,
                                               const Real& tol) {
  if (pairing.rows() != h.rank() || pairing.cols() != h.rank())
    throw DimensionError("pairing must be " + std::to_string(h.rank()) + " x " + std::to_string(h.rank()));
  if (!is_unimodular(pairing)) throw InputError("pairing is not perfect (determinant is not +-1)");
  CMatrix<Real> Q = to_floating<Complex<Real>>(pairing);
  OrthogonalityReport<Real> rep;
  for (const auto& [b, m] : h.pieces) {
    if (m.cols() == 0) continue;
    Bidegree comp{b.alpha, b.beta};
    for (auto& a : comp.alpha) a = 1 - a;
    for (auto& x : comp.beta) x = 1 - x;
    CMatrix<Real> others(h.rank(), 0);
    for (const auto& [b2, m2] : h.pieces)
      if (!(b2 == comp)) others = hcat(others, m2);
    CMatrix<Real> ann = others.cols() == 0 ? CMatrix<Real>::identity(h.rank())
                                           : null_space(CMatrix<Real>((Q * others).transpose()), tol);
    Real d = subspace_distance(m, ann, tol);
    if (d > rep.max_defect) rep.max_defect = d;
  }
  rep.pass = rep.max_defect < tol;
  return rep;
}

template <class Real>
bool orthogonality_check(const PlecticHodgeStructure<Real>& h, const IntMatrix& pairing, const Real& tol) {
  return orthogonality_report(h, pairing, tol).pass;
}

/// Maximal principal-angle distance between matching pieces of a and b after
/// carrying a through the lattice map U (b.rank x a.rank); 1 if bidegree sets
/// differ.
template <class Real>
Real piecewise_distance(const PlecticHodgeStructure<Real>& a, const PlecticHodgeStructure<Real>& b, const IntMatrix& U,
                        const Real& tol) {
  CMatrix<Real> F = to_floating<Complex<Real>>(U);
  Real worst(0);
  for (const auto& [bd, m] : a.pieces) {
    if (m.cols() == 0) continue;
    const CMatrix<Real>* other = b.piece(bd);
    if (other == nullptr) return Real(1);
    Real d = subspace_distance(CMatrix<Real>(F * m), *other, tol);
    if (d > worst) worst = d;
  }
  for (const auto& [bd, m] : b.pieces)
    if (m.cols() > 0 && a.piece(bd) == nullptr) return Real(1);
  return worst;
}

}  // namespace plectic
