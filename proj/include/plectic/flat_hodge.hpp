#pragma once

// Refined Hodge theory on flat product tori X = ∏ C/Λ_j, realized on
// trigonometric-polynomial forms e^{2πi<m,x>} dz_α ∧ dz̄_β. Every operator
// below maps this finite space to itself, so identities hold exactly up to
// rounding.

#include "plectic/plectic_hodge.hpp"
#include "plectic/sparse.hpp"

#include <bit>
#include <functional>
#include <numeric>

namespace plectic {

template <class Real>
struct FlatTorus {
  std::size_t n = 0;
  RMatrix<Real> lattice;  // 2n x 2n; rows (Re z_1, Im z_1, ...), columns are generators
  std::vector<Real> weights;  // metric Σ w_j |dz_j|^2, i.e. w_j (dx_j^2 + dy_j^2)
};

/// Checks the product shape (generators 2j, 2j+1 span the z_j line) and the
/// weights.
template <class Real>
FlatTorus<Real> make_flat_torus(RMatrix<Real> lattice, std::vector<Real> weights) {
  if (lattice.rows() != lattice.cols() || lattice.rows() % 2 != 0 || lattice.rows() == 0)
    throw DimensionError("flat torus lattice must be 2n x 2n, got " + lattice.shape());
  const std::size_t n = lattice.rows() / 2;
  if (weights.size() != n) throw DimensionError("need one metric weight per complex coordinate");
  for (const auto& w : weights)
    if (!(w > Real(0))) throw InputError("metric weights must be positive");
  for (std::size_t r = 0; r < 2 * n; ++r)
    for (std::size_t c = 0; c < 2 * n; ++c)
      if (r / 2 != c / 2 && lattice(r, c) != Real(0))
        throw InputError("lattice is not a product of rank-2 lattices, one per coordinate");
  for (std::size_t j = 0; j < n; ++j) {
    Real det = lattice(2 * j, 2 * j) * lattice(2 * j + 1, 2 * j + 1) - lattice(2 * j, 2 * j + 1) * lattice(2 * j + 1, 2 * j);
    if (det == Real(0)) throw InputError("factor lattice is degenerate");
  }
  return {n, std::move(lattice), std::move(weights)};
}

/// ∏ C/(Z ω_{j,1} + Z ω_{j,2}).
template <class Real>
FlatTorus<Real> product_of_curves(const std::vector<std::pair<Complex<Real>, Complex<Real>>>& periods,
                                  std::vector<Real> weights = {}) {
  const std::size_t n = periods.size();
  if (weights.empty()) weights.assign(n, Real(1));
  RMatrix<Real> L(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    L(2 * j, 2 * j) = periods[j].first.real();
    L(2 * j + 1, 2 * j) = periods[j].first.imag();
    L(2 * j, 2 * j + 1) = periods[j].second.real();
    L(2 * j + 1, 2 * j + 1) = periods[j].second.imag();
  }
  return make_flat_torus(std::move(L), std::move(weights));
}

/// Index layout: i = freq * 4^n + (alpha_mask | beta_mask << n); the
/// frequency digits (base 2N+1, offset -N) are the coordinates of m in the
/// dual basis of each factor lattice.
template <class Real>
class FourierFormSpace {
 public:
  FourierFormSpace(FlatTorus<Real> t, std::size_t N) : torus_(std::move(t)), N_(N), n_(torus_.n) {
    side_ = 2 * N_ + 1;
    num_freq_ = 1;
    for (std::size_t i = 0; i < 2 * n_; ++i) num_freq_ *= side_;
    forms_ = std::size_t(1) << (2 * n_);
    gfac_.resize(n_);
    volume_ = Real(1);
    for (std::size_t j = 0; j < n_; ++j) {
      gfac_[j] = Real(2) / torus_.weights[j];
      const auto& L = torus_.lattice;
      Real a = L(2 * j, 2 * j), b = L(2 * j, 2 * j + 1), c = L(2 * j + 1, 2 * j), d = L(2 * j + 1, 2 * j + 1);
      Real det = a * d - b * c;
      volume_ *= torus_.weights[j] * abs_of(det);
      // Dual basis D = B^{-T}: columns (d, -b)/det and (-c, a)/det.
      dual_.push_back({Complex<Real>(d / det, -b / det), Complex<Real>(-c / det, a / det)});
    }
    zeta_.resize(num_freq_ * n_);
    for (std::size_t f = 0; f < num_freq_; ++f) {
      auto k = frequency(f);
      for (std::size_t j = 0; j < n_; ++j)
        zeta_[f * n_ + j] = Real(static_cast<double>(k[2 * j])) * dual_[j][0] + Real(static_cast<double>(k[2 * j + 1])) * dual_[j][1];
    }
  }

  const FlatTorus<Real>& torus() const { return torus_; }
  std::size_t n() const { return n_; }
  std::size_t truncation() const { return N_; }
  std::size_t size() const { return num_freq_ * forms_; }
  std::size_t num_frequencies() const { return num_freq_; }
  std::size_t forms_per_frequency() const { return forms_; }
  std::size_t zero_frequency() const { return (num_freq_ - 1) / 2; }

  std::size_t index(std::size_t freq, unsigned alpha, unsigned beta) const { return freq * forms_ + (alpha | (beta << n_)); }
  std::size_t freq_of(std::size_t i) const { return i / forms_; }
  unsigned alpha_of(std::size_t i) const { return static_cast<unsigned>(i % forms_) & ((1u << n_) - 1); }
  unsigned beta_of(std::size_t i) const { return static_cast<unsigned>(i % forms_) >> n_; }
  std::size_t degree_of(std::size_t i) const { return std::popcount(alpha_of(i)) + std::popcount(beta_of(i)); }

  /// Frequency coordinates in [-N, N]^{2n}.
  std::vector<long long> frequency(std::size_t f) const {
    std::vector<long long> k(2 * n_);
    for (auto& d : k) {
      d = static_cast<long long>(f % side_) - static_cast<long long>(N_);
      f /= side_;
    }
    return k;
  }
  std::size_t negate_frequency(std::size_t f) const { return num_freq_ - 1 - f; }
  /// (m, α, β) ↦ (−m, β, α).
  std::size_t conj_index(std::size_t i) const { return index(negate_frequency(freq_of(i)), beta_of(i), alpha_of(i)); }

  /// ζ_j(m) with <m, x> = Re(conj(ζ_j) z_j) summed over j.
  const Complex<Real>& zeta(std::size_t f, std::size_t j) const { return zeta_[f * n_ + j]; }
  /// |dz_j|^2 = 2 / w_j.
  const Real& form_factor(std::size_t j) const { return gfac_[j]; }
  const Real& volume() const { return volume_; }

  /// <e_i, e_i> for the L^2 inner product with volume form ω^n/n!.
  Real gram(std::size_t i) const {
    Real g = volume_;
    unsigned a = alpha_of(i), b = beta_of(i);
    for (std::size_t j = 0; j < n_; ++j) {
      if (a >> j & 1u) g *= gfac_[j];
      if (b >> j & 1u) g *= gfac_[j];
    }
    return g;
  }
  /// G_r / G_c, formed from the factors over the symmetric difference only.
  Real gram_ratio(std::size_t r, std::size_t c) const {
    Real q(1);
    unsigned ar = alpha_of(r), br = beta_of(r), ac = alpha_of(c), bc = beta_of(c);
    for (std::size_t j = 0; j < n_; ++j) {
      int e = int(ar >> j & 1u) + int(br >> j & 1u) - int(ac >> j & 1u) - int(bc >> j & 1u);
      for (; e > 0; --e) q *= gfac_[j];
      for (; e < 0; ++e) q /= gfac_[j];
    }
    return q;
  }
  std::vector<Real> gram_vector() const {
    std::vector<Real> g(size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = gram(i);
    return g;
  }

 private:
  FlatTorus<Real> torus_;
  std::size_t N_, n_, side_ = 1, num_freq_ = 1, forms_ = 1;
  std::vector<Real> gfac_;
  Real volume_{1};
  std::vector<std::array<Complex<Real>, 2>> dual_;
  std::vector<Complex<Real>> zeta_;
};

template <class Real>
FourierFormSpace<Real> build_space(const FlatTorus<Real>& t, std::size_t N) {
  return FourierFormSpace<Real>(t, N);
}

/// An operator on the whole space. Antilinear operators act as v ↦ M conj(v).
template <class Real>
struct OperatorMatrix {
  SparseMatrix<Complex<Real>> matrix;
  bool antilinear = false;

  std::vector<Complex<Real>> apply(std::vector<Complex<Real>> v) const {
    if (antilinear)
      for (auto& x : v) x = std::conj(x);
    return matrix.apply(v);
  }
};

namespace detail {

template <class Real>
Complex<Real> pi_i() {
  return Complex<Real>(Real(0), pi<Real>());
}

/// Wedge from the left with dz_j (bar = false) or dz̄_j, optionally
/// differentiating the coefficient by ∂/∂z_j resp. ∂/∂z̄_j.
template <class Real>
OperatorMatrix<Real> raise(const FourierFormSpace<Real>& s, std::size_t j, bool bar, bool differentiate) {
  std::vector<std::tuple<std::size_t, std::size_t, Complex<Real>>> t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned a = s.alpha_of(i), b = s.beta_of(i);
    unsigned& target = bar ? b : a;
    if (target >> j & 1u) continue;
    int swaps = bar ? std::popcount(a) + std::popcount(b & ((1u << j) - 1)) : std::popcount(a & ((1u << j) - 1));
    Complex<Real> coef(swaps % 2 ? Real(-1) : Real(1), Real(0));
    if (differentiate) {
      const auto& z = s.zeta(s.freq_of(i), j);
      coef *= detail::pi_i<Real>() * (bar ? z : std::conj(z));
    }
    target |= 1u << j;
    t.emplace_back(s.index(s.freq_of(i), a, b), i, coef);
  }
  return {SparseMatrix<Complex<Real>>::from_triplets(s.size(), s.size(), std::move(t)), false};
}

inline void check_factor(std::size_t j, std::size_t n) {
  if (j < 1 || j > n) throw InputError("factor index must lie in 1..n");
}

}  // namespace detail

/// ξ_j: the dz_j-component of ∂, zero on forms with α_j = 1. j is 1-based.
template <class Real>
OperatorMatrix<Real> xi_operator(const FourierFormSpace<Real>& s, std::size_t j) {
  detail::check_factor(j, s.n());
  return detail::raise(s, j - 1, false, true);
}

/// The dz̄_j-component of ∂̄.
template <class Real>
OperatorMatrix<Real> xi_bar_operator(const FourierFormSpace<Real>& s, std::size_t j) {
  detail::check_factor(j, s.n());
  return detail::raise(s, j - 1, true, true);
}

/// e_j(ψ) = dz_j ∧ ψ.
template <class Real>
OperatorMatrix<Real> exterior_operator(const FourierFormSpace<Real>& s, std::size_t j) {
  detail::check_factor(j, s.n());
  return detail::raise(s, j - 1, false, false);
}

/// ∂_j (bar = false) or ∂̄_j acting on coefficients only.
template <class Real>
OperatorMatrix<Real> coordinate_derivative(const FourierFormSpace<Real>& s, std::size_t j, bool bar = false) {
  detail::check_factor(j, s.n());
  std::vector<std::tuple<std::size_t, std::size_t, Complex<Real>>> t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& z = s.zeta(s.freq_of(i), j - 1);
    t.emplace_back(i, i, detail::pi_i<Real>() * (bar ? z : std::conj(z)));
  }
  return {SparseMatrix<Complex<Real>>::from_triplets(s.size(), s.size(), std::move(t)), false};
}

template <class Real>
OperatorMatrix<Real> del_operator(const FourierFormSpace<Real>& s) {
  OperatorMatrix<Real> r{SparseMatrix<Complex<Real>>(s.size(), s.size()), false};
  for (std::size_t j = 1; j <= s.n(); ++j) r.matrix = r.matrix + xi_operator(s, j).matrix;
  return r;
}

template <class Real>
OperatorMatrix<Real> del_bar_operator(const FourierFormSpace<Real>& s) {
  OperatorMatrix<Real> r{SparseMatrix<Complex<Real>>(s.size(), s.size()), false};
  for (std::size_t j = 1; j <= s.n(); ++j) r.matrix = r.matrix + xi_bar_operator(s, j).matrix;
  return r;
}

template <class Real>
OperatorMatrix<Real> d_operator(const FourierFormSpace<Real>& s) {
  return {del_operator(s).matrix + del_bar_operator(s).matrix, false};
}

/// Adjoint for the L^2 inner product: (A*)_{cr} = conj(A_{rc}) G_r / G_c.
template <class Real>
OperatorMatrix<Real> adjoint(const FourierFormSpace<Real>& s, const OperatorMatrix<Real>& op) {
  if (op.antilinear) throw InputError("adjoint of an antilinear operator is not supported");
  auto m = op.matrix.adjoint().scaled([&](std::size_t c, std::size_t r) { return Complex<Real>(s.gram_ratio(r, c), Real(0)); });
  return {std::move(m), false};
}

/// a ∘ b, tracking antilinearity: A conj(B) when a is antilinear.
template <class Real>
OperatorMatrix<Real> compose(const OperatorMatrix<Real>& a, const OperatorMatrix<Real>& b) {
  if (!a.antilinear) return {a.matrix * b.matrix, b.antilinear};
  std::vector<std::tuple<std::size_t, std::size_t, Complex<Real>>> t;
  b.matrix.for_each([&](std::size_t r, std::size_t c, const Complex<Real>& v) { t.emplace_back(r, c, std::conj(v)); });
  auto bc = SparseMatrix<Complex<Real>>::from_triplets(b.matrix.rows(), b.matrix.cols(), std::move(t));
  return {a.matrix * bc, !b.antilinear};
}

/// Δ_P = P P* + P* P.
template <class Real>
OperatorMatrix<Real> laplacian(const FourierFormSpace<Real>& s, const OperatorMatrix<Real>& P) {
  auto Ps = adjoint(s, P);
  return {P.matrix * Ps.matrix + Ps.matrix * P.matrix, false};
}

/// Operator norm bound in the L^2 norm of the space.
template <class Real>
Real l2_norm_bound(const FourierFormSpace<Real>& s, const SparseMatrix<Complex<Real>>& m) {
  return operator_norm_bound(m, s.gram_vector());
}

template <class Real>
struct IdentityReport {
  Real max_residual{};
  std::size_t pairs = 0;
  bool pass = false;
};

/// max over j != k of ||ξ_j ξ_k* + ξ_k* ξ_j||.
template <class Real>
IdentityReport<Real> verify_refined_identities(const FourierFormSpace<Real>& s, const Real& tol) {
  IdentityReport<Real> r;
  std::vector<OperatorMatrix<Real>> xi, xis;
  for (std::size_t j = 1; j <= s.n(); ++j) {
    xi.push_back(xi_operator(s, j));
    xis.push_back(adjoint(s, xi.back()));
  }
  auto g = s.gram_vector();
  for (std::size_t j = 0; j < s.n(); ++j)
    for (std::size_t k = 0; k < s.n(); ++k) {
      if (j == k) continue;
      auto ac = xi[j].matrix * xis[k].matrix + xis[k].matrix * xi[j].matrix;
      Real res = operator_norm_bound(ac, g);
      if (res > r.max_residual) r.max_residual = res;
      ++r.pairs;
    }
  r.pass = r.max_residual < tol;
  return r;
}

template <class Real>
struct LaplacianReport {
  Real residual_half_sum{};   // ||Δ_d - 1/2 Σ Δ_{ξ_j}||
  Real residual_two_sum{};    // ||Δ_d - 2 Σ Δ_{ξ_j}||
  Real residual_two_del{};    // ||Δ_d - 2 Δ_∂||
  Real laplacian_norm{};      // ||Δ_d||
  std::size_t off_block_entries = 0;  // stored entries of Δ_d outside its (m, α, β) blocks
  bool pass = false;          // half-sum and two-del residuals below tol, no off-block entries
};

template <class Real>
LaplacianReport<Real> verify_laplacian_sum(const FourierFormSpace<Real>& s, const Real& tol) {
  LaplacianReport<Real> r;
  auto g = s.gram_vector();
  auto Dd = laplacian(s, d_operator(s)).matrix;
  auto Ddel = laplacian(s, del_operator(s)).matrix;
  SparseMatrix<Complex<Real>> sum(s.size(), s.size());
  for (std::size_t j = 1; j <= s.n(); ++j) sum = sum + laplacian(s, xi_operator(s, j)).matrix;
  r.laplacian_norm = operator_norm_bound(Dd, g);
  r.residual_half_sum = operator_norm_bound(Dd - sum * Complex<Real>(Real(1) / Real(2)), g);
  r.residual_two_sum = operator_norm_bound(Dd - sum * Complex<Real>(Real(2)), g);
  r.residual_two_del = operator_norm_bound(Dd - Ddel * Complex<Real>(Real(2)), g);
  Dd.for_each([&](std::size_t row, std::size_t col, const Complex<Real>&) {
    if (row != col) ++r.off_block_entries;
  });
  r.pass = r.residual_half_sum < tol && r.residual_two_del < tol && r.off_block_entries == 0;
  return r;
}

/// A basis of forms supported on `support`; row i of coeffs is the
/// coefficient of basis element support[i].
template <class Real>
struct FormBasis {
  std::vector<std::size_t> support;
  CMatrix<Real> coeffs;

  std::size_t dim() const { return coeffs.cols(); }
  std::vector<Complex<Real>> full_column(std::size_t size, std::size_t c) const {
    std::vector<Complex<Real>> v(size);
    for (std::size_t i = 0; i < support.size(); ++i) v[support[i]] = coeffs(i, c);
    return v;
  }
};

/// Harmonic spaces ℋ^{α,β} for every refined type, keyed by Bidegree. The
/// kernel of Δ_d is computed per connected block of the matrix inside each
/// type, with singular values below tol * ||Δ_d||_max counted as zero.
template <class Real>
std::map<Bidegree, FormBasis<Real>> harmonic_spaces(const FourierFormSpace<Real>& s, const Real& tol) {
  const std::size_t n = s.n();
  auto D = laplacian(s, d_operator(s)).matrix;
  Real scale = max_abs(D);
  if (scale < Real(1)) scale = Real(1);
  // Union-find over the sparsity pattern.
  std::vector<std::size_t> parent(s.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  D.for_each([&](std::size_t r, std::size_t c, const Complex<Real>&) {
    if (s.alpha_of(r) != s.alpha_of(c) || s.beta_of(r) != s.beta_of(c))
      throw NumericalError("Δ_d mixes refined types");
    parent[find(r)] = find(c);
  });
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < s.size(); ++i) comps[find(i)].push_back(i);

  std::map<Bidegree, FormBasis<Real>> out;
  for (unsigned a = 0; a < (1u << n); ++a)
    for (unsigned b = 0; b < (1u << n); ++b) {
      Bidegree bd;
      for (std::size_t j = 0; j < n; ++j) {
        bd.alpha.push_back(int(a >> j & 1u));
        bd.beta.push_back(int(b >> j & 1u));
      }
      out[bd];
    }
  for (const auto& [root, idx] : comps) {
    CMatrix<Real> block = D.dense_block(idx, idx);
    auto dec = svd(block);
    std::vector<std::size_t> kernel_cols;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      Real sig = k < dec.sigma.size() ? dec.sigma[k] : Real(0);
      if (sig <= tol * scale) kernel_cols.push_back(k);
    }
    if (kernel_cols.empty()) continue;
    Bidegree bd;
    for (std::size_t j = 0; j < n; ++j) {
      bd.alpha.push_back(int(s.alpha_of(idx[0]) >> j & 1u));
      bd.beta.push_back(int(s.beta_of(idx[0]) >> j & 1u));
    }
    auto& fb = out[bd];
    // Append this component's kernel vectors on the union support.
    std::vector<std::size_t> support = fb.support;
    support.insert(support.end(), idx.begin(), idx.end());
    CMatrix<Real> coeffs(support.size(), fb.dim() + kernel_cols.size());
    coeffs.set_block(0, 0, fb.coeffs);
    for (std::size_t k = 0; k < kernel_cols.size(); ++k)
      for (std::size_t i = 0; i < idx.size(); ++i) coeffs(fb.support.size() + i, fb.dim() + k) = dec.V(i, kernel_cols[k]);
    fb.support = std::move(support);
    fb.coeffs = std::move(coeffs);
  }
  return out;
}

template <class Real>
FormBasis<Real> harmonic_space(const FourierFormSpace<Real>& s, const Bidegree& type, const Real& tol) {
  if (type.alpha.size() != s.n() || type.beta.size() != s.n()) throw DimensionError("bidegree length must equal n");
  for (std::size_t j = 0; j < s.n(); ++j)
    if ((type.alpha[j] != 0 && type.alpha[j] != 1) || (type.beta[j] != 0 && type.beta[j] != 1))
      throw InputError("refined bidegrees have entries in {0, 1}");
  return harmonic_spaces(s, tol).at(type);
}

/// Complex conjugation of forms: conj(f dz_α ∧ dz̄_β) = (−1)^{|α||β|} conj(f) dz_β ∧ dz̄_α.
template <class Real>
std::vector<Complex<Real>> conjugate_form(const FourierFormSpace<Real>& s, const std::vector<Complex<Real>>& v) {
  std::vector<Complex<Real>> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int sign = (std::popcount(s.alpha_of(i)) * std::popcount(s.beta_of(i))) % 2 ? -1 : 1;
    out[s.conj_index(i)] = Real(sign) * std::conj(v[i]);
  }
  return out;
}

namespace detail {

/// Sign of the permutation taking the generator sequence `seq` (positions in
/// dz_1, dz̄_1, ..., dz_n, dz̄_n) to ascending order.
inline int permutation_sign(const std::vector<int>& seq) {
  int inv = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t k = i + 1; k < seq.size(); ++k)
      if (seq[i] > seq[k]) ++inv;
  return inv % 2 ? -1 : 1;
}

inline std::vector<int> generator_positions(unsigned alpha, unsigned beta, std::size_t n) {
  std::vector<int> seq;
  for (std::size_t j = 0; j < n; ++j)
    if (alpha >> j & 1u) seq.push_back(int(2 * j));
  for (std::size_t j = 0; j < n; ++j)
    if (beta >> j & 1u) seq.push_back(int(2 * j + 1));
  return seq;
}

}  // namespace detail

/// The conjugate-linear Hodge star ψ ∧ ⋆η = (ψ, η) vol, which sends type
/// (α, β) to (α^c, β^c) and frequency m to −m.
template <class Real>
OperatorMatrix<Real> hodge_star(const FourierFormSpace<Real>& s) {
  const std::size_t n = s.n();
  const unsigned full = (1u << n) - 1;
  // vol = ∏ w_j dx_j ∧ dy_j = ∏ (i w_j / 2) Ω,  Ω = dz_1 ∧ dz̄_1 ∧ ... ∧ dz_n ∧ dz̄_n.
  Complex<Real> volc(Real(1), Real(0));
  for (std::size_t j = 0; j < n; ++j) volc *= Complex<Real>(Real(0), s.torus().weights[j] / Real(2));
  std::vector<std::tuple<std::size_t, std::size_t, Complex<Real>>> t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned a = s.alpha_of(i), b = s.beta_of(i);
    unsigned ac = full & ~a, bc = full & ~b;
    auto seq = detail::generator_positions(a, b, n);
    auto rest = detail::generator_positions(ac, bc, n);
    seq.insert(seq.end(), rest.begin(), rest.end());
    Real norm2 = s.gram(i) / s.volume();
    Complex<Real> c = volc * norm2 * Real(detail::permutation_sign(seq));
    t.emplace_back(s.index(s.negate_frequency(s.freq_of(i)), ac, bc), i, c);
  }
  return {SparseMatrix<Complex<Real>>::from_triplets(s.size(), s.size(), std::move(t)), true};
}

template <class Real>
struct MetricIndependenceReport {
  Real closed_residual{};
  Real residual{};  // distance of h_a - h_b to im(d)
  std::vector<Complex<Real>> harmonic_a, harmonic_b;
  bool pass = false;
};

namespace detail {

/// Orthogonal projection onto the harmonic forms in the L^2 metric of s.
template <class Real>
std::vector<Complex<Real>> harmonic_projection(const FourierFormSpace<Real>& s, const std::vector<Complex<Real>>& psi,
                                               const Real& tol) {
  std::vector<Complex<Real>> out(psi.size());
  for (const auto& [bd, fb] : harmonic_spaces(s, tol)) {
    if (fb.dim() == 0) continue;
    const std::size_t m = fb.support.size(), k = fb.dim();
    CMatrix<Real> gram(k, k), rhs(k, 1);
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = 0; q < k; ++q)
        for (std::size_t i = 0; i < m; ++i)
          gram(p, q) += std::conj(fb.coeffs(i, p)) * fb.coeffs(i, q) * s.gram(fb.support[i]);
      for (std::size_t i = 0; i < m; ++i) rhs(p, 0) += std::conj(fb.coeffs(i, p)) * psi[fb.support[i]] * s.gram(fb.support[i]);
    }
    CMatrix<Real> c = solve(gram, rhs);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) out[fb.support[i]] += fb.coeffs(i, p) * c(p, 0);
  }
  return out;
}

}  // namespace detail

/// Harmonic representatives of the class of a closed form ψ under two metrics
/// (weights a and b on the same lattice) differ by an exact form.
template <class Real>
MetricIndependenceReport<Real> metric_independence_check(const FlatTorus<Real>& t, const std::vector<Real>& weights_a,
                                                         const std::vector<Real>& weights_b, std::size_t N,
                                                         const std::vector<Complex<Real>>& psi, const Real& tol) {
  FourierFormSpace<Real> sa(make_flat_torus(t.lattice, weights_a), N), sb(make_flat_torus(t.lattice, weights_b), N);
  if (psi.size() != sa.size()) throw DimensionError("form does not match the space dimension");
  auto d = d_operator(sa).matrix;
  MetricIndependenceReport<Real> r;
  Real psi_norm(0);
  for (const auto& x : psi) psi_norm = std::max<Real>(psi_norm, abs_of(x));
  for (const auto& x : d.apply(psi)) r.closed_residual = std::max<Real>(r.closed_residual, abs_of(x));
  if (r.closed_residual > tol * (Real(1) + max_abs(d) * psi_norm)) throw InputError("form is not closed");
  r.harmonic_a = detail::harmonic_projection(sa, psi, tol);
  r.harmonic_b = detail::harmonic_projection(sb, psi, tol);
  // d preserves frequencies, so the distance to im(d) splits by frequency.
  const std::size_t F = sa.forms_per_frequency();
  Real total(0);
  for (std::size_t f = 0; f < sa.num_frequencies(); ++f) {
    CMatrix<Real> diff(F, 1);
    bool any = false;
    for (std::size_t k = 0; k < F; ++k) {
      diff(k, 0) = r.harmonic_a[f * F + k] - r.harmonic_b[f * F + k];
      if (diff(k, 0) != Complex<Real>(0)) any = true;
    }
    if (!any) continue;
    std::vector<std::size_t> idx(F);
    std::iota(idx.begin(), idx.end(), f * F);
    Real res = projection_residual(d.dense_block(idx, idx), diff, tol);
    total += res * res;
  }
  using std::sqrt;
  r.residual = sqrt(total);
  r.pass = r.residual < tol;
  return r;
}

/// Coefficients of the integral basis of H^k(X, Z) = Λ^k Hom(Λ, Z) in the
/// constant forms of degree k. Rows follow the subsets S of generators
/// (dz_1..dz_n, dz̄_1..dz̄_n) in lexicographic order, columns the subsets C
/// of lattice generators in lexicographic order.
template <class Real>
struct IntegralBasis {
  std::vector<std::vector<std::size_t>> form_subsets, lattice_subsets;
  CMatrix<Real> coefficients;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> k_subsets(std::size_t m, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < m; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace detail

template <class Real>
IntegralBasis<Real> integral_basis(const FlatTorus<Real>& t, std::size_t k) {
  const std::size_t n = t.n, m = 2 * n;
  if (k > m) throw InputError("degree exceeds the real dimension");
  RMatrix<Real> Binv = inverse(t.lattice);
  // φ_c = Σ_r Binv(c, r) dx_r, dx = (dz + dz̄)/2, dy = (dz − dz̄)/(2i).
  CMatrix<Real> Phi(m, m);
  const Real half = Real(1) / Real(2);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t j = 0; j < n; ++j) {
      Phi(c, j) = Complex<Real>(half * Binv(c, 2 * j), -half * Binv(c, 2 * j + 1));
      Phi(c, n + j) = Complex<Real>(half * Binv(c, 2 * j), half * Binv(c, 2 * j + 1));
    }
  IntegralBasis<Real> ib;
  ib.form_subsets = detail::k_subsets(m, k);
  ib.lattice_subsets = ib.form_subsets;
  const std::size_t r = ib.form_subsets.size();
  ib.coefficients = CMatrix<Real>(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) {
      CMatrix<Real> minor(k, k);
      for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = 0; y < k; ++y) minor(x, y) = Phi(ib.lattice_subsets[b][x], ib.form_subsets[a][y]);
      ib.coefficients(a, b) = determinant(minor);
    }
  return ib;
}

/// The degree-k cohomology with its plectic structure: pieces are the
/// harmonic spaces ℋ^{α,β}, |α|+|β| = k, written in the integral basis.
template <class Real>
PlecticHodgeStructure<Real> extract_plectic_structure(const FourierFormSpace<Real>& s, std::size_t k, const Real& tol,
                                                      const std::map<Bidegree, FormBasis<Real>>& harmonic) {
  const std::size_t n = s.n();
  auto ib = integral_basis(s.torus(), k);
  const std::size_t r = ib.form_subsets.size();
  std::map<std::vector<std::size_t>, std::size_t> row_of;
  for (std::size_t a = 0; a < r; ++a) row_of[ib.form_subsets[a]] = a;
  auto lu = lu_decompose(ib.coefficients);

  PlecticHodgeStructure<Real> h;
  h.n = n;
  h.lattice = Lattice::standard(r);
  std::size_t total = 0;
  const std::size_t f0 = s.zero_frequency();
  for (const auto& [bd, fb] : harmonic) {
    if (std::size_t(bd.abs_alpha() + bd.abs_beta()) != k) continue;
    CMatrix<Real> rhs(r, fb.dim());
    for (std::size_t i = 0; i < fb.support.size(); ++i) {
      const std::size_t idx = fb.support[i];
      bool constant = s.freq_of(idx) == f0;
      for (std::size_t c = 0; c < fb.dim(); ++c) {
        if (abs_of(fb.coeffs(i, c)) <= tol) continue;
        if (!constant) throw NumericalError("harmonic form with nonzero frequency on a flat torus");
        std::vector<std::size_t> S;
        for (std::size_t j = 0; j < n; ++j)
          if (s.alpha_of(idx) >> j & 1u) S.push_back(j);
        for (std::size_t j = 0; j < n; ++j)
          if (s.beta_of(idx) >> j & 1u) S.push_back(n + j);
        rhs(row_of.at(S), c) = fb.coeffs(i, c);
      }
    }
    total += fb.dim();
    h.pieces.emplace(bd, lu_solve(lu, rhs));
  }
  if (total != r)
    throw NumericalError("harmonic dimension " + std::to_string(total) + " does not match the Betti number " + std::to_string(r));
  return h;
}

template <class Real>
PlecticHodgeStructure<Real> extract_plectic_structure(const FourierFormSpace<Real>& s, std::size_t k, const Real& tol) {
  return extract_plectic_structure(s, k, tol, harmonic_spaces(s, tol));
}

/// Degrees 0..2n, sharing one harmonic computation.
template <class Real>
std::vector<PlecticHodgeStructure<Real>> extract_all_degrees(const FourierFormSpace<Real>& s, const Real& tol) {
  auto harmonic = harmonic_spaces(s, tol);
  std::vector<PlecticHodgeStructure<Real>> out;
  for (std::size_t k = 0; k <= 2 * s.n(); ++k) out.push_back(extract_plectic_structure(s, k, tol, harmonic));
  return out;
}

}  // namespace plectic
