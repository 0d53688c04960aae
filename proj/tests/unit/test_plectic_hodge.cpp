#include "plectic/complex_torus.hpp"
#include "plectic/plectic_hodge.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace plectic;
using C = std::complex<double>;
using PHS = PlecticHodgeStructure<double>;

namespace {

constexpr double kTol = 1e-9;

ComplexTorus<double> elliptic(C tau) { return ComplexTorus<double>(CMatrix<double>{{C(1, 0), tau}}); }

C random_tau(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.6, 2.0);
  return {re(rng), im(rng)};
}

}  // namespace

TEST(Validate, EllipticPasses) {
  auto h = h1_structure(elliptic(C(0, 1)));
  auto r = validate(h, kTol);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.symmetry_residual, kTol);
  EXPECT_EQ(r.span_defect, 0.0);
}

TEST(Validate, BrokenSymmetryFails) {
  auto h = h1_structure(elliptic(C(0, 1)));
  h.pieces[Bidegree{{0}, {1}}] = CMatrix<double>{{C(1, 0)}, {C(0.3, -2.0)}};
  auto r = validate(h, kTol);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.symmetry_residual, 0.1);
}

TEST(Validate, DimensionMismatchThrows) {
  auto h = h1_structure(elliptic(C(0, 1)));
  h.pieces[Bidegree{{1, 0}, {0, 1}}] = CMatrix<double>(2, 1);
  EXPECT_THROW(validate(h, kTol), DimensionError);
}

TEST(Tensor, TwoEllipticCurves) {
  std::mt19937_64 rng(1);
  auto t = tensor(h1_structure(elliptic(random_tau(rng))), h1_structure(elliptic(random_tau(rng))));
  EXPECT_EQ(t.rank(), 4u);
  EXPECT_EQ(t.n, 2u);
  EXPECT_EQ(t.pieces.size(), 4u);
  for (const auto& [b, m] : t.pieces) EXPECT_EQ(m.cols(), 1u);
  EXPECT_TRUE(validate(t, kTol).pass);
  EXPECT_TRUE(is_effective_weight_one(t));
}

TEST(Tensor, TrivialFactorIsIdentity) {
  auto h = h1_structure(elliptic(C(0.2, 1.3)));
  auto t = tensor(h, trivial_structure<double>());
  EXPECT_EQ(t.rank(), h.rank());
  EXPECT_TRUE(validate(t, kTol).pass);
  for (const auto& [b, m] : h.pieces) {
    Bidegree ext = concat(b, Bidegree{{0}, {0}});
    ASSERT_NE(t.piece(ext), nullptr);
    EXPECT_LT(subspace_distance(*t.piece(ext), m, kTol), kTol);
  }
}

TEST(Tensor, Associativity) {
  std::mt19937_64 rng(2);
  auto a = h1_structure(elliptic(random_tau(rng)));
  auto b = h1_structure(elliptic(random_tau(rng)));
  auto c = h1_structure(elliptic(random_tau(rng)));
  auto l = tensor(tensor(a, b), c), r = tensor(a, tensor(b, c));
  ASSERT_EQ(l.pieces.size(), r.pieces.size());
  EXPECT_LT(piecewise_distance(l, r, IntMatrix::identity(8), kTol), kTol);
}

TEST(Tensor, ValidateClosedRandom) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = tensor(h1_structure(elliptic(random_tau(rng))), h1_structure(elliptic(random_tau(rng))));
    EXPECT_TRUE(validate(t, kTol).pass);
  }
}

TEST(Effective, DetectsBadPiece) {
  PHS h;
  h.n = 1;
  h.lattice = Lattice::standard(2);
  h.pieces[Bidegree{{2}, {-1}}] = CMatrix<double>{{C(1, 0)}, {C(0, 1)}};
  h.pieces[Bidegree{{-1}, {2}}] = CMatrix<double>{{C(1, 0)}, {C(0, -1)}};
  EXPECT_FALSE(is_effective_weight_one(h));
  EXPECT_TRUE(is_effective_weight_one(h1_structure(elliptic(C(0, 1)))));
}

TEST(Effective, TensorOfThreeBruteForce) {
  std::mt19937_64 rng(4);
  PHS t = h1_structure(elliptic(random_tau(rng)));
  for (int k = 0; k < 2; ++k) t = tensor(t, h1_structure(elliptic(random_tau(rng))));
  EXPECT_TRUE(is_effective_weight_one(t));
  // Every piece bidegree is a concatenation of factor bidegrees.
  for (const auto& [b, m] : t.pieces)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(b.alpha[k] + b.beta[k], 1);
}

TEST(Refine, HodgeNumbersMatchKunneth) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 3; ++n) {
    PHS t = h1_structure(elliptic(random_tau(rng)));
    for (int k = 1; k < n; ++k) t = tensor(t, h1_structure(elliptic(random_tau(rng))));
    auto c = refine_to_classical(t);
    auto oracle_h = oracle::kunneth_hodge_numbers(n);
    std::size_t total = 0;
    for (const auto& [pq, cnt] : oracle_h) EXPECT_EQ(c.dim(pq.first, pq.second), static_cast<std::size_t>(cnt));
    for (const auto& [pq, m] : c.pieces) total += m.cols();
    EXPECT_EQ(total, t.rank());
  }
}

TEST(Refine, NEqualsOneIsIdentity) {
  auto h = h1_structure(elliptic(C(0.1, 1.1)));
  auto c = refine_to_classical(h);
  EXPECT_EQ(c.pieces.at({1, 0}), h.pieces.at(Bidegree{{1}, {0}}));
  EXPECT_EQ(c.pieces.at({0, 1}), h.pieces.at(Bidegree{{0}, {1}}));
}

TEST(Filtration, DimensionsAndPieces) {
  std::mt19937_64 rng(6);
  auto E1 = elliptic(random_tau(rng)), E2 = elliptic(random_tau(rng));
  auto h1 = h1_structure(E1), h2 = h1_structure(E2);
  auto t = tensor(h1, h2);
  for (std::size_t j = 1; j <= 2; ++j) EXPECT_EQ(hodge_filtration(t, j).cols(), 2u);
  // F^{1_1} = F^1 H^1(E1) ⊗ H^1(E2, C)
  CMatrix<double> expect = kron(h1.pieces.at(Bidegree{{1}, {0}}), CMatrix<double>::identity(2));
  EXPECT_LT(subspace_distance(hodge_filtration(t, 1), expect, kTol), kTol);
  CMatrix<double> pieces = hcat(*t.piece(Bidegree{{1, 1}, {0, 0}}), *t.piece(Bidegree{{1, 0}, {0, 1}}));
  EXPECT_LT(subspace_distance(hodge_filtration(t, 1), pieces, kTol), kTol);
  EXPECT_THROW(hodge_filtration(t, 3), InputError);
  EXPECT_THROW(hodge_filtration(t, 0), InputError);
  EXPECT_LT(subspace_distance(hodge_filtration(h1, 1), h1.pieces.at(Bidegree{{1}, {0}}), kTol), kTol);
}

TEST(Jacobian, EllipticIsDual) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto E = elliptic(random_tau(rng));
    auto J = plectic_jacobian(h1_structure(E), 1, kTol);
    auto iso = find_isomorphism(J, dual_torus(E), kTol);
    ASSERT_TRUE(iso);
    EXPECT_LT(iso->residual, kTol);
  }
}

TEST(Jacobian, DimensionIsHalfRank) {
  std::mt19937_64 rng(8);
  PHS t = h1_structure(elliptic(random_tau(rng)));
  for (int k = 1; k < 3; ++k) t = tensor(t, h1_structure(elliptic(random_tau(rng))));
  for (std::size_t j = 1; j <= 3; ++j) EXPECT_EQ(plectic_jacobian(t, j, kTol).g, 4u);
}

TEST(Jacobian, ProductFormula) {
  std::mt19937_64 rng(9);
  auto E1 = elliptic(random_tau(rng)), E2 = elliptic(random_tau(rng));
  auto t = tensor(h1_structure(E1), h1_structure(E2));
  // J(h, 1) ≅ E1^∨ ⊗ H^1(E2, Z): periods kron(Π(E1^∨), I_2).
  ComplexTorus<double> closed1(kron(dual_torus(E1).periods, CMatrix<double>::identity(2)));
  auto iso1 = find_isomorphism(plectic_jacobian(t, 1, kTol), closed1, kTol);
  ASSERT_TRUE(iso1);
  EXPECT_LT(iso1->residual, kTol);
  ComplexTorus<double> closed2(kron(CMatrix<double>::identity(2), dual_torus(E2).periods));
  auto iso2 = find_isomorphism(plectic_jacobian(t, 2, kTol), closed2, kTol);
  ASSERT_TRUE(iso2);
  EXPECT_LT(iso2->residual, kTol);
}

TEST(Morphism, IdentityScalarAndSwap) {
  auto h = h1_structure(elliptic(C(0, 1)));
  EXPECT_TRUE(check_morphism(IntMatrix::identity(2), h, h, kTol));
  EXPECT_TRUE(check_morphism(IntMatrix::identity(2) * BigInt(3), h, h, kTol));
  // Complex conjugation on the square lattice exchanges H^{1,0} and H^{0,1}.
  EXPECT_FALSE(check_morphism(int_matrix({{1, 0}, {0, -1}}), h, h, kTol));
  EXPECT_THROW(check_morphism(IntMatrix::identity(3), h, h, kTol), DimensionError);
}

TEST(Morphism, Composition) {
  auto h = h1_structure(elliptic(C(0, 1)));
  IntMatrix rot = int_matrix({{0, -1}, {1, 0}});  // multiplication by i on H^1 of Z[i]
  ASSERT_TRUE(check_morphism(rot, h, h, kTol));
  IntMatrix f = IntMatrix::identity(2) * BigInt(2) + rot;
  ASSERT_TRUE(check_morphism(f, h, h, kTol));
  EXPECT_TRUE(check_morphism(IntMatrix(rot * f), h, h, kTol));
}

TEST(Orthogonality, SymplecticAndProduct) {
  std::mt19937_64 rng(10);
  IntMatrix J = int_matrix({{0, 1}, {-1, 0}});
  auto h1 = h1_structure(elliptic(random_tau(rng))), h2 = h1_structure(elliptic(random_tau(rng)));
  EXPECT_TRUE(orthogonality_check(h1, J, kTol));
  EXPECT_TRUE(orthogonality_check(tensor(h1, h2), kron(J, J), kTol));
  auto rep = orthogonality_report(h1, int_matrix({{2, 1}, {1, 1}}), kTol);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_defect, 0.1);
  EXPECT_THROW(orthogonality_check(h1, int_matrix({{2, 0}, {0, 1}}), kTol), InputError);
}

TEST(Torus, SquareSelfDualAndBiduality) {
  auto sq = elliptic(C(0, 1));
  auto d = dual_torus(sq);
  EXPECT_LT(std::abs(d.periods(0, 0) - C(0, 1)), 1e-12);
  EXPECT_LT(std::abs(d.periods(0, 1) - C(-1, 0)), 1e-12);
  auto iso = find_isomorphism(sq, d, kTol);
  ASSERT_TRUE(iso);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix<double> P(2, 4);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 4; ++j) P(i, j) = C(nd(rng), nd(rng));
    ComplexTorus<double> t(P);
    auto dd = dual_torus(dual_torus(t));
    auto chk = isomorphism_residual(t, dd, CMatrix<double>::identity(2) * C(-1, 0));
    EXPECT_TRUE(chk.unimodular);
    EXPECT_LT(chk.residual, kTol);
  }
}

TEST(Torus, ProductOfDuals) {
  auto a = elliptic(C(0.3, 1.2)), b = elliptic(C(-0.1, 0.9));
  auto lhs = dual_torus(product_torus(a, b));
  auto rhs = product_torus(dual_torus(a), dual_torus(b));
  auto chk = isomorphism_residual(lhs, rhs, CMatrix<double>::identity(2));
  EXPECT_TRUE(chk.unimodular);
  EXPECT_LT(chk.residual, kTol);
}
