#include "plectic/shimura_model.hpp"

#include <gtest/gtest.h>

using namespace plectic;
using C = std::complex<double>;

namespace {

constexpr double kTol = 1e-9;

ComplexTorus<double> elliptic(C tau) { return ComplexTorus<double>(CMatrix<double>{{C(1, 0), tau}}); }

// Complex conjugation on H^1 of C/(Z + Z τ) for purely imaginary τ.
const IntMatrix kConj = int_matrix({{1, 0}, {0, -1}});

StronglyPrimitiveDatum<double> elliptic_datum(C tau) {
  StronglyPrimitiveDatum<double> d;
  d.r = 1;
  d.rank = 2;
  d.frobenii = {kConj};
  d.holo = elliptic(tau).periods.transpose();
  return d;
}

StronglyPrimitiveDatum<double> tensor_datum(C tau1, C tau2) {
  StronglyPrimitiveDatum<double> d;
  d.r = 2;
  d.rank = 4;
  d.frobenii = {kron(kConj, IntMatrix::identity(2)), kron(IntMatrix::identity(2), kConj)};
  d.holo = kron(elliptic(tau1).periods.transpose(), elliptic(tau2).periods.transpose());
  return d;
}

// H^1(A) ⊗ H^1(E) for an abelian surface A with RM by Q(√5) and purely
// imaginary z, so that conjugation is integral on H^1(A).
StronglyPrimitiveDatum<double> rm_datum() {
  auto o = quadratic_field(5);
  auto rt = construct_rm_torus<double>(o, {C(0, 1.3), C(0, 0.7)}, unit_ideal(o));
  IntMatrix cA = block_diag(IntMatrix(IntMatrix::identity(2) * BigInt(-1)), IntMatrix::identity(2));
  StronglyPrimitiveDatum<double> d;
  d.r = 2;
  d.rank = 8;
  d.frobenii = {kron(cA, IntMatrix::identity(2)), kron(IntMatrix::identity(4), kConj)};
  d.holo = kron(rt.torus.periods.transpose(), elliptic(C(0, 1)).periods.transpose());
  return d;
}

}  // namespace

TEST(Build, EllipticDatum) {
  auto h = build_plectic_from_frobenii(elliptic_datum(C(0, 1)), kTol);
  EXPECT_LT(piecewise_distance(h, h1_structure(elliptic(C(0, 1))), IntMatrix::identity(2), kTol), 1e-12);
  EXPECT_TRUE(is_effective_weight_one(h));
}

TEST(Build, TensorDatumEqualsTensorStructure) {
  auto d = tensor_datum(C(0, 1), C(0, 2));
  auto h = build_plectic_from_frobenii(d, kTol);
  auto ref = tensor(h1_structure(elliptic(C(0, 1))), h1_structure(elliptic(C(0, 2))));
  EXPECT_LT(piecewise_distance(h, ref, IntMatrix::identity(4), kTol), 1e-12);
  // Fr_∅ is the identity translate.
  EXPECT_EQ(frobenius_translate(d, {0, 0}), IntMatrix::identity(4));
  EXPECT_LT(max_abs(CMatrix<double>(*h.piece(Bidegree{{1, 1}, {0, 0}}) - d.holo)), 0.0 + 1e-15);
}

TEST(Build, FrobeniiPermutePieces) {
  auto d = tensor_datum(C(0, 1.5), C(0, 0.8));
  auto h = build_plectic_from_frobenii(d, kTol);
  for (std::size_t mu = 0; mu < 2; ++mu)
    for (const auto& [bd, m] : h.pieces) {
      Bidegree moved = bd;
      moved.beta[mu] ^= 1;
      moved.alpha[mu] ^= 1;
      CMatrix<double> img = to_floating<C>(d.frobenii[mu]) * m;
      EXPECT_LT(subspace_distance(img, *h.piece(moved), kTol), 1e-12);
    }
}

TEST(Build, Errors) {
  auto d = elliptic_datum(C(0, 1));
  d.frobenii = {int_matrix({{1, 1}, {0, -1}})};  // an involution with the wrong conjugation
  EXPECT_THROW(build_plectic_from_frobenii(d, kTol), InputError);
  d.frobenii = {int_matrix({{1, 1}, {0, 1}})};
  EXPECT_THROW(build_plectic_from_frobenii(d, kTol), InputError);  // not an involution
  auto t = tensor_datum(C(0, 1), C(0, 1));
  t.frobenii[1] = int_matrix({{0, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}});
  EXPECT_THROW(validate_datum(t, kTol), InputError);  // no longer commute
  // W fixed by Fr and real: translates coincide.
  StronglyPrimitiveDatum<double> bad;
  bad.r = 1;
  bad.rank = 2;
  bad.frobenii = {IntMatrix::identity(2)};
  bad.holo = CMatrix<double>{{C(1, 0)}, {C(0, 0)}};
  EXPECT_THROW(build_plectic_from_frobenii(bad, kTol), InputError);
  auto wrong = elliptic_datum(C(0, 1));
  wrong.rank = 4;
  EXPECT_THROW(validate_datum(wrong, kTol), DimensionError);
}

TEST(StronglyPrimitive, ZeroCupsIsIdentity) {
  auto h = build_plectic_from_frobenii(tensor_datum(C(0, 1), C(0, 2)), kTol);
  PlecticHodgeStructure<double> target;
  target.n = 2;
  target.lattice = Lattice::standard(1);
  target.pieces.emplace(Bidegree{{1, 1}, {1, 1}}, CMatrix<double>::identity(1));
  auto res = strongly_primitive(h, {CupOperator<double>{1, IntMatrix(1, 4), target}}, kTol);
  EXPECT_EQ(res.kernel.cols(), 4u);
  EXPECT_TRUE(is_unimodular(res.kernel));
  EXPECT_LT(piecewise_distance(res.structure, h, res.kernel, kTol), 1e-12);
  auto none = strongly_primitive(h, {}, kTol);
  EXPECT_EQ(none.structure.pieces.size(), h.pieces.size());
}

TEST(StronglyPrimitive, DropsPieceWithoutNu) {
  // Elliptic H^1 ⊕ an extra rank-1 piece at (0,0), which L_1 maps isomorphically
  // onto a (1,1) target.
  auto e = h1_structure(elliptic(C(0.2, 1.1)));
  PlecticHodgeStructure<double> h;
  h.n = 1;
  h.lattice = Lattice::standard(3);
  for (const auto& [bd, m] : e.pieces) h.pieces.emplace(bd, vcat(m, CMatrix<double>(1, m.cols())));
  CMatrix<double> extra(3, 1);
  extra(2, 0) = 1;
  h.pieces.emplace(Bidegree{{0}, {0}}, extra);
  ASSERT_TRUE(validate(h, kTol).pass);
  PlecticHodgeStructure<double> target;
  target.n = 1;
  target.lattice = Lattice::standard(1);
  target.pieces.emplace(Bidegree{{1}, {1}}, CMatrix<double>::identity(1));
  auto res = strongly_primitive(h, {CupOperator<double>{1, int_matrix({{0, 0, 1}}), target}}, kTol);
  EXPECT_EQ(res.kernel.cols(), 2u);
  EXPECT_EQ(res.structure.pieces.size(), 2u);
  EXPECT_EQ(res.structure.piece(Bidegree{{0}, {0}}), nullptr);
  EXPECT_TRUE(is_effective_weight_one(res.structure));
  EXPECT_LT(res.kernel_residual, kTol);
  // The kernel lattice is e1, e2 up to sign; the structure is the elliptic one.
  IntMatrix U(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) U(i, j) = res.kernel(i, j);
  EXPECT_TRUE(is_unimodular(U));
  EXPECT_LT(piecewise_distance(res.structure, e, U, kTol), 1e-12);
}

TEST(StronglyPrimitive, RejectsNonMorphism) {
  auto h = h1_structure(elliptic(C(0, 1)));
  PlecticHodgeStructure<double> target;
  target.n = 1;
  target.lattice = Lattice::standard(1);
  target.pieces.emplace(Bidegree{{1}, {1}}, CMatrix<double>::identity(1));
  EXPECT_THROW(strongly_primitive(h, {CupOperator<double>{1, int_matrix({{1, 0}}), target}}, kTol), InputError);
  EXPECT_THROW(strongly_primitive(h, {CupOperator<double>{2, int_matrix({{0, 0}}), target}}, kTol), InputError);
}

TEST(NuStructure, EllipticAndTensor) {
  auto c1 = nu_hodge_structure(elliptic_datum(C(0, 1)), 1, kTol);
  EXPECT_LT(subspace_distance(c1.pieces.at({1, 0}), CMatrix<double>(elliptic(C(0, 1)).periods.transpose()), kTol), 1e-12);

  auto d = tensor_datum(C(0, 1), C(0, 2));
  auto c = nu_hodge_structure(d, 1, kTol);
  const auto& F1 = c.pieces.at({1, 0});
  EXPECT_EQ(F1.cols() * 2, d.rank);
  CMatrix<double> expected = hcat(d.holo, CMatrix<double>(to_floating<C>(frobenius_translate(d, {0, 1})) * d.holo));
  EXPECT_LT(subspace_distance(F1, expected, kTol), 1e-12);
  auto h = tensor(h1_structure(elliptic(C(0, 1))), h1_structure(elliptic(C(0, 2))));
  EXPECT_LT(subspace_distance(F1, hodge_filtration(h, 1), kTol), 1e-12);
  // Fr_1 swaps β_1 and so moves F^{1_1} off itself.
  CMatrix<double> img = to_floating<C>(d.frobenii[0]) * F1;
  EXPECT_GT(projection_residual(F1, img, kTol), 0.5);
}

TEST(Characters, EllipticSingleTrivial) {
  auto pieces = character_decompose(elliptic_datum(C(0, 1)), 1, kTol);
  ASSERT_EQ(pieces.size(), 1u);
  EXPECT_TRUE(pieces[0].chi.empty());
  EXPECT_EQ(pieces[0].basis, IntMatrix::identity(2));
}

TEST(Characters, TensorTwoPiecesOfDimensionTwo) {
  auto d = tensor_datum(C(0, 1), C(0, 2));
  auto pieces = character_decompose(d, 1, kTol);
  ASSERT_EQ(pieces.size(), 2u);
  IntMatrix all(4, 0);
  for (const auto& p : pieces) {
    EXPECT_EQ(p.basis.cols(), 2u);
    // Fr_2-stable with eigenvalue χ_2(−1).
    EXPECT_EQ(d.frobenii[1] * p.basis, p.basis * BigInt(p.chi[0]));
    all = hcat(all, p.basis);
  }
  EXPECT_EQ(rational_rank(all), 4u);
}

TEST(Characters, DimensionFormulaFailure) {
  auto d = tensor_datum(C(0, 1), C(0, 2));
  d.frobenii[1] = IntMatrix::identity(4);
  EXPECT_THROW(character_decompose(d, 1, kTol), InputError);
}

TEST(QsvJacobian, EllipticIsDualCurve) {
  C tau(0, 1.7);
  auto res = plectic_jacobian_qsv(elliptic_datum(tau), 1, std::nullopt, kTol);
  auto iso = find_isomorphism(res.torus, dual_torus(elliptic(tau)), kTol);
  ASSERT_TRUE(iso);
  ASSERT_EQ(res.certificates.size(), 1u);
  ASSERT_TRUE(res.certificates[0].certificate) << res.certificates[0].note;
  const auto& cert = *res.certificates[0].certificate;
  EXPECT_EQ(cert.field.degree, 1u);
  EXPECT_LT(cert.residual, kTol);
  EXPECT_EQ(cert.ideal.basis, RatMatrix::identity(1));
  // The normal form τ' is SL2(Z)-equivalent to the dual curve's τ.
  auto dual = dual_torus(elliptic(tau));
  C dual_tau = dual.periods(0, 1) / dual.periods(0, 0);
  if (dual_tau.imag() < 0) dual_tau = std::conj(dual_tau) * C(-1);
  auto [red, m] = reduce_upper_half_plane(dual_tau);
  (void)m;
  EXPECT_LT(std::abs(cert.z[0] - red), 1e-9);
}

TEST(QsvJacobian, TensorProductFormula) {
  C t1(0, 1), t2(0, 2);
  auto res = plectic_jacobian_qsv(tensor_datum(t1, t2), 1, std::nullopt, kTol);
  ComplexTorus<double> closed(kron(dual_torus(elliptic(t1)).periods, CMatrix<double>::identity(2)));
  auto iso = find_isomorphism(res.torus, closed, kTol);
  ASSERT_TRUE(iso);
  EXPECT_LT(iso->residual, kTol);
  EXPECT_EQ(res.certificates.size(), 2u);
  for (const auto& c : res.certificates) EXPECT_TRUE(c.certificate) << c.note;
}

TEST(QsvJacobian, RealMultiplicationCertificates) {
  auto d = rm_datum();
  auto h = build_plectic_from_frobenii(d, kTol);
  EXPECT_TRUE(validate(h, kTol).pass);
  auto res = plectic_jacobian_qsv(d, 1, quadratic_field(5), kTol);
  ASSERT_EQ(res.certificates.size(), 2u);
  for (const auto& c : res.certificates) {
    ASSERT_TRUE(c.certificate) << c.note;
    EXPECT_EQ(c.certificate->field.radicand, 5);
    EXPECT_LT(c.certificate->residual, kTol);
  }
}
