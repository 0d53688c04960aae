#include "plectic/real_multiplication.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace plectic;
using C = std::complex<double>;

namespace {

constexpr double kTol = 1e-9;

ComplexTorus<double> elliptic(C tau) { return ComplexTorus<double>(CMatrix<double>{{C(1, 0), tau}}); }

std::vector<BigRational> elt(long long a, long long b) { return {BigRational(a), BigRational(b)}; }

bool in_span(const std::vector<IntMatrix>& basis, const IntMatrix& N) {
  if (basis.empty()) return is_zero(N);
  const std::size_t sz = N.rows() * N.cols();
  IntMatrix A(sz, basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t e = 0; e < sz; ++e) A(e, k) = basis[k].data()[e];
  return integer_solve(A, N.data()).has_value();
}

std::vector<IntMatrix> rationals(const std::vector<Endomorphism<double>>& ends) {
  std::vector<IntMatrix> r;
  for (const auto& e : ends) r.push_back(e.rational);
  return r;
}

}  // namespace

TEST(NumberField, QuadraticBasics) {
  auto o = quadratic_field(5);
  validate_order(o);
  EXPECT_TRUE(is_totally_real(o.min_poly));
  auto E = embedding_matrix<double>(o);
  EXPECT_LT(E(0, 1), E(1, 1));
  EXPECT_NEAR(E(1, 1), (1 + std::sqrt(5.0)) / 2, 1e-14);
  EXPECT_NEAR(E(0, 1), (1 - std::sqrt(5.0)) / 2, 1e-14);
  EXPECT_EQ(element_norm(o, elt(0, 1)), BigRational(-1));
  EXPECT_FALSE(is_totally_real({BigInt(1), BigInt(0), BigInt(1)}));  // x^2 + 1
  EXPECT_TRUE(is_totally_real({BigInt(-2), BigInt(0), BigInt(1)}));
  EXPECT_FALSE(is_totally_real({BigInt(1), BigInt(-2), BigInt(1)}));  // (x-1)^2
  EXPECT_THROW(quadratic_field(4), InputError);
  EXPECT_THROW(quadratic_field(-1), InputError);
}

TEST(NumberField, CubicEmbeddings) {
  // x^3 - 3x + 1 is totally real with roots 2cos(2πk/9)-type values.
  Poly p{BigInt(1), BigInt(-3), BigInt(0), BigInt(1)};
  auto o = monogenic_order(p);
  validate_order(o);
  auto roots = real_roots<double>(p);
  ASSERT_EQ(roots.size(), 3u);
  for (double r : roots) EXPECT_NEAR(r * r * r - 3 * r + 1, 0.0, 1e-12);
  EXPECT_TRUE(std::is_sorted(roots.begin(), roots.end()));
  EXPECT_TRUE(is_irreducible_small(p));
  EXPECT_FALSE(is_irreducible_small({BigInt(-1), BigInt(0), BigInt(0), BigInt(1)}));
}

TEST(NumberField, PrincipalityInQSqrt10) {
  auto o = quadratic_field(10);
  auto I = ideal_from_generators(o, {elt(2, 0), elt(0, 1)});
  validate_ideal(I);
  EXPECT_EQ(ideal_norm(I), BigRational(2));
  EXPECT_FALSE(is_principal(I));
  EXPECT_TRUE(is_principal(ideal_multiply(I, I)));  // (2)
  EXPECT_TRUE(is_principal(ideal_from_generators(o, {elt(3, 1)})));
  EXPECT_TRUE(same_ideal_class(I, ideal_scale(I, elt(3, 1))));
  EXPECT_FALSE(same_ideal_class(I, unit_ideal(o)));
}

TEST(Endomorphisms, ContainsIdentity) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  CMatrix<double> P(2, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) P(i, j) = C(nd(rng), nd(rng));
  ComplexTorus<double> t(P);
  auto ends = endomorphisms(t, 5, kTol);
  ASSERT_EQ(ends.size(), 1u);  // generic: End = Z
  EXPECT_TRUE(in_span(rationals(ends), IntMatrix::identity(4)));
  // Exhaustive oracle at bound 5: only the scalars -5..5.
  std::array<C, 8> pi;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) pi[4 * i + j] = P(i, j);
  auto all = oracle::torus2_endomorphisms(pi, 5);
  EXPECT_EQ(all.size(), 11u);
  for (const auto& N : all) {
    IntMatrix M(4, 4);
    for (std::size_t e = 0; e < 16; ++e) M(e / 4, e % 4) = BigInt(N[e]);
    EXPECT_TRUE(in_span(rationals(ends), M));
  }
}

TEST(Endomorphisms, GaussianCurveMatchesExhaustiveOracle) {
  auto t = elliptic(C(0, 1));
  auto ends = endomorphisms(t, 3, kTol);
  ASSERT_EQ(ends.size(), 2u);
  auto basis = rationals(ends);
  auto found = oracle::elliptic_endomorphisms(C(0, 1), 3);
  std::size_t units_i = 0;
  for (const auto& [a, b, c, d] : found) {
    IntMatrix N = int_matrix({{a, b}, {c, d}});
    EXPECT_TRUE(in_span(basis, N));
    if (a == 0 && c == 1) ++units_i;  // multiplication by i
  }
  EXPECT_EQ(units_i, 1u);
  for (const auto& e : ends) EXPECT_LT(e.residual, kTol);
  // Closure under products within the bound.
  for (const auto& x : basis)
    for (const auto& y : basis) {
      IntMatrix p = x * y;
      if (max_abs(to_floating<double>(p)) <= 3) {
        EXPECT_TRUE(in_span(basis, p));
      }
    }
}

TEST(Endomorphisms, GenericEllipticOracle) {
  C tau(0.1234, 1.0731);
  auto ends = endomorphisms(elliptic(tau), 5, kTol);
  EXPECT_EQ(ends.size(), 1u);
  EXPECT_EQ(oracle::elliptic_endomorphisms(tau, 5).size(), 11u);  // scalars -5..5
}

TEST(RM, DetectRationalForEllipticCurves) {
  for (C tau : {C(0, 1), C(0.3, 1.7)}) {
    auto rm = detect_rm(elliptic(tau), 3, kTol);
    ASSERT_TRUE(rm);
    EXPECT_EQ(rm->field.degree, 1u);
  }
}

TEST(RM, ConstructSqrt2) {
  auto o = quadratic_field(2);
  auto rt = construct_rm_torus<double>(o, {C(0, 1), C(0, 1)}, unit_ideal(o));
  validate_rm_on_torus(rt.torus, rt.rm, kTol);
  EXPECT_EQ(rt.rm.action[1] * rt.rm.action[1], IntMatrix::identity(4) * BigInt(2));
  EXPECT_THROW(construct_rm_torus<double>(o, {C(0, 1), C(1, 0)}, unit_ideal(o)), InputError);
  FieldOrder bad = monogenic_order({BigInt(1), BigInt(0), BigInt(1)});  // x^2 + 1
  EXPECT_THROW(construct_rm_torus<double>(bad, {C(0, 1), C(0, 1)}, unit_ideal(bad)), InputError);
}

TEST(RM, ConstructEllipticCase) {
  auto rt = construct_rm_torus<double>(rational_field(), {C(0.2, 1.1)}, unit_ideal(rational_field()));
  EXPECT_LT(std::abs(rt.torus.periods(0, 0) - C(0.2, 1.1)), 1e-15);
  EXPECT_LT(std::abs(rt.torus.periods(0, 1) - C(1, 0)), 1e-15);
}

TEST(RM, DetectOnConstructedSqrt5Torus) {
  auto o = quadratic_field(5);
  auto rt = construct_rm_torus<double>(o, {C(0.31, 1.1), C(-0.45, 0.83)}, unit_ideal(o));
  auto rm = detect_rm(rt.torus, 3, kTol);
  ASSERT_TRUE(rm);
  EXPECT_EQ(rm->field.degree, 2u);
  EXPECT_EQ(rm->field.radicand, 5);
  EXPECT_TRUE(is_totally_real(rm->field.min_poly));
  validate_rm_on_torus(rt.torus, *rm, kTol);
}

TEST(RM, DetectOnCMTorusListsSqrt5) {
  // z = (i, 2i) has a large End, so several real quadratic fields act; the
  // non-totally-real elements (i itself) must never be reported.
  auto o = quadratic_field(5);
  auto rt = construct_rm_torus<double>(o, {C(0, 1), C(0, 2)}, unit_ideal(o));
  auto cands = detect_rm_candidates(rt.torus, 3, kTol);
  bool has5 = false;
  for (const auto& rm : cands) {
    EXPECT_TRUE(is_totally_real(rm.field.min_poly));
    validate_rm_on_torus(rt.torus, rm, kTol);
    if (rm.field.radicand == 5) has5 = true;
  }
  EXPECT_TRUE(has5);
  EXPECT_TRUE(std::is_sorted(cands.begin(), cands.end(),
                             [](const auto& a, const auto& b) { return a.field.radicand < b.field.radicand; }));
}

TEST(RM, EnlargeIndexThreeOrder) {
  auto o3 = quadratic_order(2, 3);  // Z[3√2]
  auto rt = construct_rm_torus<double>(o3, {C(0.1, 1.0), C(-0.2, 0.7)}, unit_ideal(o3));
  validate_rm_on_torus(rt.torus, rt.rm, kTol);
  auto en = enlarge_to_maximal(rt.torus, rt.rm);
  EXPECT_TRUE(en.rm.field.is_maximal);
  validate_rm_on_torus(en.torus, en.rm, kTol);
  EXPECT_EQ(en.order_index, 3);
  EXPECT_EQ(en.index, 9);
  // Λ ⊆ Λ' ⊆ (1/3)Λ: isogeny integral and 3 * isogeny^{-1} integral.
  auto inv = rational_inverse(to_rational(en.isogeny));
  ASSERT_TRUE(inv);
  for (const auto& q : inv->data()) EXPECT_TRUE(is_integral(q * BigRational(3)));
  // Old periods are integer combinations of the new ones.
  CMatrix<double> diff = rt.torus.periods - en.torus.periods * to_floating<C>(en.isogeny);
  EXPECT_LT(max_abs(diff), 1e-12);
  auto same = enlarge_to_maximal(en.torus, en.rm);
  EXPECT_EQ(same.isogeny, IntMatrix::identity(4));
}

TEST(RM, EnlargeRationalIsIdentity) {
  auto t = elliptic(C(0, 1));
  RMStructure rm{rational_field(), {IntMatrix::identity(2)}};
  auto en = enlarge_to_maximal(t, rm);
  EXPECT_EQ(en.isogeny, IntMatrix::identity(2));
}

TEST(Steinitz, FreeModule) {
  auto o = quadratic_field(5);
  auto rt = construct_rm_torus<double>(o, {C(0, 1), C(0, 2)}, unit_ideal(o));
  auto st = steinitz_decompose(rt.rm);
  EXPECT_TRUE(is_principal(st.ideal));
  EXPECT_TRUE(is_unimodular(st.iso));
  for (std::size_t k = 0; k < 2; ++k) {
    const IntMatrix& a = st.action_in_new_basis[k];
    EXPECT_EQ(a.block(0, 0, 2, 2), o.regular(k));
    EXPECT_TRUE(is_zero(a.block(0, 2, 2, 2)));
    EXPECT_TRUE(is_zero(a.block(2, 0, 2, 2)));
  }
}

TEST(Steinitz, NonPrincipalClassInQSqrt10) {
  auto o = quadratic_field(10);
  auto I = ideal_from_generators(o, {elt(2, 0), elt(0, 1)});
  auto rt = construct_rm_torus<double>(o, {C(0.3, 1.0), C(0.1, 2.0)}, I);
  auto st = steinitz_decompose(rt.rm);
  EXPECT_FALSE(is_principal(st.ideal));
  EXPECT_TRUE(same_ideal_class(st.ideal, I));
  // Regenerates Λ exactly: the new basis is unimodular and O_L-linear.
  EXPECT_TRUE(is_unimodular(st.iso));
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(st.iso * st.action_in_new_basis[k], rt.rm.action[k] * st.iso);
}

TEST(Steinitz, PrincipalIdealOverQSqrt2) {
  auto o = quadratic_field(2);
  auto I = ideal_from_generators(o, {elt(1, 1)});
  auto rt = construct_rm_torus<double>(o, {C(0, 1), C(0, 3)}, I);
  auto st = steinitz_decompose(rt.rm);
  EXPECT_TRUE(is_principal(st.ideal));
}

TEST(Steinitz, Errors) {
  auto o3 = quadratic_order(2, 3);
  auto rt = construct_rm_torus<double>(o3, {C(0, 1), C(0, 1)}, unit_ideal(o3));
  EXPECT_THROW(steinitz_decompose(rt.rm), InputError);
  RMStructure big{quadratic_field(2), {IntMatrix::identity(8), block_diag(rt.rm.action[1], rt.rm.action[1])}};
  // Not even a valid Z[√2]-action of the right rank: rank 8 != 4.
  EXPECT_THROW(steinitz_decompose(big), InputError);
}

TEST(Algebraize, RoundTripSqrt5) {
  auto o = quadratic_field(5);
  auto rt = construct_rm_torus<double>(o, {C(0, 1), C(0, 2)}, unit_ideal(o));
  auto alg = algebraize_rm(rt.torus, rt.rm, kTol);
  EXPECT_LT(alg.residual, 1e-9);
  for (const auto& z : alg.z) EXPECT_GT(z.imag(), 0);
  EXPECT_TRUE(is_unimodular(alg.lattice_map));
}

TEST(Algebraize, RandomRoundTripsSqrt2) {
  auto o = quadratic_field(2);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> re(-1, 1), im(0.3, 2);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BigRational> gen;
    do gen = elt(coef(rng), coef(rng));
    while (element_norm(o, gen) == 0);
    auto I = ideal_from_generators(o, {gen});
    auto rt = construct_rm_torus<double>(o, {C(re(rng), im(rng)), C(re(rng), im(rng))}, I);
    auto alg = algebraize_rm(rt.torus, rt.rm, kTol);
    EXPECT_LT(alg.residual, 1e-9);
    EXPECT_TRUE(is_principal(alg.ideal));
  }
}

TEST(Algebraize, NonPrincipalSqrt10) {
  auto o = quadratic_field(10);
  auto I = ideal_from_generators(o, {elt(2, 0), elt(0, 1)});
  auto rt = construct_rm_torus<double>(o, {C(0.3, 1.0), C(0.1, 2.0)}, I);
  auto alg = algebraize_rm(rt.torus, rt.rm, kTol);
  EXPECT_LT(alg.residual, 1e-9);
  EXPECT_TRUE(same_ideal_class(alg.ideal, I));
}

TEST(Algebraize, EllipticNormalForm) {
  C tau(2.3, 0.4);
  auto t = elliptic(tau);
  RMStructure rm{rational_field(), {IntMatrix::identity(2)}};
  auto alg = algebraize_rm(t, rm, kTol);
  auto [red, m] = reduce_upper_half_plane(tau);
  EXPECT_LT(std::abs(alg.z[0] - red), 1e-9);
  EXPECT_EQ(alg.ideal.basis, RatMatrix::identity(1));
  EXPECT_LT(alg.residual, 1e-9);
}

TEST(Algebraize, SignCorrectionExercised) {
  // z with one component in the lower half plane after the Steinitz
  // normalization forces a nontrivial x; the torus with negative-imaginary
  // second period is still a valid lattice.
  auto o = quadratic_field(5);
  CMatrix<double> P(2, 4);
  auto E = embedding_matrix<double>(o);
  C z0(0.2, 1.0), z1(0.4, -1.5);
  for (std::size_t s = 0; s < 2; ++s) {
    C z = s == 0 ? z0 : z1;
    for (std::size_t k = 0; k < 2; ++k) {
      P(s, k) = z * E(s, k);
      P(s, 2 + k) = E(s, k);
    }
  }
  ComplexTorus<double> t(P);
  RMStructure rm{o, {IntMatrix::identity(4), block_diag(o.regular(1), o.regular(1))}};
  auto alg = algebraize_rm(t, rm, kTol);
  EXPECT_LT(alg.residual, 1e-9);
  for (const auto& z : alg.z) EXPECT_GT(z.imag(), 0);
}

TEST(Certificate, EllipticAndMismatch) {
  auto t = elliptic(C(0.1, 1.3));
  auto h = refine_to_classical(h1_structure(t));
  auto cert = jacobian_is_abelian_certificate(h, RMStructure{rational_field(), {IntMatrix::identity(2)}}, kTol);
  EXPECT_EQ(cert.field.degree, 1u);
  EXPECT_LT(cert.residual, 1e-9);
  auto cert2 = jacobian_is_abelian_certificate<double>(h, std::nullopt, kTol);
  EXPECT_EQ(cert2.field.degree, 1u);
  EXPECT_THROW(jacobian_is_abelian_certificate(h, RMStructure{quadratic_field(2), {IntMatrix::identity(4), IntMatrix::identity(4)}}, kTol),
               InputError);
}

TEST(Reduce, FundamentalDomain) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(-5, 5), im(0.05, 3);
  for (int trial = 0; trial < 50; ++trial) {
    C tau(re(rng), im(rng));
    auto [red, m] = reduce_upper_half_plane(tau);
    EXPECT_LE(std::abs(red.real()), 0.5 + 1e-12);
    EXPECT_GE(std::abs(red), 1 - 1e-12);
    C direct = (m[0].convert_to<double>() * tau + m[1].convert_to<double>()) /
               (m[2].convert_to<double>() * tau + m[3].convert_to<double>());
    EXPECT_LT(std::abs(direct - red), 1e-9);
    EXPECT_EQ(m[0] * m[3] - m[1] * m[2], 1);
  }
}
