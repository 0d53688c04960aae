#pragma once

// Orders in totally real number fields given by an integral basis and
// multiplication table, their real embeddings, and fractional ideals.

#include "plectic/lattice.hpp"

#include <algorithm>

namespace plectic {

using Poly = std::vector<BigInt>;  // ascending coefficients

/// An order with Z-basis b_0 = 1, b_1, ..., b_{d-1}. The primitive element
/// is b_1 (or 1 when d = 1); min_poly is its minimal polynomial.
struct FieldOrder {
  std::size_t degree = 1;
  Poly min_poly{BigInt(-1), BigInt(1)};
  // mult_table[i][j][k]: coefficient of b_k in b_i * b_j.
  std::vector<std::vector<std::vector<BigInt>>> mult_table{{{BigInt(1)}}};
  bool is_maximal = true;
  // Quadratic bookkeeping: the order is Z[f ω] inside Q(√D).
  long long radicand = 0;
  long long conductor = 1;

  /// Matrix of multiplication by b_k on basis coordinates (columns are images).
  IntMatrix regular(std::size_t k) const {
    IntMatrix R(degree, degree);
    for (std::size_t j = 0; j < degree; ++j)
      for (std::size_t l = 0; l < degree; ++l) R(l, j) = mult_table[k][j][l];
    return R;
  }

  RatMatrix regular_of(const std::vector<BigRational>& x) const {
    RatMatrix R(degree, degree);
    for (std::size_t k = 0; k < degree; ++k)
      if (x[k] != 0) R += to_rational(regular(k)) * x[k];
    return R;
  }

  std::vector<BigRational> multiply(const std::vector<BigRational>& x, const std::vector<BigRational>& y) const {
    std::vector<BigRational> r(degree, BigRational(0));
    for (std::size_t i = 0; i < degree; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < degree; ++j) {
        if (y[j] == 0) continue;
        for (std::size_t k = 0; k < degree; ++k) r[k] += x[i] * y[j] * BigRational(mult_table[i][j][k]);
      }
    }
    return r;
  }

  std::vector<BigRational> one() const {
    std::vector<BigRational> e(degree, BigRational(0));
    e[0] = 1;
    return e;
  }
};

inline FieldOrder rational_field() { return FieldOrder{}; }

inline bool is_squarefree(long long n) {
  if (n < 2) return false;
  for (long long p = 2; p * p <= n; ++p)
    if (n % (p * p) == 0) return false;
  return true;
}

/// Z[f ω] in Q(√D), ω = (1 + √D)/2 when D ≡ 1 mod 4, else ω = √D.
inline FieldOrder quadratic_order(long long D, long long f = 1) {
  if (!is_squarefree(D)) throw InputError("quadratic radicand must be a squarefree integer > 1 (totally real)");
  if (f < 1) throw InputError("conductor must be positive");
  // ω^2 = c0 + c1 ω
  long long c0 = (D % 4 == 1) ? (D - 1) / 4 : D;
  long long c1 = (D % 4 == 1) ? 1 : 0;
  // (f ω)^2 = f^2 c0 + f c1 (f ω)
  BigInt e0 = BigInt(f) * f * c0, e1 = BigInt(f) * c1;
  FieldOrder o;
  o.degree = 2;
  o.min_poly = {BigInt(-e0), BigInt(-e1), BigInt(1)};
  o.mult_table = {{{BigInt(1), BigInt(0)}, {BigInt(0), BigInt(1)}}, {{BigInt(0), BigInt(1)}, {e0, e1}}};
  o.is_maximal = (f == 1);
  o.radicand = D;
  o.conductor = f;
  return o;
}

inline FieldOrder quadratic_field(long long D) { return quadratic_order(D, 1); }

/// The order Z[θ] for θ a root of the monic integer polynomial p.
inline FieldOrder monogenic_order(const Poly& p) {
  const std::size_t d = p.size() - 1;
  if (d < 1 || p.back() != 1) throw InputError("min_poly must be monic of degree >= 1");
  FieldOrder o;
  o.degree = d;
  o.min_poly = p;
  o.is_maximal = (d == 1);
  // θ^k for k < 2d - 1 in the power basis.
  std::vector<std::vector<BigInt>> pw(2 * d - 1, std::vector<BigInt>(d, BigInt(0)));
  for (std::size_t k = 0; k < 2 * d - 1; ++k) {
    if (k < d) {
      pw[k][k] = 1;
      continue;
    }
    // θ^k = θ * θ^{k-1}
    const auto& prev = pw[k - 1];
    std::vector<BigInt> cur(d, BigInt(0));
    for (std::size_t i = 0; i + 1 < d; ++i) cur[i + 1] = prev[i];
    for (std::size_t i = 0; i < d; ++i) cur[i] -= prev[d - 1] * p[i];
    pw[k] = cur;
  }
  o.mult_table.assign(d, std::vector<std::vector<BigInt>>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) o.mult_table[i][j] = pw[i + j];
  if (d == 1) {
    o.min_poly = {BigInt(-1), BigInt(1)};
    o.mult_table = {{{BigInt(1)}}};
  }
  return o;
}

/// Checks b_0 = 1, commutativity and associativity of the table exactly.
inline void validate_order(const FieldOrder& o) {
  const std::size_t d = o.degree;
  if (o.mult_table.size() != d) throw InputError("mult_table has wrong size");
  for (const auto& a : o.mult_table) {
    if (a.size() != d) throw InputError("mult_table has wrong size");
    for (const auto& b : a)
      if (b.size() != d) throw InputError("mult_table has wrong size");
  }
  if (o.min_poly.size() != d + 1 || o.min_poly.back() != 1) throw InputError("min_poly must be monic of the field degree");
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      if (o.mult_table[0][j][k] != (j == k ? 1 : 0)) throw InputError("basis element b_0 must be 1");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (o.mult_table[i][j] != o.mult_table[j][i]) throw InputError("mult_table is not commutative");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (o.regular(i) * o.regular(j) != o.regular(j) * o.regular(i))
        throw InputError("mult_table is not associative");
  // min_poly(b_1) = 0
  if (d >= 2) {
    IntMatrix R = o.regular(1), acc(d, d);
    IntMatrix pw = IntMatrix::identity(d);
    for (std::size_t k = 0; k <= d; ++k) {
      acc += pw * o.min_poly[k];
      pw = pw * R;
    }
    if (!is_zero(acc)) throw InputError("min_poly does not annihilate the primitive element b_1");
  }
}

// ---------------------------------------------------------------------------
// Polynomials

inline Poly poly_trim(Poly p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  return p;
}

inline std::vector<BigRational> poly_rem(std::vector<BigRational> a, const std::vector<BigRational>& b) {
  while (!a.empty() && a.size() >= b.size()) {
    BigRational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  if (a.empty()) a.push_back(0);
  return a;
}

inline int sign_of(const BigRational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

inline BigRational poly_eval(const std::vector<BigRational>& p, const BigRational& x) {
  BigRational r = 0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

namespace detail {

inline std::vector<std::vector<BigRational>> sturm_sequence(const Poly& p) {
  std::vector<std::vector<BigRational>> seq;
  std::vector<BigRational> p0(p.begin(), p.end()), p1;
  for (std::size_t i = 1; i < p.size(); ++i) p1.push_back(BigRational(p[i]) * BigRational(static_cast<long long>(i)));
  seq.push_back(p0);
  if (p1.empty()) return seq;
  seq.push_back(p1);
  while (seq.back().size() > 1) {
    auto r = poly_rem(seq[seq.size() - 2], seq.back());
    for (auto& c : r) c = -c;
    if (r.size() == 1 && r[0] == 0) break;
    seq.push_back(r);
  }
  return seq;
}

inline int sturm_variations(const std::vector<std::vector<BigRational>>& seq, const BigRational& x) {
  int changes = 0, last = 0;
  for (const auto& q : seq) {
    int s = sign_of(poly_eval(q, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace detail

/// Number of distinct real roots of p via a Sturm sequence (exact).
inline std::size_t count_real_roots(const Poly& pin) {
  Poly p = poly_trim(pin);
  if (p.size() <= 1) return 0;
  auto seq = detail::sturm_sequence(p);
  auto variations = [&](bool minus_infinity) {
    int changes = 0, last = 0;
    for (const auto& q : seq) {
      int s = sign_of(q.back());
      if (minus_infinity && (q.size() - 1) % 2 == 1) s = -s;
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  };
  return static_cast<std::size_t>(variations(true) - variations(false));
}

/// True iff p is squarefree with all roots real.
inline bool is_totally_real(const Poly& p) { return count_real_roots(p) == poly_trim(p).size() - 1; }

/// Irreducibility over Q, implemented for degree <= 3 (no rational root).
inline bool is_irreducible_small(const Poly& pin) {
  Poly p = poly_trim(pin);
  const std::size_t d = p.size() - 1;
  if (d == 0) return false;
  if (d == 1) return true;
  if (d > 3) throw InputError("irreducibility test implemented for degree <= 3 only");
  // Monic integer polynomial: rational roots are integer divisors of p[0].
  BigInt c = abs_int(p[0]);
  if (c == 0) return false;
  std::vector<BigRational> pr(p.begin(), p.end());
  for (BigInt k = 1; k * k <= c; ++k) {
    if (c % k != 0) continue;
    for (BigInt r : {k, BigInt(c / k)})
      for (int s : {1, -1})
        if (poly_eval(pr, BigRational(r * s)) == 0) return false;
  }
  return true;
}


/// Real roots of a totally real squarefree integer polynomial, ascending.
template <class Real>
std::vector<Real> real_roots(const Poly& pin) {
  Poly p = poly_trim(pin);
  const std::size_t d = p.size() - 1;
  if (!is_totally_real(p)) throw InputError("polynomial is not totally real");
  std::vector<BigRational> pr(p.begin(), p.end());
  BigRational bound = 0;
  for (std::size_t i = 0; i < d; ++i) {
    BigRational r = BigRational(abs_int(p[i])) / BigRational(abs_int(p[d]));
    if (r > bound) bound = r;
  }
  bound += 1;
  auto seq = detail::sturm_sequence(p);
  // Isolating intervals (a, b], each containing exactly one root.
  std::vector<std::pair<BigRational, BigRational>> intervals;
  std::vector<std::pair<BigRational, BigRational>> todo{{-bound, bound}};
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    int cnt = detail::sturm_variations(seq, a) - detail::sturm_variations(seq, b);
    if (cnt == 0) continue;
    if (cnt == 1) {
      intervals.push_back({a, b});
      continue;
    }
    BigRational m = (a + b) / 2;
    todo.push_back({a, m});
    todo.push_back({m, b});
  }
  auto f = [&](const Real& x) {
    Real r(0);
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + to_real<Real>(p[i]);
    return r;
  };
  std::vector<Real> roots;
  for (const auto& [a, b] : intervals) {
    if (poly_eval(pr, b) == 0) {
      roots.push_back(to_real<Real>(b));
      continue;
    }
    // Narrow exactly until the endpoints have opposite signs, then bisect in Real.
    BigRational lo = a, hi = b;
    while (sign_of(poly_eval(pr, lo)) * sign_of(poly_eval(pr, hi)) >= 0) {
      BigRational m = (lo + hi) / 2;
      if (poly_eval(pr, m) == 0) {
        lo = hi = m;
        break;
      }
      if (detail::sturm_variations(seq, lo) - detail::sturm_variations(seq, m) == 1)
        hi = m;
      else
        lo = m;
    }
    Real rl = to_real<Real>(lo), rh = to_real<Real>(hi);
    if (lo != hi) {
      Real fl = f(rl);
      for (int it = 0; it < 4000; ++it) {
        Real mid = (rl + rh) / Real(2);
        if (mid == rl || mid == rh) break;
        Real fm = f(mid);
        if (fm == Real(0)) {
          rl = rh = mid;
          break;
        }
        if ((fm < Real(0)) == (fl < Real(0))) {
          rl = mid;
          fl = fm;
        } else {
          rh = mid;
        }
      }
    }
    roots.push_back((rl + rh) / Real(2));
  }
  std::sort(roots.begin(), roots.end());
  if (roots.size() != d) throw NumericalError("root isolation found the wrong number of roots");
  return roots;
}

/// σ_k(b_i) for the d real embeddings (ascending root of min_poly): result
/// is d x d with row k = embedding k, column i = basis element i.
template <class Real>
RMatrix<Real> embedding_matrix(const FieldOrder& o) {
  const std::size_t d = o.degree;
  RMatrix<Real> E(d, d);
  if (d == 1) {
    E(0, 0) = Real(1);
    return E;
  }
  auto roots = real_roots<Real>(o.min_poly);
  // Powers of θ = b_1 in basis coordinates: columns of Pw.
  RatMatrix Pw(d, d);
  std::vector<BigRational> cur = o.one(), theta(d, BigRational(0));
  theta[1] = 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) Pw(k, i) = cur[k];
    cur = o.multiply(cur, theta);
  }
  // b_i = Σ_j C(j, i) θ^j
  auto C = rational_inverse(Pw);
  if (!C) throw InputError("b_1 does not generate the field");
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) {
      Real v(0), pw(1);
      for (std::size_t j = 0; j < d; ++j) {
        v += to_real<Real>((*C)(j, i)) * pw;
        pw *= roots[k];
      }
      E(k, i) = v;
    }
  return E;
}

template <class Real>
std::vector<Real> embed(const RMatrix<Real>& E, const std::vector<BigRational>& x) {
  std::vector<Real> r(E.rows(), Real(0));
  for (std::size_t k = 0; k < E.rows(); ++k)
    for (std::size_t i = 0; i < E.cols(); ++i) r[k] += E(k, i) * to_real<Real>(x[i]);
  return r;
}

inline BigRational element_norm(const FieldOrder& o, const std::vector<BigRational>& x) {
  RatMatrix R = o.regular_of(x);
  // Exact determinant over Q by elimination.
  RatMatrix a = R;
  const std::size_t n = a.rows();
  BigRational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(p, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      BigRational f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

/// Galois conjugate in a quadratic order: ω ↦ trace(ω) - ω.
inline std::vector<BigRational> quadratic_conjugate(const FieldOrder& o, const std::vector<BigRational>& x) {
  if (o.degree != 2) throw InputError("conjugation implemented for quadratic fields only");
  BigInt tr = o.mult_table[1][1][1];  // b_1^2 = e0 + e1 b_1: trace of b_1 is e1
  return {x[0] + x[1] * BigRational(tr), -x[1]};
}

// ---------------------------------------------------------------------------
// Fractional ideals

struct FractionalIdealRep {
  FieldOrder order;
  RatMatrix basis;  // rows: Z-basis elements in integral-basis coordinates
};

namespace detail {

inline BigInt common_denominator(const RatMatrix& m) {
  BigInt den = 1;
  for (const auto& q : m.data()) {
    BigInt d = mp::denominator(q);
    den = den / gcd_of(den, d) * d;
  }
  return den;
}

/// Canonical Z-basis (HNF) of the Z-module generated by rational rows.
inline RatMatrix rational_row_basis(const RatMatrix& rows) {
  BigInt den = common_denominator(rows);
  IntMatrix I = rows.map<BigInt>([&](const BigRational& q) { return BigInt(mp::numerator(q * den)); });
  IntMatrix H = row_lattice_basis(I);
  return H.map<BigRational>([&](const BigInt& z) { return BigRational(z, den); });
}

}  // namespace detail

inline FractionalIdealRep ideal_from_generators(const FieldOrder& o, const std::vector<std::vector<BigRational>>& gens) {
  RatMatrix rows(gens.size() * o.degree, o.degree);
  std::size_t r = 0;
  for (const auto& g : gens) {
    if (g.size() != o.degree) throw DimensionError("ideal generator has wrong length");
    for (std::size_t j = 0; j < o.degree; ++j) {
      std::vector<BigRational> bj(o.degree, BigRational(0));
      bj[j] = 1;
      rows.set_row(r++, o.multiply(g, bj));
    }
  }
  RatMatrix B = detail::rational_row_basis(rows);
  if (B.rows() != o.degree) throw InputError("ideal generators do not span a full-rank ideal");
  return {o, B};
}

inline FractionalIdealRep unit_ideal(const FieldOrder& o) { return {o, RatMatrix::identity(o.degree)}; }

/// Validates that the basis spans an O-module of full rank.
inline void validate_ideal(const FractionalIdealRep& I) {
  const std::size_t d = I.order.degree;
  if (I.basis.rows() != d || I.basis.cols() != d) throw DimensionError("ideal basis must be d x d");
  if (rational_rank(I.basis) != d) throw InputError("ideal basis is not of full rank");
  auto inv = rational_inverse(I.basis);
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<BigRational> bk(d, BigRational(0));
    bk[k] = 1;
    for (std::size_t i = 0; i < d; ++i) {
      auto prod = I.order.multiply(bk, I.basis.row(i));
      auto c = row_times(prod, *inv);
      for (const auto& x : c)
        if (!is_integral(x)) throw InputError("ideal basis is not closed under multiplication by the order");
    }
  }
}

inline FractionalIdealRep ideal_multiply(const FractionalIdealRep& a, const FractionalIdealRep& b) {
  std::vector<std::vector<BigRational>> gens;
  for (std::size_t i = 0; i < a.basis.rows(); ++i)
    for (std::size_t j = 0; j < b.basis.rows(); ++j) gens.push_back(a.order.multiply(a.basis.row(i), b.basis.row(j)));
  return ideal_from_generators(a.order, gens);
}

inline FractionalIdealRep ideal_scale(const FractionalIdealRep& a, const std::vector<BigRational>& x) {
  std::vector<std::vector<BigRational>> gens;
  for (std::size_t i = 0; i < a.basis.rows(); ++i) gens.push_back(a.order.multiply(a.basis.row(i), x));
  return ideal_from_generators(a.order, gens);
}

inline FractionalIdealRep ideal_conjugate(const FractionalIdealRep& a) {
  std::vector<std::vector<BigRational>> gens;
  for (std::size_t i = 0; i < a.basis.rows(); ++i) gens.push_back(quadratic_conjugate(a.order, a.basis.row(i)));
  return ideal_from_generators(a.order, gens);
}

/// Index norm [O : I] for integral I, extended multiplicatively.
inline BigRational ideal_norm(const FractionalIdealRep& a) {
  RatMatrix m = a.basis;
  // |det| of the rational basis matrix.
  const std::size_t d = m.rows();
  BigRational det = 1;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    while (p < d && m(p, c) == 0) ++p;
    if (p == d) return 0;
    if (p != c)
      for (std::size_t j = 0; j < d; ++j) std::swap(m(c, j), m(p, j));
    det *= m(c, c);
    for (std::size_t i = c + 1; i < d; ++i) {
      BigRational f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < d; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det < 0 ? BigRational(-det) : det;
}

inline bool ideal_equal(const FractionalIdealRep& a, const FractionalIdealRep& b) {
  return detail::rational_row_basis(a.basis) == detail::rational_row_basis(b.basis);
}

/// Searches for a generator α of I with coordinates (in the HNF basis of I)
/// bounded by `bound`: I is principal iff some α ∈ I has |N(α)| = N(I).
inline std::optional<std::vector<BigRational>> principal_generator(const FractionalIdealRep& I, long long bound = 50) {
  const std::size_t d = I.order.degree;
  BigRational target = ideal_norm(I);
  RatMatrix B = detail::rational_row_basis(I.basis);
  std::vector<long long> c(d, -bound);
  // Order candidates by height so the first hit is small.
  for (long long h = 0; h <= bound; ++h) {
    std::fill(c.begin(), c.end(), -h);
    for (;;) {
      long long mx = 0;
      for (auto x : c) mx = std::max(mx, x < 0 ? -x : x);
      if (mx == h) {
        std::vector<BigRational> alpha(d, BigRational(0));
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t k = 0; k < d; ++k) alpha[k] += BigRational(c[i]) * B(i, k);
        BigRational nm = element_norm(I.order, alpha);
        if (nm < 0) nm = -nm;
        if (nm == target && nm != 0) return alpha;
      }
      std::size_t i = 0;
      while (i < d && c[i] == h) c[i++] = -h;
      if (i == d) break;
      ++c[i];
    }
  }
  return std::nullopt;
}

inline bool is_principal(const FractionalIdealRep& I, long long bound = 50) {
  return principal_generator(I, bound).has_value();
}

/// Same ideal class (quadratic fields): A · conj(B) is principal.
inline bool same_ideal_class(const FractionalIdealRep& a, const FractionalIdealRep& b, long long bound = 50) {
  return is_principal(ideal_multiply(a, ideal_conjugate(b)), bound);
}

}  // namespace plectic
