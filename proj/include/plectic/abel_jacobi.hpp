#pragma once

// Plectic zero-cycles on products of elliptic curves X = Γ\C^n with
// Γ = ∏ Λ_j acting by translation, iterated line integrals of constant
// product forms, period lattices and the ν-th plectic Abel–Jacobi map.

#include "plectic/linalg.hpp"
#include "plectic/plectic_hodge.hpp"
#include "plectic/quadrature.hpp"

#include <cstdint>
#include <memory>
#include <random>

namespace plectic {

template <class Real>
struct QuotientDatum {
  std::vector<std::pair<Complex<Real>, Complex<Real>>> factors;  // generators (ω_1, ω_2) of each Λ_j
  std::size_t n() const { return factors.size(); }
};

template <class Real>
QuotientDatum<Real> make_quotient_datum(std::vector<std::pair<Complex<Real>, Complex<Real>>> factors, const Real& tol) {
  if (factors.empty()) throw InputError("need at least one factor");
  if (factors.size() > 16) throw InputError("at most 16 factors are supported");
  using std::abs;
  for (const auto& [w1, w2] : factors) {
    const Real det = (std::conj(w1) * w2).imag();
    if (!(abs(det) > tol * abs_of(w1) * abs_of(w2))) throw InputError("factor lattice is not of full rank");
  }
  return {std::move(factors)};
}

/// The ⊗-part H^1(E_1) ⊗ ... ⊗ H^1(E_n) of H^n(X).
template <class Real>
PlecticHodgeStructure<Real> target_structure(const QuotientDatum<Real>& d) {
  auto curve = [&](std::size_t j) {
    return h1_structure(ComplexTorus<Real>(CMatrix<Real>{{d.factors[j].first, d.factors[j].second}}));
  };
  auto h = curve(0);
  for (std::size_t j = 1; j < d.n(); ++j) h = tensor(h, curve(j));
  return h;
}

/// A constant form ∏_j dz_j or dz̄_j is a mask with bit j set for dz̄_j.
/// F^{1_ν} is spanned by the masks with bit ν-1 clear (ν is 1-based).
inline std::vector<std::uint32_t> f1_basis(std::size_t n, std::size_t nu) {
  if (nu == 0 || nu > n) throw InputError("nu must lie in 1..n");
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (std::uint32_t(1) << n); ++m)
    if (!((m >> (nu - 1)) & 1u)) out.push_back(m);
  return out;
}

/// Σ coeff ⊗_j ([x̃_j] − [ỹ_j]), stored on lifts.
template <class Real>
struct PlecticCycle {
  struct Term {
    long long coeff = 1;
    std::vector<std::pair<Complex<Real>, Complex<Real>>> lifts;  // (x̃_j, ỹ_j)
  };
  std::vector<Term> terms;
};

template <class Real>
void check_cycle(const QuotientDatum<Real>& d, const PlecticCycle<Real>& c) {
  for (const auto& t : c.terms)
    if (t.lifts.size() != d.n())
      throw DimensionError("cycle term has " + std::to_string(t.lifts.size()) + " factors, expected " +
                           std::to_string(d.n()));
}

/// Formal sum of cycles.
template <class Real>
PlecticCycle<Real> operator+(PlecticCycle<Real> a, const PlecticCycle<Real>& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

template <class Real>
Complex<Real> iterated_integral(const QuotientDatum<Real>& d, const PlecticCycle<Real>& c, std::uint32_t form) {
  check_cycle(d, c);
  Complex<Real> s(0);
  for (const auto& t : c.terms) {
    Complex<Real> p(Real(t.coeff));
    for (std::size_t j = 0; j < d.n(); ++j) {
      const Complex<Real> delta = t.lifts[j].first - t.lifts[j].second;
      p *= ((form >> j) & 1u) ? std::conj(delta) : delta;
    }
    s += p;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Nonconstant forms

/// Integrates one factor of a product form f_1(z_1) dz_1 ∧ ... along a path
/// from ỹ_j to x̃_j. generic() guards the locus where Γ acts freely.
template <class Real>
class FormProvider {
 public:
  virtual ~FormProvider() = default;
  virtual Complex<Real> integrate_factor(std::size_t j, Complex<Real> x, Complex<Real> y) const = 0;
  virtual bool generic(std::size_t, Complex<Real>) const { return true; }
};

/// ∏_j f_j(z_j) dz_j (or dz̄_j) on straight segments with Gauss–Legendre.
template <class Real>
class QuadratureFormProvider : public FormProvider<Real> {
 public:
  struct Factor {
    std::function<Complex<Real>(Complex<Real>)> f;
    bool bar = false;
  };
  explicit QuadratureFormProvider(std::vector<Factor> factors, std::size_t nodes = 64)
      : factors_(std::move(factors)), rule_(gauss_legendre<Real>(nodes)) {}

  Complex<Real> integrate_factor(std::size_t j, Complex<Real> x, Complex<Real> y) const override {
    return segment_integral(factors_.at(j).f, y, x, factors_[j].bar, rule_);
  }

 private:
  std::vector<Factor> factors_;
  QuadratureRule<Real> rule_;
};

template <class Real>
bool is_generic(const PlecticCycle<Real>& c, const FormProvider<Real>& p) {
  for (const auto& t : c.terms)
    for (std::size_t j = 0; j < t.lifts.size(); ++j)
      if (!p.generic(j, t.lifts[j].first) || !p.generic(j, t.lifts[j].second)) return false;
  return true;
}

template <class Real>
Complex<Real> iterated_integral(const QuotientDatum<Real>& d, const PlecticCycle<Real>& c, const FormProvider<Real>& p) {
  check_cycle(d, c);
  if (!is_generic(c, p)) throw InputError("cycle meets a point with nontrivial stabilizer");
  Complex<Real> s(0);
  for (const auto& t : c.terms) {
    Complex<Real> prod(Real(t.coeff));
    for (std::size_t j = 0; j < d.n(); ++j) prod *= p.integrate_factor(j, t.lifts[j].first, t.lifts[j].second);
    s += prod;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Period lattice and the Abel–Jacobi map

/// Functionals on F^{1_ν} realised in R^{2m} as (Re, Im) pairs per form.
template <class Real>
struct PeriodLattice {
  std::size_t nu = 0;
  std::vector<std::uint32_t> forms;
  CMatrix<Real> generators;  // m x 2^n, column k integrates over the loop product picked by the bits of k
  RMatrix<Real> basis;       // 2m x 2^n real form of generators
  RMatrix<Real> inverse;
};

template <class Real>
std::vector<Real> realify(const std::vector<Complex<Real>>& v) {
  std::vector<Real> out;
  out.reserve(2 * v.size());
  for (const auto& z : v) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
  return out;
}

template <class Real>
PeriodLattice<Real> period_lattice(const QuotientDatum<Real>& d, std::size_t nu, const Real& tol) {
  PeriodLattice<Real> L;
  L.nu = nu;
  L.forms = f1_basis(d.n(), nu);
  const std::size_t m = L.forms.size(), g = std::size_t(1) << d.n();
  L.generators = CMatrix<Real>(m, g);
  L.basis = RMatrix<Real>(2 * m, g);
  for (std::size_t k = 0; k < g; ++k)
    for (std::size_t f = 0; f < m; ++f) {
      Complex<Real> p(1);
      for (std::size_t j = 0; j < d.n(); ++j) {
        const auto mu = ((k >> j) & 1u) ? d.factors[j].second : d.factors[j].first;
        p *= ((L.forms[f] >> j) & 1u) ? std::conj(mu) : mu;
      }
      L.generators(f, k) = p;
      L.basis(2 * f, k) = p.real();
      L.basis(2 * f + 1, k) = p.imag();
    }
  if (rank(L.basis, tol) != g) throw InputError("period lattice is degenerate");
  L.inverse = inverse(L.basis);
  return L;
}

template <class Real>
std::vector<Real> lattice_coordinates(const PeriodLattice<Real>& L, const std::vector<Complex<Real>>& functional) {
  if (functional.size() != L.forms.size()) throw DimensionError("functional has the wrong number of coordinates");
  auto v = realify(functional);
  std::vector<Real> t(v.size(), Real(0));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t k = 0; k < v.size(); ++k) t[i] += L.inverse(i, k) * v[k];
  return t;
}

template <class Real>
std::vector<Complex<Real>> from_lattice_coordinates(const PeriodLattice<Real>& L, const std::vector<Real>& t) {
  std::vector<Complex<Real>> out(L.forms.size());
  for (std::size_t f = 0; f < out.size(); ++f)
    for (std::size_t k = 0; k < t.size(); ++k) out[f] += L.generators(f, k) * t[k];
  return out;
}

/// Euclidean distance in R^{2m} from the functional to the nearest lattice
/// point found by rounding lattice coordinates.
template <class Real>
Real lattice_distance(const PeriodLattice<Real>& L, const std::vector<Complex<Real>>& functional) {
  using std::round;
  auto t = lattice_coordinates(L, functional);
  for (auto& x : t) x = round(x);
  auto nearest = from_lattice_coordinates(L, t);
  Real s(0);
  for (std::size_t f = 0; f < nearest.size(); ++f) s += abs2_of(functional[f] - nearest[f]);
  using std::sqrt;
  return sqrt(s);
}

template <class Real>
struct AbelJacobiPoint {
  std::vector<Complex<Real>> functional;  // iterated integrals over the F^{1_ν} basis
  std::vector<Complex<Real>> reduced;     // representative with lattice coordinates in [0, 1)
  std::vector<Real> coordinates;          // lattice coordinates of the functional
};

template <class Real>
AbelJacobiPoint<Real> abel_jacobi(const QuotientDatum<Real>& d, const PlecticCycle<Real>& c, const PeriodLattice<Real>& L) {
  if (c.terms.empty()) throw InputError("abel_jacobi needs a nonempty cycle");
  AbelJacobiPoint<Real> p;
  for (auto f : L.forms) p.functional.push_back(iterated_integral(d, c, f));
  p.coordinates = lattice_coordinates(L, p.functional);
  std::vector<Real> frac = p.coordinates;
  for (auto& x : frac) x -= floor_of(x);
  p.reduced = from_lattice_coordinates(L, frac);
  return p;
}

template <class Real>
AbelJacobiPoint<Real> abel_jacobi(const QuotientDatum<Real>& d, const PlecticCycle<Real>& c, std::size_t nu, const Real& tol) {
  return abel_jacobi(d, c, period_lattice(d, nu, tol));
}

/// (x̃ − ỹ) reduced into the fundamental parallelogram of Z ω_1 + Z ω_2.
template <class Real>
Complex<Real> classical_aj(Complex<Real> w1, Complex<Real> w2, Complex<Real> x, Complex<Real> y) {
  const Complex<Real> v = x - y;
  const Real det = w1.real() * w2.imag() - w1.imag() * w2.real();
  if (det == Real(0)) throw InputError("lattice is degenerate");
  Real a = (v.real() * w2.imag() - v.imag() * w2.real()) / det;
  Real b = (w1.real() * v.imag() - w1.imag() * v.real()) / det;
  a -= floor_of(a);
  b -= floor_of(b);
  return a * w1 + b * w2;
}

/// |a − b| in C/Λ.
template <class Real>
Real torus_distance(Complex<Real> w1, Complex<Real> w2, Complex<Real> a, Complex<Real> b) {
  const Complex<Real> r = classical_aj(w1, w2, a, b);
  Real best = abs_of(r);
  for (int i = -1; i <= 0; ++i)
    for (int j = -1; j <= 0; ++j) {
      const Real v = abs_of(r + Real(i) * w1 + Real(j) * w2);
      if (v < best) best = v;
    }
  return best;
}

// ---------------------------------------------------------------------------
// Relifting and the harness

enum class ReliftMode { diagonal, factorwise };

inline const char* to_string(ReliftMode m) { return m == ReliftMode::diagonal ? "diagonal" : "factorwise"; }

inline ReliftMode parse_relift_mode(const std::string& s) {
  if (s == "diagonal") return ReliftMode::diagonal;
  if (s == "factorwise") return ReliftMode::factorwise;
  throw InputError("unknown relift mode '" + s + "'");
}

/// Lattice vectors are a ω_1 + b ω_2 with a, b uniform in [-3, 3].
/// diagonal: every term is translated by its own γ ∈ Γ in all factors.
/// factorwise: one endpoint x̃_j or ỹ_j of one term moves by a nonzero λ ∈ Λ_j.
template <class Real>
PlecticCycle<Real> relift(const PlecticCycle<Real>& c, const QuotientDatum<Real>& d, ReliftMode mode, std::uint64_t seed) {
  check_cycle(d, c);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  auto lattice_vector = [&](std::size_t j, bool nonzero) {
    int a, b;
    do {
      a = coef(rng);
      b = coef(rng);
    } while (nonzero && a == 0 && b == 0);
    return Real(a) * d.factors[j].first + Real(b) * d.factors[j].second;
  };
  PlecticCycle<Real> out = c;
  if (out.terms.empty()) return out;
  if (mode == ReliftMode::diagonal) {
    for (auto& t : out.terms)
      for (std::size_t j = 0; j < d.n(); ++j) {
        const auto g = lattice_vector(j, false);
        t.lifts[j].first += g;
        t.lifts[j].second += g;
      }
  } else {
    const std::size_t term = std::uniform_int_distribution<std::size_t>(0, out.terms.size() - 1)(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, d.n() - 1)(rng);
    const bool first = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
    const auto lambda = lattice_vector(j, true);
    (first ? out.terms[term].lifts[j].first : out.terms[term].lifts[j].second) += lambda;
  }
  return out;
}

template <class Real>
struct HarnessModeReport {
  ReliftMode mode = ReliftMode::diagonal;
  std::size_t trials = 0;
  Real max_residual = Real(0);
  std::size_t membership_failures = 0;
  std::vector<Real> residuals;  // distance of AJ(new) − AJ(old) to the period lattice, per trial
};

template <class Real>
struct HarnessReport {
  HarnessModeReport<Real> diagonal, factorwise;
};

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(trial), std::uint32_t(trial >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t(out[0]) << 32) | out[1];
}

/// Measures, never asserts. A trial counts as a membership failure when the
/// difference functional lies farther than membership_tol from the lattice.
template <class Real>
HarnessReport<Real> theorem_b_harness(const QuotientDatum<Real>& d, const PlecticCycle<Real>& c, std::size_t nu,
                                      std::size_t trials, std::uint64_t seed, const Real& tol,
                                      const Real& membership_tol) {
  if (trials == 0) throw InputError("harness needs at least one trial");
  const auto L = period_lattice(d, nu, tol);
  const auto base = abel_jacobi(d, c, L);
  HarnessReport<Real> rep;
  rep.diagonal.mode = ReliftMode::diagonal;
  rep.factorwise.mode = ReliftMode::factorwise;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t s = trial_seed(seed, t);
    for (auto* m : {&rep.diagonal, &rep.factorwise}) {
      const auto moved = abel_jacobi(d, relift(c, d, m->mode, s), L);
      std::vector<Complex<Real>> diff(base.functional.size());
      for (std::size_t f = 0; f < diff.size(); ++f) diff[f] = moved.functional[f] - base.functional[f];
      const Real r = lattice_distance(L, diff);
      m->residuals.push_back(r);
      if (r > m->max_residual) m->max_residual = r;
      if (!(r < membership_tol)) ++m->membership_failures;
      ++m->trials;
    }
  }
  return rep;
}

}  // namespace plectic
