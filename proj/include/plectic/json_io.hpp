#pragma once

// JSON encodings. Reals are written as decimal strings at full working
// precision and read from strings or numbers; integers that fit in 64 bits
// are plain numbers, larger ones strings.

#include "plectic/abel_jacobi.hpp"
#include "plectic/flat_hodge.hpp"
#include "plectic/shimura_model.hpp"

#include <json.hpp>

namespace plectic::io {

using json = nlohmann::json;

inline const char* kSchemaVersion = "1.0";

template <class Real>
json to_json(const Real& x) {
  return to_decimal_string(x);
}

template <class Real>
Real real_from(const json& j) {
  if (j.is_string()) return parse_real<Real>(j.get<std::string>());
  if (j.is_number_integer()) return Real(j.get<long long>());
  if (j.is_number()) return Real(j.get<double>());
  throw InputError("expected a real number, got " + j.dump());
}

template <class Real>
json complex_json(const Complex<Real>& z) {
  return json::array({to_decimal_string(z.real()), to_decimal_string(z.imag())});
}

template <class Real>
Complex<Real> complex_from(const json& j) {
  if (j.is_array() && j.size() == 2) return {real_from<Real>(j[0]), real_from<Real>(j[1])};
  return {real_from<Real>(j), Real(0)};
}

inline json int_json(const BigInt& z) {
  if (z >= BigInt(std::numeric_limits<long long>::min()) && z <= BigInt(std::numeric_limits<long long>::max()))
    return z.convert_to<long long>();
  return z.str();
}

inline BigInt int_from(const json& j) {
  if (j.is_number_integer()) return BigInt(j.get<long long>());
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw InputError("expected an integer, got " + j.dump());
}

inline json rational_json(const BigRational& q) {
  if (mp::denominator(q) == 1) return int_json(mp::numerator(q));
  return q.str();
}

inline BigRational rational_from(const json& j) {
  if (j.is_number_integer()) return BigRational(j.get<long long>());
  if (j.is_string()) {
    try {
      return BigRational(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw InputError("expected a rational number, got " + j.dump());
}

template <class T, class F>
json matrix_json(const Matrix<T>& m, F&& enc) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(enc(m(i, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T, class F>
Matrix<T> matrix_from(const json& j, F&& dec) {
  if (!j.is_array()) throw InputError("expected a matrix as an array of rows");
  const std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw DimensionError("matrix rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = dec(j[i][c]);
  }
  return m;
}

template <class Real>
json cmatrix_json(const CMatrix<Real>& m) {
  return matrix_json(m, [](const Complex<Real>& z) { return complex_json(z); });
}
template <class Real>
CMatrix<Real> cmatrix_from(const json& j) {
  return matrix_from<Complex<Real>>(j, [](const json& e) { return complex_from<Real>(e); });
}
inline json imatrix_json(const IntMatrix& m) { return matrix_json(m, int_json); }
inline IntMatrix imatrix_from(const json& j) { return matrix_from<BigInt>(j, int_from); }
inline json qmatrix_json(const RatMatrix& m) { return matrix_json(m, rational_json); }
inline RatMatrix qmatrix_from(const json& j) { return matrix_from<BigRational>(j, rational_from); }

template <class Real>
json cvector_json(const std::vector<Complex<Real>>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(complex_json(z));
  return a;
}
template <class Real>
std::vector<Complex<Real>> cvector_from(const json& j) {
  std::vector<Complex<Real>> v;
  for (const auto& e : j) v.push_back(complex_from<Real>(e));
  return v;
}
template <class Real>
json rvector_json(const std::vector<Real>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_decimal_string(x));
  return a;
}
template <class Real>
std::vector<Real> rvector_from(const json& j) {
  std::vector<Real> v;
  for (const auto& e : j) v.push_back(real_from<Real>(e));
  return v;
}
inline json qvector_json(const std::vector<BigRational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rational_json(x));
  return a;
}

// ---------------------------------------------------------------------------
// Hodge structures and tori

inline json bidegree_json(const Bidegree& b) { return {{"alpha", b.alpha}, {"beta", b.beta}}; }
inline Bidegree bidegree_from(const json& j) {
  return {j.at("alpha").get<std::vector<int>>(), j.at("beta").get<std::vector<int>>()};
}

template <class Real>
json phs_json(const PlecticHodgeStructure<Real>& h) {
  json pieces = json::array();
  for (const auto& [b, m] : h.pieces) {
    json p = bidegree_json(b);
    p["basis"] = cmatrix_json(m);
    pieces.push_back(std::move(p));
  }
  return {{"n", h.n}, {"lattice", imatrix_json(h.lattice.basis)}, {"pieces", pieces}};
}

/// "lattice" (rows of a basis) is optional and defaults to the standard
/// lattice of the piece dimension.
template <class Real>
PlecticHodgeStructure<Real> phs_from(const json& j) {
  PlecticHodgeStructure<Real> h;
  h.n = j.at("n").get<std::size_t>();
  for (const auto& p : j.at("pieces")) {
    auto b = bidegree_from(p);
    if (h.pieces.count(b)) throw InputError("duplicate piece " + b.str());
    h.pieces.emplace(b, cmatrix_from<Real>(p.at("basis")));
  }
  if (j.contains("lattice")) {
    h.lattice = Lattice::from_basis(imatrix_from(j["lattice"]));
  } else {
    if (h.pieces.empty()) throw InputError("structure without pieces needs an explicit lattice");
    h.lattice = Lattice::standard(h.pieces.begin()->second.rows());
  }
  check_piece_shapes(h);
  return h;
}

template <class Real>
json classical_json(const ClassicalHodgeStructure<Real>& h) {
  json pieces = json::array();
  for (const auto& [pq, m] : h.pieces) pieces.push_back({{"p", pq.first}, {"q", pq.second}, {"basis", cmatrix_json(m)}});
  return {{"lattice", imatrix_json(h.lattice.basis)}, {"pieces", pieces}};
}

template <class Real>
ComplexTorus<Real> torus_from(const json& j) {
  return ComplexTorus<Real>(cmatrix_from<Real>(j.at("periods")));
}

// ---------------------------------------------------------------------------
// Number fields and RM

inline json field_json(const FieldOrder& o) {
  json mp = json::array();
  for (const auto& c : o.min_poly) mp.push_back(int_json(c));
  json j = {{"degree", o.degree}, {"min_poly", mp}, {"is_maximal", o.is_maximal}};
  if (o.radicand != 0) {
    j["radicand"] = o.radicand;
    j["conductor"] = o.conductor;
  }
  return j;
}

/// {"radicand": D, "conductor": f} for Z[f ω] in Q(√D), or {"min_poly": [...]}
/// (ascending coefficients) for Z[θ], or {"degree": 1} for Z.
inline FieldOrder field_from(const json& j) {
  if (j.contains("radicand")) return quadratic_order(j["radicand"].get<long long>(), j.value("conductor", 1LL));
  if (j.contains("min_poly")) {
    Poly p;
    for (const auto& c : j["min_poly"]) p.push_back(int_from(c));
    return monogenic_order(p);
  }
  if (j.value("degree", 0) == 1) return rational_field();
  throw InputError("field needs a radicand, a min_poly or degree 1");
}

inline json ideal_json(const FractionalIdealRep& I) { return {{"basis", qmatrix_json(I.basis)}}; }

/// {"basis": rows} or {"generators": [[...], ...]} in integral-basis coordinates.
inline FractionalIdealRep ideal_from(const FieldOrder& o, const json& j) {
  if (j.contains("basis")) {
    FractionalIdealRep I{o, qmatrix_from(j["basis"])};
    validate_ideal(I);
    return I;
  }
  std::vector<std::vector<BigRational>> gens;
  for (const auto& g : j.at("generators")) {
    std::vector<BigRational> x;
    for (const auto& c : g) x.push_back(rational_from(c));
    gens.push_back(std::move(x));
  }
  return ideal_from_generators(o, gens);
}

inline json rm_json(const RMStructure& rm) {
  json action = json::array();
  for (const auto& a : rm.action) action.push_back(imatrix_json(a));
  return {{"field", field_json(rm.field)}, {"action", action}};
}

inline RMStructure rm_from(const json& j) {
  RMStructure rm;
  rm.field = field_from(j.at("field"));
  for (const auto& a : j.at("action")) rm.action.push_back(imatrix_from(a));
  validate_rm(rm);
  return rm;
}

// ---------------------------------------------------------------------------
// Shimura data

template <class Real>
StronglyPrimitiveDatum<Real> datum_from(const json& j) {
  StronglyPrimitiveDatum<Real> d;
  d.r = j.at("r").get<std::size_t>();
  for (const auto& f : j.at("frobenii")) d.frobenii.push_back(imatrix_from(f));
  d.holo = cmatrix_from<Real>(j.at("holo"));
  d.rank = j.value("rank", d.holo.rows());
  if (j.contains("hecke"))
    for (const auto& t : j["hecke"]) d.hecke.push_back(imatrix_from(t));
  return d;
}

template <class Real>
json datum_json(const StronglyPrimitiveDatum<Real>& d) {
  json fr = json::array(), he = json::array();
  for (const auto& f : d.frobenii) fr.push_back(imatrix_json(f));
  for (const auto& t : d.hecke) he.push_back(imatrix_json(t));
  return {{"r", d.r}, {"rank", d.rank}, {"frobenii", fr}, {"holo", cmatrix_json(d.holo)}, {"hecke", he}};
}

// ---------------------------------------------------------------------------
// Cycles

template <class Real>
json cycle_json(const PlecticCycle<Real>& c) {
  json terms = json::array();
  for (const auto& t : c.terms) {
    json lifts = json::array();
    for (const auto& [x, y] : t.lifts) lifts.push_back(json::array({complex_json(x), complex_json(y)}));
    terms.push_back({{"coeff", t.coeff}, {"lifts", lifts}});
  }
  return {{"terms", terms}};
}

template <class Real>
PlecticCycle<Real> cycle_from(const json& j) {
  PlecticCycle<Real> c;
  for (const auto& t : j.at("terms")) {
    typename PlecticCycle<Real>::Term term;
    term.coeff = t.value("coeff", 1LL);
    for (const auto& l : t.at("lifts")) {
      if (!l.is_array() || l.size() != 2) throw InputError("each factor lift is a pair [x, y]");
      term.lifts.emplace_back(complex_from<Real>(l[0]), complex_from<Real>(l[1]));
    }
    c.terms.push_back(std::move(term));
  }
  return c;
}

template <class Real>
std::vector<std::pair<Complex<Real>, Complex<Real>>> factors_from(const json& j) {
  std::vector<std::pair<Complex<Real>, Complex<Real>>> f;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw InputError("each factor is a pair of lattice generators");
    f.emplace_back(complex_from<Real>(p[0]), complex_from<Real>(p[1]));
  }
  return f;
}

template <class Real>
json harness_mode_json(const HarnessModeReport<Real>& m) {
  return {{"mode", to_string(m.mode)},
          {"trials", m.trials},
          {"max_residual", to_decimal_string(m.max_residual)},
          {"membership_failures", m.membership_failures}};
}

// ---------------------------------------------------------------------------
// Parsing with positions

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + source + " (byte " + std::to_string(e.byte) + "): " + e.what());
  }
}

}  // namespace plectic::io
