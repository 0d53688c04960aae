#pragma once

// Scalar types, precision configuration and the error types shared by every
// module.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace plectic {

namespace mp = boost::multiprecision;

using BigInt = mp::number<mp::gmp_int, mp::et_off>;
using BigRational = mp::number<mp::gmp_rational, mp::et_off>;

/// Runtime-precision binary floating point (precision set through
/// WorkingPrecision).
using MpReal = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

template <class Real>
using Complex = std::complex<Real>;

// ---------------------------------------------------------------------------
// Errors

/// Malformed or inconsistent input: wrong shapes, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shape mismatch between operands.
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// A numerical procedure could not produce a certified answer (degenerate
/// projection, failed decomposition, exhausted search).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Precision

inline constexpr unsigned kDefaultPrecisionBits = 128;

inline unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

/// Default tolerance 2^(-bits/2).
inline double default_tolerance(unsigned precision_bits) {
  return std::ldexp(1.0, -static_cast<int>(precision_bits / 2));
}

/// Sets the MPFR default precision for the lifetime of the object.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(unsigned bits)
      : saved_(MpReal::default_precision()) {
    MpReal::default_precision(bits_to_digits10(bits));
  }
  ~WorkingPrecision() { MpReal::default_precision(saved_); }
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

 private:
  unsigned saved_;
};

// ---------------------------------------------------------------------------
// Scalar traits: uniform handling of real and complex scalars.

template <class T>
struct ScalarTraits {
  using RealType = T;
  static constexpr bool is_complex = false;
  static T conj(const T& x) { return x; }
  static T abs2(const T& x) { return x * x; }
  static T real(const T& x) { return x; }
};

template <class R>
struct ScalarTraits<std::complex<R>> {
  using RealType = R;
  static constexpr bool is_complex = true;
  static std::complex<R> conj(const std::complex<R>& x) { return {x.real(), -x.imag()}; }
  static R abs2(const std::complex<R>& x) { return x.real() * x.real() + x.imag() * x.imag(); }
  static R real(const std::complex<R>& x) { return x.real(); }
};

template <class T>
using RealOf = typename ScalarTraits<T>::RealType;

template <class T>
T conj_of(const T& x) {
  return ScalarTraits<T>::conj(x);
}

template <class T>
RealOf<T> abs2_of(const T& x) {
  return ScalarTraits<T>::abs2(x);
}

template <class T>
RealOf<T> abs_of(const T& x) {
  using std::sqrt;
  return sqrt(abs2_of(x));
}

template <class Real>
Real machine_epsilon() {
  return std::numeric_limits<Real>::epsilon();
}

template <class Real>
Real pi() {
  return boost::math::constants::pi<Real>();
}

// ---------------------------------------------------------------------------
// Conversions between exact and floating scalars.

template <class Real>
Real to_real(const BigInt& z) {
  if constexpr (std::is_same_v<Real, double>) {
    return z.template convert_to<double>();
  } else if constexpr (std::is_same_v<Real, long double>) {
    return z.template convert_to<long double>();
  } else {
    return Real(z);
  }
}

template <class Real>
Real to_real(const BigRational& q) {
  return to_real<Real>(mp::numerator(q)) / to_real<Real>(mp::denominator(q));
}

template <class Real>
Real to_real(long long v) {
  return Real(v);
}

template <class Real>
BigInt round_to_bigint(const Real& x) {
  using std::round;
  if constexpr (std::is_floating_point_v<Real>) {
    if (!std::isfinite(x)) throw NumericalError("cannot round a non-finite value");
    return BigInt(static_cast<long double>(std::round(static_cast<long double>(x))));
  } else {
    return BigInt(mp::round(x));
  }
}

template <class Real>
long double to_long_double(const Real& x) {
  if constexpr (std::is_floating_point_v<Real>) {
    return static_cast<long double>(x);
  } else {
    return x.template convert_to<long double>();
  }
}

template <class Real>
Real floor_of(const Real& x) {
  using std::floor;
  return floor(x);
}

/// Decimal string carrying every digit of the working precision.
template <class Real>
std::string to_decimal_string(const Real& x) {
  std::ostringstream os;
  if constexpr (std::is_same_v<Real, double>) {
    os.precision(17);
  } else if constexpr (std::is_same_v<Real, long double>) {
    os.precision(21);
  } else {
    os.precision(static_cast<std::streamsize>(MpReal::default_precision()) + 2);
  }
  os << x;
  return os.str();
}

template <class Real>
Real parse_real(const std::string& s) {
  if constexpr (std::is_same_v<Real, double>) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw InputError("malformed real number: '" + s + "'");
    return v;
  } else if constexpr (std::is_same_v<Real, long double>) {
    return std::stold(s);
  } else {
    try {
      return Real(s);
    } catch (const std::exception&) {
      throw InputError("malformed real number: '" + s + "'");
    }
  }
}

}  // namespace plectic
