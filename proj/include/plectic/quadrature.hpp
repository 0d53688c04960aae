#pragma once

// Gauss–Legendre rules and straight-segment line integrals in C.

#include "plectic/numeric.hpp"

#include <functional>
#include <vector>

namespace plectic {

template <class Real>
struct QuadratureRule {
  std::vector<Real> nodes;    // on [-1, 1]
  std::vector<Real> weights;
};

/// Newton iteration on P_n from the Chebyshev guesses.
template <class Real>
QuadratureRule<Real> gauss_legendre(std::size_t n) {
  if (n == 0) throw InputError("quadrature needs at least one node");
  using std::abs;
  using std::cos;
  QuadratureRule<Real> q;
  q.nodes.assign(n, Real(0));
  q.weights.assign(n, Real(0));
  const Real eps = machine_epsilon<Real>() * Real(8);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    Real x = cos(pi<Real>() * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real dp(0);
    for (int it = 0; it < 100; ++it) {
      Real p0(1), p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        Real p2 = ((Real(2 * k - 1)) * x * p1 - Real(k - 1) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
      }
      dp = Real(n) * (x * p1 - p0) / (x * x - Real(1));
      Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= eps) break;
    }
    Real p0(1), p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      Real p2 = ((Real(2 * k - 1)) * x * p1 - Real(k - 1) * p0) / Real(k);
      p0 = p1;
      p1 = p2;
    }
    dp = Real(n) * (x * p1 - p0) / (x * x - Real(1));
    const Real w = Real(2) / ((Real(1) - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = q.weights[n - 1 - i] = w;
  }
  return q;
}

/// ∫ f(z) dz (or dz̄ when bar) along the straight segment from y to x.
template <class Real>
Complex<Real> segment_integral(const std::function<Complex<Real>(Complex<Real>)>& f, Complex<Real> y, Complex<Real> x,
                               bool bar, const QuadratureRule<Real>& rule) {
  const Complex<Real> half = (x - y) / Real(2), mid = (x + y) / Real(2);
  Complex<Real> s(0);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + rule.nodes[k] * half);
  return s * (bar ? std::conj(half) : half);
}

}  // namespace plectic
