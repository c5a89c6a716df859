/**
 * @file laguerre.hpp
 * @brief Generalized Laguerre polynomials with negative parameter, their
 * complex zeros, and the saddle points obtained by scaling the zeros.
 */
#pragma once

#include "penner/precision.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace penner {

struct LaguerreSpec {
  int n = 1;
  Real alpha;
};

/// Zeros of L_n^(alpha) and the scaled points g * zeros.
struct ZeroSet {
  LaguerreSpec spec;
  std::vector<Complex> zeros;
  std::vector<Complex> scaled;
  Real g = 1;
  int iterations = 0;
};

namespace detail {

struct LaguerrePair {
  Complex value;
  Complex derivative;
};

// Degree recurrence for L and L' together:
//   (k+1) L_{k+1} = (2k+1+a-z) L_k - (k+a) L_{k-1}
//   (k+1) L'_{k+1} = (2k+1+a-z) L'_k - L_k - (k+a) L'_{k-1}
inline LaguerrePair laguerre_with_derivative(int n, const Real& alpha, const Complex& z) {
  Complex p0(1), p1 = Complex(1 + alpha) - z;
  Complex d0(0), d1(-1);
  if (n == 0) return {p0, d0};
  for (int k = 1; k < n; ++k) {
    Complex c = Complex(Real(2 * k + 1) + alpha) - z;
    Real b = Real(k) + alpha;
    Complex p2 = (c * p1 - b * p0) / Real(k + 1);
    Complex d2 = (c * d1 - p1 - b * d0) / Real(k + 1);
    p0 = std::move(p1);
    p1 = std::move(p2);
    d0 = std::move(d1);
    d1 = std::move(d2);
  }
  return {p1, d1};
}

/// Aberth starting points from the upper convex hull of (k, ln|c_k|), where
/// c_k = (-1)^k binom(n + alpha, n - k) / k! are the monomial coefficients:
/// each hull edge from i to j contributes j - i points on a circle of radius
/// (|c_i| / |c_j|)^(1/(j - i)).
inline std::vector<Complex> newton_polygon_start(int n, const Real& alpha) {
  std::vector<Real> c(static_cast<std::size_t>(n + 1));
  Real fact = 1;
  for (int k = 2; k <= n; ++k) fact *= k;
  c[static_cast<std::size_t>(n)] = 1 / fact;
  for (int k = n; k >= 1; --k)
    c[static_cast<std::size_t>(k - 1)] = -c[static_cast<std::size_t>(k)] * (alpha + k) * k / (n - k + 1);

  std::vector<int> hull;
  std::vector<Real> y(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) {
    const Real& ck = c[static_cast<std::size_t>(k)];
    if (ck == 0) continue;
    y[static_cast<std::size_t>(k)] = log(abs(ck));
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2], j = hull.back();
      const auto yi = y[static_cast<std::size_t>(i)], yj = y[static_cast<std::size_t>(j)];
      // drop j if it lies on or below the chord from i to k
      if ((yj - yi) * (k - i) <= (y[static_cast<std::size_t>(k)] - yi) * (j - i)) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }

  const Real two_pi = 2 * mp::pi();
  std::vector<Complex> z;
  z.reserve(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const int i = hull[e], j = hull[e + 1];
    const Real r = exp((y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)]) / (j - i));
    const Real offset = two_pi * Real(static_cast<int>(e)) / n + Real(0.4);
    for (int q = 0; q < j - i; ++q) {
      const Real theta = two_pi * (Real(q) + Real(0.25)) / (j - i) + offset;
      z.push_back(Complex(r * cos(theta), r * sin(theta)));
    }
  }
  return z;
}

}  // namespace detail

/// L_n^(alpha)(z) by the three-term degree recurrence.
inline Complex laguerre_eval(const LaguerreSpec& spec, const Complex& z) {
  if (spec.n < 0) throw Error(ErrorKind::DomainError, "laguerre_eval: negative degree");
  return detail::laguerre_with_derivative(spec.n, mp::working(spec.alpha),
                                          Complex(mp::working(z.re), mp::working(z.im)))
      .value;
}

/// True when alpha is an integer in [-n, -1]; L_n^(alpha) then has a multiple zero at 0.
inline bool laguerre_degenerate(const LaguerreSpec& spec, const PrecisionContext& ctx) {
  Real k = round(spec.alpha);
  if (k > -1 || k < -spec.n) return false;
  return abs(spec.alpha - k) <= ctx.pole_tolerance() * abs(k);
}

/// All n zeros of L_n^(alpha) by Aberth-Ehrlich iteration followed by Newton polishing.
///
/// Starting points lie on circles whose radii come from the Newton polygon of
/// the coefficients, which separates clusters such as the near-origin zeros
/// of a nearly degenerate parameter. The
/// recurrence loses roughly n/2 digits to cancellation near the zeros, so the
/// iteration runs with 0.6 n extra digits. On return every zero satisfies |L/L'| < 10^{-digits/2} max(1, |z|), and the
/// zeros are sorted by (real part, imaginary part).
inline ZeroSet laguerre_zeros(const LaguerreSpec& spec_in, const PrecisionContext& ctx) {
  ctx.validate();
  const int n = spec_in.n;
  if (n < 1 || n > 512) throw Error(ErrorKind::DomainError, "laguerre_zeros: need 1 <= n <= 512");
  ScopedPrecision guard(ctx.digits + 10 + (6 * n + 9) / 10);
  LaguerreSpec spec{n, mp::working(spec_in.alpha)};
  if (laguerre_degenerate(spec, ctx))
    throw Error(ErrorKind::Degenerate, "alpha = " + spec.alpha.str(20) + " is an integer in [-n, -1]");

  const Real& a = spec.alpha;
  ZeroSet out;
  out.spec = spec;
  if (n == 1) {
    out.zeros.push_back(Complex(1 + a));
    out.scaled = out.zeros;
    return out;
  }

  const std::vector<Complex> z0 = detail::newton_polygon_start(n, a);
  std::vector<Complex> z = z0;

  const Real stop = pow(Real(10), -(ctx.digits * 3 / 4));
  const int max_iter = 2000 + 20 * n;
  const Real certify = ctx.half_tolerance();
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  std::vector<Real> last_step(static_cast<std::size_t>(n), Real(-1));
  int it = 0;
  for (; it < max_iter; ++it) {
    int active = 0;
    for (int i = 0; i < n; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      if (done[static_cast<std::size_t>(i)]) continue;
      ++active;
      auto lp = detail::laguerre_with_derivative(n, a, zi);
      if (norm(lp.value) == 0) {
        done[static_cast<std::size_t>(i)] = true;
        continue;
      }
      Complex ratio = lp.value / lp.derivative;
      Complex s(0);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Complex diff = zi - z[static_cast<std::size_t>(j)];
        if (norm(diff) == 0) diff = Complex(Real(0), stop);
        s += Complex(1) / diff;
      }
      Complex w = ratio / (Complex(1) - ratio * s);
      zi -= w;
      // converged, or stalled at rounding level below the certification bound
      const Real step = abs(w) / std::max(Real(1), abs(zi));
      Real& prev = last_step[static_cast<std::size_t>(i)];
      if (step < stop || (step < certify && prev >= 0 && step > prev / 2)) done[static_cast<std::size_t>(i)] = true;
      prev = step;
    }
    if (active == 0) break;
  }
  out.iterations = it;

  Real worst = 0;
  for (auto& zi : z) {
    for (int k = 0; k < 3; ++k) {
      auto lp = detail::laguerre_with_derivative(n, a, zi);
      if (norm(lp.derivative) == 0) break;
      zi -= lp.value / lp.derivative;
    }
    auto lp = detail::laguerre_with_derivative(n, a, zi);
    Real step = norm(lp.derivative) == 0 ? Real(0) : abs(lp.value / lp.derivative);
    worst = std::max(worst, step / std::max(Real(1), abs(zi)));
  }
  if (worst >= certify)
    throw Error(ErrorKind::NoConvergence, "laguerre_zeros: " + std::to_string(it) +
                                              " iterations, worst Newton step " + worst.str(6));

  // real parts that agree to the certified accuracy count as equal
  std::sort(z.begin(), z.end(), [&](const Complex& u, const Complex& v) {
    if (abs(u.re - v.re) > certify * std::max(Real(1), abs(u.re))) return u.re < v.re;
    return u.im < v.im;
  });
  out.zeros = z;
  out.scaled = z;
  return out;
}

/// Saddle points g * l_i where l_i are the zeros of L_n^(-1-1/g).
inline ZeroSet saddle_points(const Real& g_in, int n, const PrecisionContext& ctx) {
  if (g_in <= 0) throw Error(ErrorKind::DomainError, "saddle_points requires g > 0");
  ScopedPrecision guard(ctx.digits + 10);
  const Real g = mp::working(g_in);
  LaguerreSpec spec{n, -1 - 1 / g};
  ZeroSet zs;
  try {
    zs = laguerre_zeros(spec, ctx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Degenerate)
      throw Error(ErrorKind::Degenerate, std::string("sin(pi/g) = 0, singular l = 0 case: ") + e.what());
    throw;
  }
  zs.g = g;
  for (auto& s : zs.scaled) s *= g;
  return zs;
}

/// max_i |(1/g)(1 + 1/z_i) + sum_{j != i} 2/(z_j - z_i)| over the scaled points.
inline Real saddle_residual(const ZeroSet& zs) {
  const auto& z = zs.scaled;
  const std::size_t n = z.size();
  if (n == 0) throw Error(ErrorKind::DomainError, "saddle_residual: empty point set");
  Real scale = 0;
  for (const auto& p : z) scale = std::max(scale, abs(p));
  const Real tol = pow(Real(10), -static_cast<int>(Real::default_precision()) + 5) * std::max(Real(1), scale);
  Real worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex r = (Complex(1) + Complex(1) / z[i]) / zs.g;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      Complex diff = z[j] - z[i];
      if (abs(diff) <= tol) throw Error(ErrorKind::CoincidentPoints, "saddle_residual: coincident points");
      r += Complex(2) / diff;
    }
    worst = std::max(worst, abs(r));
  }
  return worst;
}

}  // namespace penner
