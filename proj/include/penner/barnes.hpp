/**
 * @file barnes.hpp
 * @brief Barnes G function on the real line, the Clausen function Cl_2 and the
 * Stirling-type asymptotic series, all in extended precision.
 *
 * Conventions: every "log" routine returns ln|G(1+z)| (or ln|G(1-x)|) so that
 * values stay representable for large arguments.
 */
#pragma once

#include "penner/bernoulli.hpp"
#include "penner/precision.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace penner {

/// ln G(1+n) = sum_{k=1}^{n-1} ln k!, exact up to rounding.
inline Real log_barnes_g_integer(int n, const PrecisionContext& ctx) {
  if (n < 1) throw Error(ErrorKind::DomainError, "log_barnes_g_integer: n must be >= 1");
  ScopedPrecision guard(ctx);
  Real total = 0;
  Real log_fact = 0;  // ln k!
  for (int k = 1; k <= n - 1; ++k) {
    log_fact += log(Real(k));
    total += log_fact;
  }
  return total;
}

namespace detail {

/// sum_{k > N} k^{-p}, Euler-Maclaurin with three correction terms.
inline Real hurwitz_tail(int p, const Real& N) {
  Real np = pow(N, -p);
  Real r = N * np / (p - 1) - np / 2 + Real(p) * np / N / 12;
  r -= Real(p) * (p + 1) * (p + 2) * np / (N * N * N) / 720;
  r += Real(p) * (p + 1) * (p + 2) * (p + 3) * (p + 4) * np / pow(N, 5) / 30240;
  return r;
}

inline bool near_nonpositive_integer(const Real& v, const PrecisionContext& ctx) {
  if (v > Real(0.5)) return false;
  return mp::frac_distance(v) <= ctx.pole_tolerance() * std::max(Real(1), abs(v));
}

}  // namespace detail

/// ln|G(1+z)| from the truncated canonical product plus an algebraic tail.
///
/// Slow and independent of the asymptotic machinery; used as the oracle for
/// every other evaluator. Accepts any real z with 1+z not a non-positive
/// integer.
inline Real log_barnes_g_product(const Real& z_in, int terms, const PrecisionContext& ctx) {
  if (terms < 1 || terms > ctx.max_terms)
    throw Error(ErrorKind::DomainError, "log_barnes_g_product: terms outside [1, max_terms]");
  ScopedPrecision guard(ctx);
  const Real z = mp::working(z_in);
  if (detail::near_nonpositive_integer(1 + z, ctx))
    throw Error(ErrorKind::ZeroOfG, "G(1+z) vanishes at z = " + z.str(20));
  if (Real(terms) <= 2 * abs(z))
    throw Error(ErrorKind::DomainError, "log_barnes_g_product: terms must exceed 2|z|");

  const Real z2 = z * z;
  Real acc = z / 2 * mp::ln2pi() - (z + z2 * (1 + mp::euler_gamma())) / 2;
  for (int k = 1; k <= terms; ++k) {
    Real kk(k);
    acc += kk * log(abs(1 + z / kk)) - z + z2 / (2 * kk);
  }
  // k ln(1+z/k) - z + z^2/(2k) = sum_{j>=3} (-1)^{j+1} z^j / (j k^{j-1})
  const Real N(terms);
  const Real eps = pow(Real(10), -ctx.digits);
  Real zj = z2 * z;
  for (int j = 3; j < 400; ++j) {
    Real term = zj / j * detail::hurwitz_tail(j - 1, N);
    if (j % 2 == 0) term = -term;
    acc += term;
    if (abs(term) < eps) break;
    zj *= z;
  }
  return acc;
}

/// Value of the truncated Stirling series together with the size of the
/// first omitted term, which bounds the truncation error for x > 0.
struct StirlingValue {
  Real value;
  Real dropped_term;
};

/// Largest m for which the terms of the series are still decreasing at x.
inline int stirling_optimal_order(double x) { return std::max(1, static_cast<int>(std::floor(M_PI * x))); }

/// Stirling-type expansion of ln G(1+x), truncated after the B_{2K} term.
inline StirlingValue log_barnes_g_stirling(const Real& x_in, int K) {
  const Real x = mp::working(x_in);
  if (x < 5) throw Error(ErrorKind::AsymptoticRegime, "log_barnes_g_stirling requires x >= 5");
  if (K < 0 || K > stirling_optimal_order(x.convert_to<double>()))
    throw Error(ErrorKind::DomainError, "log_barnes_g_stirling: K beyond optimal truncation");
  const auto& bern = BernoulliTable::instance();
  const Real lx = log(x);
  const Real x2 = x * x;
  Real v = x2 / 2 * lx - Real(3) / 4 * x2 + x / 2 * mp::ln2pi() - lx / 12 + mp::zeta_prime_minus_one();
  const Real inv_x2 = 1 / x2;
  Real xp = inv_x2;  // x^{-(2m-2)}
  for (int m = 2; m <= K; ++m) {
    v += bern.real_at(m) / (Real(2 * m) * (2 * m - 2)) * xp;
    xp *= inv_x2;
  }
  int md = std::max(K + 1, 2);
  Real xd = pow(x, -(2 * md - 2));
  Real dropped = abs(bern.real_at(md)) / (Real(2 * md) * (2 * md - 2)) * xd;
  return {v, dropped};
}

namespace detail {

struct StirlingPlan {
  double shift_to;  // evaluate the series at arguments >= shift_to
  int order;        // last B_{2m} kept
};

// Cheapest (argument, order) pair whose first dropped term is below 10^{-digits-5}.
inline StirlingPlan plan_stirling(int digits) {
  const double log_eps = -(digits + 5) * std::log(10.0);
  StirlingPlan best{1e300, 2};
  double best_cost = 1e300;
  for (int m = 3; m < 2000; ++m) {
    // ln |B_{2m}| ~ ln 2 + ln (2m)! - 2m ln 2pi
    double lb = std::log(2.0) + std::lgamma(2.0 * m + 1) - 2.0 * m * std::log(2 * M_PI);
    double lx = (lb - std::log(4.0 * m * m) - log_eps) / (2.0 * m - 2);
    double x = std::max(5.0, std::exp(lx));
    double cost = x + 4.0 * m;
    if (cost < best_cost) {
      best_cost = cost;
      best = {x, m - 1};
    }
  }
  best.shift_to = std::ceil(best.shift_to);
  return best;
}

}  // namespace detail

/// ln G(1+x) for real x > -1 to the precision of ctx.
///
/// The argument is shifted up with G(2+y) = Gamma(1+y) G(1+y) until the
/// Stirling series reaches the requested accuracy.
inline Real log_barnes_g(const Real& x_in, const PrecisionContext& ctx) {
  ScopedPrecision guard(ctx.digits + 10);
  const Real x = mp::working(x_in);
  if (x <= -1) throw Error(ErrorKind::DomainError, "log_barnes_g requires x > -1");
  const auto plan = detail::plan_stirling(ctx.digits);
  const Real X0(plan.shift_to);
  if (x >= X0) return log_barnes_g_stirling(x, plan.order).value;

  int N = static_cast<int>(ceil(X0 - x).convert_to<double>());
  Real shifted = log_barnes_g_stirling(x + N, plan.order).value;
  // ln G(1+x+N) - ln G(1+x) = N lnGamma(1+x) + sum_{i=0}^{N-2} (N-1-i) ln(1+x+i)
  Real sum = Real(N) * mp::lgamma_pos(1 + x);
  for (int i = 0; i <= N - 2; ++i) sum += Real(N - 1 - i) * log(1 + x + i);
  return shifted - sum;
}

namespace detail {

inline const std::vector<Real>& zeta_even_table(std::size_t count) {
  static std::mutex mutex;
  static std::map<unsigned, std::vector<Real>> tables;
  std::lock_guard<std::mutex> lock(mutex);
  auto& tab = tables[Real::default_precision()];
  while (tab.size() < count) tab.push_back(mp::zeta_ui(2 * (tab.size() + 1)));
  return tab;
}

}  // namespace detail

/// Clausen function Cl_2(x) = sum_m sin(m x)/m^2.
///
/// After reduction to (0, pi] the Fourier series is resummed into
///   Cl_2(theta) = theta - theta ln theta + sum_k zeta(2k)/(k(2k+1)) theta (theta/2pi)^{2k},
/// which converges at least like 4^{-k}.
inline Real clausen2(const Real& x_in, const PrecisionContext& ctx) {
  ScopedPrecision guard(ctx.digits + 10);
  const Real x = mp::working(x_in);
  const Real two_pi = 2 * mp::pi();
  Real theta = x - two_pi * round(x / two_pi);
  if (theta == 0) return Real(0);
  bool negate = theta < 0;
  if (negate) theta = -theta;
  if (theta >= mp::pi()) return Real(0) * (negate ? -1 : 1);  // theta == pi exactly

  const Real eps = pow(Real(10), -(ctx.digits + 5));
  const Real r2 = (theta / two_pi) * (theta / two_pi);
  Real sum = theta - theta * log(theta);
  Real power = theta * r2;
  std::size_t want = 16;
  for (std::size_t k = 1;; ++k) {
    const auto& zt = detail::zeta_even_table(std::max(want, k));
    if (k > want) want *= 2;
    Real term = zt[k - 1] / (Real(k) * (2 * k + 1)) * power;
    sum += term;
    if (abs(term) < eps * (1 + abs(sum))) break;
    power *= r2;
  }
  return negate ? Real(-sum) : sum;
}

/// ln|G(1-x)| = ln G(1+x) + x ln|sin(pi x)/pi| + Cl_2(2 pi x)/(2 pi), x > 0.
inline Real log_abs_barnes_g_reflected(const Real& x_in, const PrecisionContext& ctx) {
  if (x_in <= 0) throw Error(ErrorKind::DomainError, "log_abs_barnes_g_reflected requires x > 0");
  ScopedPrecision guard(ctx.digits + 10);
  const Real x = mp::working(x_in);
  Real s = mp::sin_pi(x);
  if (abs(s) <= ctx.pole_tolerance() * std::max(Real(1), x))
    throw Error(ErrorKind::PoleOfLog, "G(1-x) = 0 at integer x = " + x.str(20));
  const Real r = x - round(x);
  return log_barnes_g(x, ctx) + x * log(abs(s) / mp::pi()) + clausen2(2 * mp::pi() * r, ctx) / (2 * mp::pi());
}

/// ln|G(1+z)| for any real z that is not a zero of G(1+z).
inline Real log_abs_barnes_g(const Real& z_in, const PrecisionContext& ctx) {
  if (z_in > -1) return log_barnes_g(z_in, ctx);
  ScopedPrecision guard(ctx.digits + 10);
  const Real z = mp::working(z_in);
  if (detail::near_nonpositive_integer(1 + z, ctx))
    throw Error(ErrorKind::ZeroOfG, "G(1+z) vanishes at z = " + z.str(20));
  return log_abs_barnes_g_reflected(-z, ctx);
}

/// Sign of G(1+z) for real z away from its zeros.
inline int sign_barnes_g(const Real& z) {
  // G(1+z) > 0 for z > -1 and G(1+z) = G(2+z)/Gamma(1+z).
  int sign = 1;
  Real y = z;
  while (y <= -1) {
    // Gamma(1+y) with 1+y < 0: sign (-1)^{ceil(-(1+y))}
    Real arg = -(1 + y);
    long c = static_cast<long>(ceil(arg).convert_to<double>());
    if (c % 2 != 0) sign = -sign;
    y += 1;
  }
  return sign;
}

}  // namespace penner
