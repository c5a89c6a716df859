/**
 * @file asymptotics.hpp
 * @brief Large-n behaviour of the free energy: coupling sequences, the
 * oscillatory/perturbative split, the planar free energy over the (t, l)
 * phase space, transition diagnostics, and the positive-coupling genus
 * expansion with its Euler characteristics.
 */
#pragma once

#include "penner/bernoulli.hpp"
#include "penner/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace penner {

/// Rule producing the couplings g_n.
struct CouplingSequence {
  enum class Kind { THooft, KMFamily, Explicit };

  Kind kind = Kind::THooft;
  Real t = 1;
  Real l = 1;           // KMFamily
  Real c = 1;           // KMFamily
  std::vector<Real> values;  // Explicit, values[n-1] = g_n

  static CouplingSequence thooft(const Real& t) { return {Kind::THooft, t, Real(1), Real(1), {}}; }
  static CouplingSequence km_family(const Real& t, const Real& l, const Real& c) {
    if (c == 0) throw Error(ErrorKind::DomainError, "KM family requires c != 0");
    if (l < 0 || l > 1) throw Error(ErrorKind::DomainError, "KM family requires 0 <= l <= 1");
    return {Kind::KMFamily, t, l, c, {}};
  }
  static CouplingSequence explicit_list(std::vector<Real> v) {
    return {Kind::Explicit, Real(0), Real(1), Real(1), std::move(v)};
  }

  /// Decimal digits needed so that c l^n survives next to the integer part of 1/g_n.
  int required_digits(int n, int base) const {
    if (kind != Kind::KMFamily || l == 0 || l == 1) return base;
    double lost = n * std::abs(std::log10(l.convert_to<double>()));
    return base + static_cast<int>(std::ceil(lost)) + 30;
  }

  /// g_n at the current default precision.
  Real g(int n) const {
    if (n < 1) throw Error(ErrorKind::DomainError, "coupling index must be >= 1");
    switch (kind) {
      case Kind::THooft: return mp::working(t) / n;
      case Kind::KMFamily: {
        Real tt = mp::working(t);
        return 1 / (floor(Real(n) / tt) + mp::working(c) * pow(mp::working(l), n));
      }
      case Kind::Explicit:
        if (static_cast<std::size_t>(n) > values.size())
          throw Error(ErrorKind::DomainError, "explicit coupling list too short");
        return mp::working(values[static_cast<std::size_t>(n - 1)]);
    }
    return Real(0);
  }
};

struct PhasePoint {
  Real t;
  Real l;
};

struct FreeEnergyBreakdown {
  int n = 0;
  Real g;
  Real t;  // n g_n
  Real exact;
  Real osc;
  Real per;
  int K = 4;
  Real residual;  // exact - osc - per
};

namespace detail {

inline void check_not_critical(const Real& t) {
  if (t <= 0) throw Error(ErrorKind::DomainError, "t must be > 0");
  if (t == 1) throw Error(ErrorKind::CriticalT, "t = 1 is the critical point");
}

}  // namespace detail

/// Oscillatory part of the free energy at t = n g:
///   (1/n) ln|2 sin(pi n/t)|                                  for t < 1,
///   (1/(t n)) ln|2 sin(pi n/t)| + Cl_2(2 pi n/t)/(2 pi n^2)  for t > 1.
inline Real osc_contribution(int n, const Real& t_in, const PrecisionContext& ctx) {
  ScopedPrecision guard(ctx.digits + 10);
  const Real t = mp::working(t_in);
  detail::check_not_critical(t);
  const Real nn(n);
  const Real x = nn / t;
  const Real s = mp::sin_pi(x);
  if (abs(s) <= ctx.pole_tolerance() * std::max(Real(1), x))
    throw Error(ErrorKind::SinZero, "sin(pi n/t) = 0 at n/t = " + x.str(20));
  const Real lsin = log(2 * abs(s));
  if (t < 1) return lsin / nn;
  const Real two_pi = 2 * mp::pi();
  // Cl_2 is 2pi-periodic: reduce n/t modulo 1 before scaling
  return lsin / (t * nn) + clausen2(two_pi * (x - round(x)), ctx) / (two_pi * nn * nn);
}

/// -[(t-1)^2/(2t^2) ln|1-t| - 3/4 + 1/(2t)], the n^0 term of the perturbative part.
inline Real planar_perturbative(const Real& t_in) {
  const Real t = mp::working(t_in);
  detail::check_not_critical(t);
  return -((t - 1) * (t - 1) / (2 * t * t) * log(abs(1 - t)) - Real(3) / 4 + 1 / (2 * t));
}

/// Genus-k term (k >= 2) of the perturbative part:
///   -B_{2k}/(2k(2k-2)) n^{-2k} t^{2k-2} ((1-t)^{2-2k} - 1).
inline Real perturbative_genus_term(int k, int n, const Real& t) {
  const Real b = BernoulliTable::instance().real_at(k);
  const Real nn(n);
  return -b / (Real(2 * k) * (2 * k - 2)) * pow(nn, -2 * k) * pow(t, 2 * k - 2) * (pow(abs(1 - t), 2 - 2 * k) - 1);
}

/// Perturbative part truncated after the B_{2K} term, 2 <= K <= 6.
inline Real per_contribution(int n, const Real& t_in, int K, const PrecisionContext& ctx) {
  if (K < 2 || K > 6) throw Error(ErrorKind::DomainError, "per_contribution: K must be in [2, 6]");
  ScopedPrecision guard(ctx.digits + 10);
  const Real t = mp::working(t_in);
  detail::check_not_critical(t);
  const Real nn(n);
  Real v = planar_perturbative(t) + log(abs(1 - t)) / (12 * nn * nn);
  for (int k = 2; k <= K; ++k) v += perturbative_genus_term(k, n, t);
  return v;
}

/// Exact free energy at g together with the split evaluated at t = n g.
inline FreeEnergyBreakdown breakdown(int n, const Real& g_in, int K, const PrecisionContext& ctx) {
  ScopedPrecision guard(ctx.digits + 10);
  FreeEnergyBreakdown b;
  b.n = n;
  b.g = mp::working(g_in);
  b.t = Real(n) * b.g;
  b.K = K;
  b.exact = free_energy_exact(n, b.g, ctx).value;
  b.osc = osc_contribution(n, b.t, ctx);
  b.per = per_contribution(n, b.t, K, ctx);
  b.residual = b.exact - b.osc - b.per;
  return b;
}

/// Planar free energy by the direct closed form:
///   (ln l or (ln l)/t) - (t-1)^2/(2t^2) ln|t-1| + 3/4 - 1/(2t).
inline Real planar_closed_form(const PhasePoint& p) {
  const Real t = mp::working(p.t);
  const Real l = mp::working(p.l);
  Real v = -(t - 1) * (t - 1) / (2 * t * t) * log(abs(t - 1)) + Real(3) / 4 - 1 / (2 * t);
  return v + (t < 1 ? log(l) : Real(log(l) / t));
}

/// Planar free energy of the holomorphic integral, Heaviside factor H(t-1).
inline Real planar_holomorphic(const PhasePoint& p) {
  const Real t = mp::working(p.t);
  const Real l = mp::working(p.l);
  Real v = -log(t) / 2 + Real(3) / 2 * (t - 1) / t - (t - 1) * (t - 1) / (2 * t * t) * log(abs(t - 1));
  if (t > 1) v += (1 / t - 1) * log(l);
  return v;
}

/// Planar free energy assembled from the prefactor and the holomorphic part:
///   ln l + 1/t + (1/2) ln t - 3/4 + F0.
inline Real planar_via_holomorphic(const PhasePoint& p) {
  const Real t = mp::working(p.t);
  return log(mp::working(p.l)) + 1 / t + log(t) / 2 - Real(3) / 4 + planar_holomorphic(p);
}

/// Planar free energy F(t, l), cross-checked against the holomorphic route.
///
/// With allow_critical the continuous value ln l + 1/4 is returned at t = 1.
inline Real planar_free_energy(const PhasePoint& p, const PrecisionContext& ctx, bool allow_critical = false) {
  ScopedPrecision guard(ctx.digits + 10);
  if (p.t <= 0) throw Error(ErrorKind::DomainError, "t must be > 0");
  if (p.l < 0 || p.l > 1) throw Error(ErrorKind::DomainError, "l must be in [0, 1]");
  if (p.l == 0) throw Error(ErrorKind::SingularPhase, "l = 0: infinite free energy");
  if (p.t == 1) {
    if (!allow_critical) throw Error(ErrorKind::CriticalT, "t = 1 is the critical point");
    return log(mp::working(p.l)) + Real(1) / 4;
  }
  Real a = planar_closed_form(p);
  Real b = planar_via_holomorphic(p);
  if (abs(a - b) > Real(1e-25))
    throw Error(ErrorKind::NoConvergence, "planar routes disagree by " + Real(abs(a - b)).str(6));
  return a;
}

struct TransitionDiagnostics {
  Real jump_in_dFdt;           // dF/dt(1-0) - dF/dt(1+0), extrapolated to h -> 0
  bool is_continuous_at_l1 = false;
  Real value_gap;              // F(1-h) - F(1+h) at the smallest probe
  std::vector<Real> probe_h;   // h, h/10, h/100
  std::vector<Real> second_derivative;  // d2F/dt2 at t = 1 + probe_h
};

namespace detail {

inline Real planar_derivative(const Real& t, const Real& l, const Real& step) {
  return (planar_closed_form({t + step, l}) - planar_closed_form({t - step, l})) / (2 * step);
}

inline Real planar_second_derivative(const Real& t, const Real& l, const Real& step) {
  return (planar_closed_form({t + step, l}) - 2 * planar_closed_form({t, l}) + planar_closed_form({t - step, l})) /
         (step * step);
}

// Solve the small dense system a x = b by Gaussian elimination with partial pivoting.
inline std::vector<Real> solve_dense(std::vector<std::vector<Real>> a, std::vector<Real> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(a[r][c]) > abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      Real f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<Real> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Real s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

/// Jump of dF/dt across t = 1 at fixed l, extrapolated in h with the
/// basis {1, h ln h, h, h^2 ln h, h^2} over h, h/2, ..., h/16.
inline TransitionDiagnostics transition_diagnostics(const Real& l_in, const Real& h_in, const PrecisionContext& ctx) {
  if (l_in <= 0 || l_in > 1) throw Error(ErrorKind::DomainError, "transition_diagnostics requires 0 < l <= 1");
  if (h_in <= 0 || h_in >= Real(0.1)) throw Error(ErrorKind::DomainError, "transition_diagnostics requires 0 < h < 0.1");
  ScopedPrecision guard(ctx.digits + 10);
  const Real l = mp::working(l_in);
  const Real h = mp::working(h_in);
  const Real one(1);

  std::vector<std::vector<Real>> a;
  std::vector<Real> b;
  for (int k = 0; k < 5; ++k) {
    Real hk = h / pow(Real(2), k);
    Real step = hk * Real(1e-12);
    Real gap = detail::planar_derivative(one - hk, l, step) - detail::planar_derivative(one + hk, l, step);
    Real lh = log(hk);
    a.push_back({Real(1), hk * lh, hk, hk * hk * lh, hk * hk});
    b.push_back(gap);
  }
  TransitionDiagnostics out;
  out.jump_in_dFdt = detail::solve_dense(a, b)[0];

  for (int k = 0; k < 3; ++k) {
    Real hk = h / pow(Real(10), k);
    out.probe_h.push_back(hk);
    out.second_derivative.push_back(detail::planar_second_derivative(one + hk, l, hk / 100));
  }
  Real hmin = out.probe_h.back();
  out.value_gap = planar_closed_form({one - hmin, l}) - planar_closed_form({one + hmin, l});

  bool growing = true;
  for (std::size_t i = 1; i < out.second_derivative.size(); ++i)
    growing = growing && abs(out.second_derivative[i]) > abs(out.second_derivative[i - 1]);
  out.is_continuous_at_l1 = l == 1 && abs(out.jump_in_dFdt) < Real(1e-3) && growing;
  return out;
}

struct KMLimitEstimate {
  Real l_hat;
  Real t_hat;
  bool converged = false;
  bool hits_zero = false;  // sin(pi/g_n) vanished somewhere on the scanned subsequence
  Real l_spread;           // max - min of |sin(pi/g_n)|^{1/n} over the tail window
};

/// Empirical l = lim |sin(pi/g_n)|^{1/n} and t = lim n g_n over n = step*k + offset <= n_max.
///
/// The verdict uses the tail window n in [n_max/2, n_max]: converged when the
/// spread of the running estimate there is below 0.01.
inline KMLimitEstimate km_limit_estimate(const CouplingSequence& seq, int n_max, const PrecisionContext& ctx,
                                         int step = 1, int offset = 0) {
  if (n_max < 100) throw Error(ErrorKind::DomainError, "km_limit_estimate requires n_max >= 100");
  if (step < 1 || offset < 0) throw Error(ErrorKind::DomainError, "km_limit_estimate: bad subsequence");
  KMLimitEstimate out;
  Real lo = std::numeric_limits<double>::infinity(), hi = -1;
  int last_n = 0;
  Real last_l = 0, last_g = 0;
  for (int n = offset > 0 ? offset : step; n <= n_max; n += step) {
    int digits = seq.required_digits(n, ctx.digits);
    PrecisionContext local = ctx.with_digits(digits);
    ScopedPrecision guard(digits + 10);
    Real g = seq.g(n);
    Real inv_g = 1 / g;
    Real s = abs(mp::sin_pi(inv_g));
    Real ln;
    if (s <= local.pole_tolerance() * std::max(Real(1), inv_g)) {
      out.hits_zero = true;
      ln = 0;
    } else {
      ln = exp(log(s) / n);
    }
    if (2 * n >= n_max) {
      lo = std::min(lo, ln);
      hi = std::max(hi, ln);
    }
    last_n = n;
    last_l = ln;
    last_g = g;
  }
  if (last_n == 0) throw Error(ErrorKind::DomainError, "km_limit_estimate: empty subsequence");
  out.l_hat = last_l;
  out.t_hat = Real(last_n) * last_g;
  out.l_spread = hi - lo;
  out.converged = out.l_spread < Real(0.01);
  if (out.hits_zero) out.l_hat = 0;
  return out;
}

/// chi_{k,s} = (-1)^s (2k+s-3)! (2k-1) B_{2k} / ((2k)! s!), exact.
inline Rational euler_characteristic(int k, int s) {
  if (k < 0 || s <= 0 || 2 - 2 * k - s >= 0)
    throw Error(ErrorKind::DomainError, "euler_characteristic needs k >= 0, s > 0, 2 - 2k - s < 0");
  auto fact = [](int m) {
    BigInt f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  Rational v = Rational(fact(2 * k + s - 3)) * (2 * k - 1) * bernoulli_b2n(k) / Rational(fact(2 * k) * fact(s));
  return s % 2 ? Rational(-v) : v;
}

namespace detail {

// Taylor coefficient of t^m in ln(1+t).
inline Rational log1p_coefficient(int m) {
  if (m < 1) return Rational(0);
  return Rational(m % 2 ? 1 : -1, m);
}

// binom(a, s) for integer a (possibly negative).
inline Rational binomial(int a, int s) {
  Rational r = 1;
  for (int i = 0; i < s; ++i) r *= Rational(a - i, i + 1);
  return r;
}

}  // namespace detail

/// Coefficient of n^{-2k} t^{2k+s-2} in the positive-coupling expansion, in exact arithmetic.
inline Rational topological_coefficient(int k, int s) {
  if (k < 0 || s <= 0 || 2 - 2 * k - s >= 0)
    throw Error(ErrorKind::DomainError, "topological_coefficient: index outside range");
  if (k == 0) {
    // -(1+t)^2/(2t^2) ln(1+t) + 3/4 + 1/(2t): coefficient of t^{s-2}
    Rational a = detail::log1p_coefficient(s) + 2 * detail::log1p_coefficient(s - 1) + detail::log1p_coefficient(s - 2);
    return -a / 2;
  }
  if (k == 1) return detail::log1p_coefficient(s) / 12;  // (1/12) ln(1+t)
  // -B_{2k}/(2k(2k-2)) t^{2k-2} ((1+t)^{2-2k} - 1)
  return -bernoulli_b2n(k) / Rational(2 * k * (2 * k - 2)) * detail::binomial(2 - 2 * k, s);
}

struct TopologicalValue {
  Real value;
  Real dropped_term;  // size of the genus-(K+1) term
};

/// Positive-coupling free energy -ln Z_n(t/n)/n^2 expanded through genus K.
inline TopologicalValue topological_expansion_positive(const Real& t_in, int n, int K, const PrecisionContext& ctx) {
  if (t_in <= 0) throw Error(ErrorKind::DomainError, "topological_expansion_positive requires t > 0");
  if (K < 0 || n < 1) throw Error(ErrorKind::DomainError, "topological_expansion_positive: bad order or n");
  ScopedPrecision guard(ctx.digits + 10);
  const Real t = mp::working(t_in);
  const Real nn(n);
  auto genus = [&](int k) -> Real {
    if (k == 0) return -((1 + t) * (1 + t) / (2 * t * t) * log1p(t) - Real(3) / 4 - 1 / (2 * t));
    if (k == 1) return log1p(t) / (12 * nn * nn);
    const Real b = BernoulliTable::instance().real_at(k);
    return -b / (Real(2 * k) * (2 * k - 2)) * pow(nn, -2 * k) * pow(t, 2 * k - 2) * (pow(1 + t, 2 - 2 * k) - 1);
  };
  TopologicalValue out;
  out.value = 0;
  for (int k = 0; k <= K; ++k) out.value += genus(k);
  out.dropped_term = abs(genus(K + 1));
  return out;
}

/// Oscillatory part sampled along a 't Hooft sequence for n = 1..n_max; returns max - min.
inline Real thooft_oscillation_spread(const Real& t, int n_max, const PrecisionContext& ctx) {
  Real lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    try {
      Real v = osc_contribution(n, t, ctx);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SinZero) throw;
    }
  }
  return hi - lo;
}

}  // namespace penner
