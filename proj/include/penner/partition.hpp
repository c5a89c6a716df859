/**
 * @file partition.hpp
 * @brief Exact finite-n partition functions of the Penner model for both
 * signs of the coupling, the factorization identity relating them, the free
 * energy, and small-n quadrature oracles.
 *
 * All partition functions are carried as (log-modulus, phase) pairs.
 */
#pragma once

#include "penner/barnes.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace penner {

struct PartitionValue {
  int n = 0;
  Real g;
  Real log_modulus;
  Real phase;  // in (-pi, pi]
};

/// Free energy -ln|Z_n(-g)|/n^2 together with its six-term split
/// (constant, ln g, ln|sin|, 1/(ng), two Barnes terms).
struct FreeEnergyValue {
  int n = 0;
  Real g;
  Real value;
  std::array<Real, 6> terms;
  Real decomposition_error;  // |sum(terms) - value|
};

namespace detail {

inline Real reduce_phase(const Real& phi) {
  const Real two_pi = 2 * mp::pi();
  Real r = phi - two_pi * floor(phi / two_pi);  // [0, 2pi)
  if (r > mp::pi()) r -= two_pi;
  return r;
}

inline void check_coupling(int n, const Real& g) {
  if (n < 1) throw Error(ErrorKind::DomainError, "n must be >= 1");
  if (g <= 0) throw Error(ErrorKind::DomainError, "g must be > 0");
}

// 1/g a positive integer: G(1 - 1/g) = 0.
inline bool inverse_coupling_is_integer(const Real& inv_g, const PrecisionContext& ctx) {
  return inv_g > Real(0.5) && mp::frac_distance(inv_g) <= ctx.pole_tolerance() * inv_g;
}

// ln|G(1+n-1/g)| - ln|G(1-1/g)| and the sign of the ratio.
inline std::pair<Real, int> negative_barnes_ratio(int n, const Real& inv_g, const PrecisionContext& ctx) {
  Real top = log_abs_barnes_g(Real(n) - inv_g, ctx);
  Real bottom = log_abs_barnes_g(-inv_g, ctx);
  int sign = sign_barnes_g(Real(n) - inv_g) * sign_barnes_g(-inv_g);
  return {top - bottom, sign};
}

}  // namespace detail

/// Z_n(g) = (e g)^{n/g} g^{n^2/2} (2 pi)^{-n/2} G(1+n+1/g)/G(1+1/g), g > 0.
inline PartitionValue z_positive(int n, const Real& g_in, const PrecisionContext& ctx) {
  detail::check_coupling(n, g_in);
  ScopedPrecision guard(ctx.digits + 10);
  const Real g = mp::working(g_in);
  const Real inv_g = 1 / g;
  const Real lg = log(g);
  Real v = Real(n) * inv_g * (1 + lg) + Real(n) * n / 2 * lg - Real(n) / 2 * mp::ln2pi();
  v += log_barnes_g(Real(n) + inv_g, ctx) - log_barnes_g(inv_g, ctx);
  return {n, g, v, Real(0)};
}

/// Partition function for negative coupling -g, g > 0:
///   (-e g)^{-n/g} (-g)^{n^2/2} (2 pi)^{-n/2} G(1+n-1/g)/G(1-1/g),
/// with principal branches for the two powers.
inline PartitionValue z_negative(int n, const Real& g_in, const PrecisionContext& ctx) {
  detail::check_coupling(n, g_in);
  ScopedPrecision guard(ctx.digits + 10);
  const Real g = mp::working(g_in);
  const Real inv_g = 1 / g;
  if (detail::inverse_coupling_is_integer(inv_g, ctx))
    throw Error(ErrorKind::GBarnesZero, "G(1-1/g) = 0 at 1/g = " + inv_g.str(20));
  const Real lg = log(g);
  auto [ratio, sign] = detail::negative_barnes_ratio(n, inv_g, ctx);
  Real v = -Real(n) * inv_g * (1 + lg) + Real(n) * n / 2 * lg - Real(n) / 2 * mp::ln2pi() + ratio;
  Real phase = -Real(n) * mp::pi() * inv_g + Real(n) * n * mp::pi() / 2;
  if (sign < 0) phase += mp::pi();
  return {n, g, v, detail::reduce_phase(phase)};
}

/// Holomorphic integral g^{n(n-1/g)} (1 - e^{-2 pi i/g})^n G(1+n) G(1+n-1/g)/G(1-1/g).
inline PartitionValue z0_holomorphic(int n, const Real& g_in, const PrecisionContext& ctx) {
  detail::check_coupling(n, g_in);
  ScopedPrecision guard(ctx.digits + 10);
  const Real g = mp::working(g_in);
  const Real inv_g = 1 / g;
  const Real s = mp::sin_pi(inv_g);
  if (abs(s) <= ctx.pole_tolerance() * std::max(Real(1), inv_g))
    throw Error(ErrorKind::SinZero, "sin(pi/g) = 0 at 1/g = " + inv_g.str(20));
  auto [ratio, sign] = detail::negative_barnes_ratio(n, inv_g, ctx);
  Real v = Real(n) * (Real(n) - inv_g) * log(g) + Real(n) * log(2 * abs(s)) + log_barnes_g_integer(n, ctx) + ratio;
  // arg(1 - e^{-i theta}) = pi/2 - theta/2, shifted by pi when sin(theta/2) < 0
  Real arg1 = mp::pi() / 2 - mp::pi() * inv_g;
  if (s < 0) arg1 += mp::pi();
  Real phase = Real(n) * detail::reduce_phase(arg1);
  if (sign < 0) phase += mp::pi();
  return {n, g, v, detail::reduce_phase(phase)};
}

/// Relative discrepancy |Z - C_n(-g) (-2i)^{-n} sin(pi/g)^{-n} Z0| / |Z|.
inline Real check_factorization(int n, const Real& g_in, const PrecisionContext& ctx) {
  ScopedPrecision guard(ctx.digits + 10);
  const Real g = mp::working(g_in);
  PartitionValue lhs = z_negative(n, g, ctx);
  PartitionValue z0 = z0_holomorphic(n, g, ctx);
  const Real inv_g = 1 / g;
  const Real nn(n);
  // C_n(-g) = e^{-n/g} (-g)^{-n^2/2} (2 pi)^{-n/2} / G(1+n)
  Real c_mod = -nn * inv_g - nn * nn / 2 * log(g) - nn / 2 * mp::ln2pi() - log_barnes_g_integer(n, ctx);
  Real c_phase = -nn * nn * mp::pi() / 2;
  // (-2i)^{-n} = 2^{-n} e^{i n pi/2}
  Real m_mod = -nn * log(Real(2));
  Real m_phase = nn * mp::pi() / 2;
  Real s = mp::sin_pi(inv_g);
  Real s_mod = -nn * log(abs(s));
  Real s_phase = s < 0 ? Real(nn * mp::pi()) : Real(0);

  Real d_mod = c_mod + m_mod + s_mod + z0.log_modulus - lhs.log_modulus;
  Real d_phase = detail::reduce_phase(c_phase + m_phase + s_phase + z0.phase - lhs.phase);
  // |e^{d_mod + i d_phase} - 1|
  Complex e = cexp(Complex(d_mod, d_phase)) - Complex(1);
  return abs(e);
}

/// Individual terms of the free energy after reflection of both Barnes factors.
inline std::array<Real, 6> free_energy_terms(int n, const Real& g_in, const PrecisionContext& ctx) {
  ScopedPrecision guard(ctx.digits + 10);
  const Real g = mp::working(g_in);
  const Real nn(n);
  const Real inv_g = 1 / g;
  std::array<Real, 6> t;
  t[0] = -log(mp::pi() / 2) / (2 * nn);
  t[1] = (inv_g / nn - Real(0.5)) * log(g);
  t[2] = log(abs(mp::sin_pi(inv_g))) / nn;
  t[3] = inv_g / nn;
  t[4] = -log_abs_barnes_g(inv_g - nn, ctx) / (nn * nn);
  t[5] = log_barnes_g(inv_g, ctx) / (nn * nn);
  return t;
}

/// F_n(g) = -ln|Z_n(-g)|/n^2 with the term split checked against the direct value.
inline FreeEnergyValue free_energy_exact(int n, const Real& g_in, const PrecisionContext& ctx) {
  detail::check_coupling(n, g_in);
  ScopedPrecision guard(ctx.digits + 10);
  const Real g = mp::working(g_in);
  const Real inv_g = 1 / g;
  if (detail::inverse_coupling_is_integer(inv_g, ctx))
    throw Error(ErrorKind::GBarnesZero, "G(1-1/g) = 0 at 1/g = " + inv_g.str(20));
  PartitionValue z = z_negative(n, g, ctx);
  FreeEnergyValue out;
  out.n = n;
  out.g = g;
  out.value = -z.log_modulus / (Real(n) * n);
  out.terms = free_energy_terms(n, g, ctx);
  Real sum = 0;
  for (const auto& t : out.terms) sum += t;
  out.decomposition_error = abs(sum - out.value);
  return out;
}

/// Z_n(g) for n = 1, 2 by tanh-sinh quadrature of the eigenvalue integral over [0, inf)^n.
///
/// Computed in double precision; the weight is normalised as
/// exp(-(x - ln x - 1)/g) so that its maximum is 1.
inline PartitionValue quadrature_oracle_eig(int n, double g) {
  if (n != 1 && n != 2) throw Error(ErrorKind::DomainError, "quadrature_oracle_eig: n must be 1 or 2");
  if (!(g > 0)) throw Error(ErrorKind::DomainError, "quadrature_oracle_eig: g must be > 0");
  boost::math::quadrature::tanh_sinh<double> ts(15);
  const double inf = std::numeric_limits<double>::infinity();
  auto w = [g](double x) { return x <= 0 ? 0.0 : std::exp(-(x - std::log(x) - 1) / g); };
  double err = 0, l1 = 0;
  double integral;
  if (n == 1) {
    integral = ts.integrate(w, 0.0, inf, 1e-13, &err, &l1);
  } else {
    double inner_err_max = 0;
    auto outer = [&](double x) {
      double e = 0;
      auto f = [&](double y) { return w(y) * (x - y) * (x - y); };
      double v = ts.integrate(f, 0.0, inf, 1e-13, &e);
      inner_err_max = std::max(inner_err_max, e / std::max(1e-300, std::abs(v)));
      return w(x) * v;
    };
    integral = ts.integrate(outer, 0.0, inf, 1e-12, &err, &l1) / 2;
    err = err / 2 + inner_err_max * std::abs(integral);
  }
  if (!(integral > 0) || err > 1e-9 * integral)
    throw Error(ErrorKind::QuadratureFailure, "tanh-sinh error estimate " + std::to_string(err));
  // ln C_n(g); the factorials 1! ... (n-1)! are all 1 here
  double log_c = n / g - 0.5 * n * n * std::log(g) - 0.5 * n * std::log(2 * M_PI);
  PartitionValue out;
  out.n = n;
  out.g = Real(g);
  out.log_modulus = Real(log_c - n / g + std::log(integral));
  out.phase = 0;
  return out;
}

namespace detail {

struct ContourNode {
  std::complex<double> z;
  std::complex<double> weight;  // dz times the Gauss weight
};

// Loop around [0, inf) at distance 0.5: in along x - 0.5i, clockwise half circle
// on the left of the origin, out along x + 0.5i.
inline std::vector<ContourNode> hankel_nodes(double g) {
  using boost::math::quadrature::gauss;
  constexpr int kPoints = 20;
  const auto& abscissa = gauss<double, kPoints>::abscissa();
  const auto& weights = gauss<double, kPoints>::weights();
  auto panel = [&](auto path, double a, double b, std::vector<ContourNode>& out) {
    double half = (b - a) / 2, mid = (a + b) / 2;
    auto emit = [&](double u, double wt) {
      auto [z, dz] = path(mid + half * u);
      out.push_back({z, dz * (wt * half)});
    };
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      emit(abscissa[i], weights[i]);
      if (abscissa[i] != 0) emit(-abscissa[i], weights[i]);
    }
  };
  const double r = 0.5;
  const double R = 40 * g + 10;
  const double h = std::max(0.05, std::min(0.5 * g, 0.5));
  const int panels = static_cast<int>(std::ceil(R / h));
  std::vector<ContourNode> nodes;
  using C = std::complex<double>;
  auto lower = [&](double s) { return std::pair<C, C>{C(R - s, -r), C(-1, 0)}; };
  for (int k = 0; k < panels; ++k) panel(lower, k * R / panels, (k + 1) * R / panels, nodes);
  auto arc = [&](double phi) {
    C z = r * std::exp(C(0, phi));
    return std::pair<C, C>{z, C(0, 1) * z * (-1.0)};
  };
  // phi runs from 3pi/2 down to pi/2; parameterize by s = 3pi/2 - phi
  auto arc_s = [&](double s) { return arc(1.5 * M_PI - s); };
  for (int k = 0; k < 8; ++k) panel(arc_s, k * M_PI / 8, (k + 1) * M_PI / 8, nodes);
  auto upper = [&](double s) { return std::pair<C, C>{C(s, r), C(1, 0)}; };
  for (int k = 0; k < panels; ++k) panel(upper, k * R / panels, (k + 1) * R / panels, nodes);
  return nodes;
}

// e^{-W_+(z)/g} with log z = ln|z| + i arg z, arg z in [0, 2 pi).
inline std::complex<double> holomorphic_weight(std::complex<double> z, double g) {
  double arg = std::arg(z);
  if (arg < 0) arg += 2 * M_PI;
  std::complex<double> logz(std::log(std::abs(z)), arg);
  return std::exp(-(z + logz) / g);
}

}  // namespace detail

/// Holomorphic integral for n = 1, 2 by Gauss-Legendre quadrature along a
/// Hankel-type loop around the positive real axis.
inline PartitionValue contour_quadrature_z0(int n, double g) {
  if (n != 1 && n != 2) throw Error(ErrorKind::DomainError, "contour_quadrature_z0: n must be 1 or 2");
  if (!(g > 0)) throw Error(ErrorKind::DomainError, "contour_quadrature_z0: g must be > 0");
  auto nodes = detail::hankel_nodes(g);
  std::vector<std::complex<double>> f(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = detail::holomorphic_weight(nodes[i].z, g) * nodes[i].weight;
  std::complex<double> value;
  if (n == 1) {
    for (const auto& v : f) value += v;
  } else {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::complex<double> inner;
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        auto dz = nodes[i].z - nodes[j].z;
        inner += f[j] * dz * dz;
      }
      value += f[i] * inner;
    }
    value /= 2.0;
  }
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) || std::abs(value) == 0)
    throw Error(ErrorKind::QuadratureFailure, "contour quadrature produced a non-finite value");
  PartitionValue out;
  out.n = n;
  out.g = Real(g);
  out.log_modulus = Real(std::log(std::abs(value)));
  out.phase = Real(std::arg(value));
  return out;
}

}  // namespace penner
