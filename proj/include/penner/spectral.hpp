/**
 * @file spectral.hpp
 * @brief Limiting supports and densities of the saddle points, Coulomb-gas
 * energy and effective potential, and comparison of finite-n clouds with the
 * limiting supports.
 *
 * The module works in double precision. Supports are built in the Laguerre
 * plane (zeros of L_n^(alpha_n)(n z)) and mapped to the Penner plane by
 * z -> t z on request.
 */
#pragma once

#include "penner/laguerre.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace penner {

using cplx = std::complex<double>;

enum class Regime { WeakArc, SzegoCurve, StrongLoopInterval, StrongDeltaInterval };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::WeakArc: return "WeakArc";
    case Regime::SzegoCurve: return "SzegoCurve";
    case Regime::StrongLoopInterval: return "StrongLoopInterval";
    case Regime::StrongDeltaInterval: return "StrongDeltaInterval";
  }
  return "Unknown";
}

enum class Plane { Laguerre, Penner };

/// One connected piece of a support, sampled on a uniform periodic grid in a
/// parameter tau.
///
/// A closed piece goes once around. An open piece (arc, interval, the loop at
/// l = 1) is extended evenly in tau, so nodes k and M-1-k coincide and each
/// carries half of the local mass.
struct SupportPiece {
  enum class Kind { Loop, Arc, Interval };

  Kind kind = Kind::Loop;
  bool closed = false;
  std::vector<cplx> nodes;
  std::vector<cplx> tangent;    // dz/dtau
  std::vector<double> weights;  // mass carried by each node
  cplx start{0, 0}, end{0, 0};  // endpoints of an open piece

  double mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

  /// Distinct points along the piece in order, endpoints included for open pieces.
  std::vector<cplx> ordered() const {
    if (closed) {
      std::vector<cplx> out(nodes);
      out.push_back(nodes.front());
      return out;
    }
    const std::size_t half = nodes.size() / 2;
    std::vector<cplx> out;
    out.reserve(half + 2);
    out.push_back(start);
    out.insert(out.end(), nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(half));
    out.push_back(end);
    return out;
  }
};

struct SupportDescription {
  Regime regime = Regime::WeakArc;
  double t = 0;
  double A = 0;  // -1/t
  double l = 1;
  cplx a_minus{0, 0}, a_plus{0, 0};
  std::vector<cplx> loop_samples;  // strong regime, l > 0
  std::vector<cplx> arc_samples;   // weak regime and t = 1
  std::pair<double, double> interval{0, 0};
  double point_mass = 0;  // l = 0
  Plane plane = Plane::Laguerre;
  std::vector<SupportPiece> pieces;
};

struct DensitySample {
  cplx z;
  double rho = 0;
};

struct FillingFractions {
  double loop_fraction = 0;
  double interval_fraction = 0;
};

struct PiecePotential {
  SupportPiece::Kind kind = SupportPiece::Kind::Loop;
  double mean = 0;
  double stdev = 0;
  double min = 0;
  double max = 0;
};

struct EffectivePotentialGap {
  double gamma1 = 0;  // loop
  double gamma2 = 0;  // interval
  double stdev1 = 0;
  double stdev2 = 0;
  double gap = 0;  // gamma1 - gamma2
};

struct CloudComparison {
  double max_dist = 0;
  double mean_dist = 0;
  double loop_count_fraction = 0;
  std::size_t count = 0;
};

/// a_-, a_+ = A + 2 -+ 2 sqrt(A + 1) with the principal root.
inline std::pair<cplx, cplx> endpoints(double A) {
  if (!std::isfinite(A)) throw Error(ErrorKind::DomainError, "endpoints requires finite A");
  const cplx r = 2.0 * std::sqrt(cplx(A + 1, 0));
  return {cplx(A + 2, 0) - r, cplx(A + 2, 0) + r};
}

/// rho_L(z) = |sqrt((z - a_-)(z - a_+)) / z| / (2 pi), with respect to arclength.
inline double density(double A, cplx z) {
  if (z == cplx(0, 0)) throw Error(ErrorKind::OriginSingular, "density at z = 0");
  auto [am, ap] = endpoints(A);
  return std::sqrt(std::abs((z - am) * (z - ap))) / std::abs(z) / (2 * M_PI);
}

/// rho(z) = (1/t) rho_L(z/t).
inline double density_penner(double t, cplx z) { return density(-1 / t, z / t) / t; }

namespace detail {

inline bool is_critical(double t) { return std::abs(t - 1) < 1e-12; }

/// Phi(z) = int_{a_-}^z sqrt((w - a_-)(w - a_+)) / w dw.
///
/// The strong branch is sqrt(z - a_-) sqrt(z - a_+), cut on [a_-, a_+] and
/// positive on (a_+, inf). The weak branch sqrt(a_- - z) sqrt(a_+ - z) cuts
/// along horizontal rays to the right of the endpoints, away from the arc.
/// At A = -1 both endpoints merge and Phi = z - 1 - ln z.
struct PhiModel {
  enum class Branch { Strong, Weak, Critical };

  double t = 1;
  double A = -1;
  cplx am{1, 0}, ap{1, 0};
  Branch branch = Branch::Critical;
  double re0 = 0;

  explicit PhiModel(double t_in) : t(t_in), A(-1 / t_in) {
    if (!(t_in > 0) || !std::isfinite(t_in)) throw Error(ErrorKind::DomainError, "support requires t > 0");
    if (is_critical(t_in)) {
      A = -1;
      branch = Branch::Critical;
      re0 = 1;
      return;
    }
    std::tie(am, ap) = endpoints(A);
    branch = t_in > 1 ? Branch::Strong : Branch::Weak;
    re0 = antiderivative(am, cplx(0, 0)).real();
  }

  cplx R(cplx z) const {
    switch (branch) {
      case Branch::Strong: return std::sqrt(z - am) * std::sqrt(z - ap);
      case Branch::Weak: return std::sqrt(am - z) * std::sqrt(ap - z);
      case Branch::Critical: return z - 1.0;
    }
    return {};
  }

  // R - (A+2) Log(2R + 2z - 2(A+2)) + A Log((2A^2 - 2(A+2) z - 2AR)/z).
  // Each log argument is the product partner of a second expression whose
  // product with it is 16(A+1) times a power of z, so the larger of the two
  // is used to avoid cancellation near z = 0 and z = infinity.
  cplx antiderivative(cplx z, cplx r) const {
    if (branch == Branch::Critical) return z - std::log(z);
    const double c = A + 2;
    const cplx p = 2.0 * r + 2.0 * z - 2.0 * c;
    const cplx q = 2.0 * r - 2.0 * z + 2.0 * c;
    const cplx u = std::abs(p) >= std::abs(q) ? p : -16.0 * (A + 1) / q;
    const cplx dm = 2.0 * A * A - 2.0 * c * z - 2.0 * A * r;
    const cplx dp = 2.0 * A * A - 2.0 * c * z + 2.0 * A * r;
    const cplx v = std::abs(dm) >= std::abs(dp) ? dm / z : 16.0 * z * (A + 1) / dp;
    return r - c * std::log(u) + A * std::log(v);
  }

  /// Re Phi(z). Only the branch of R enters; the logarithms contribute
  /// through their moduli.
  double re_phi(cplx z) const {
    if (branch == Branch::Critical) return z.real() - 1 - std::log(std::abs(z));
    return antiderivative(z, R(z)).real() - re0;
  }

  /// int_{z0}^{z1} R(w)/w dw along the straight segment.
  cplx segment(cplx z0, cplx z1) const {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const cplx mid = 0.5 * (z0 + z1), half = 0.5 * (z1 - z0);
    cplx sum(0, 0);
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        if (x[i] == 0 && sgn > 0) continue;
        const cplx zz = mid + sgn * x[i] * half;
        sum += w[i] * R(zz) / zz;
      }
    }
    return sum * half;
  }
};

/// Cross-check of the closed-form antiderivative against tanh-sinh quadrature
/// of Re int R/w dw from a_- along straight rays, at 16 random points.
inline double antiderivative_check(const PhiModel& m, std::uint64_t seed = 20240601) {
  std::mt19937_64 rng(seed);
  const double scale = std::max(0.2, std::abs(m.ap - m.am));
  std::uniform_real_distribution<double> rad(0.1 * scale, 1.5 * scale);
  std::uniform_real_distribution<double> ang_strong(0.1 * M_PI, 0.9 * M_PI), ang_weak(0.6 * M_PI, 0.9 * M_PI);
  boost::math::quadrature::tanh_sinh<double> ts;
  double worst = 0;
  for (int i = 0; i < 16; ++i) {
    const double phi = m.branch == PhiModel::Branch::Weak ? ang_weak(rng) : ang_strong(rng);
    const cplx dir = std::polar(rad(rng), phi);
    const cplx z = m.am + dir;
    auto f = [&](double u) {
      const cplx w = m.am + u * dir;
      return (m.R(w) / w * dir).real();
    };
    const double quad = ts.integrate(f, 0.0, 1.0);
    worst = std::max(worst, std::abs(quad - m.re_phi(z)) / (1 + std::abs(quad)));
  }
  return worst;
}

/// Follows Phi(z) - Phi(z0) = i sign s through increasing targets s > 0 by
/// Euler prediction along dz/ds = i sign z / R(z) and Newton correction on
/// the segment integral. Steps that fail to converge are split.
inline std::vector<cplx> trace_level(const PhiModel& m, cplx z0, const std::vector<double>& targets, double sign) {
  std::vector<cplx> out;
  out.reserve(targets.size());
  cplx z = z0;
  double s = 0;
  for (double target : targets) {
    const double ds = target - s;
    bool done = false;
    for (int pieces = 1; pieces <= 4096 && !done; pieces *= 2) {
      cplx zz = z;
      bool ok = true;
      const double h = ds / pieces;
      for (int k = 0; k < pieces && ok; ++k) {
        cplx zn = zz + cplx(0, sign * h) * zz / m.R(zz);
        ok = false;
        for (int it = 0; it < 40; ++it) {
          const cplx G = m.segment(zz, zn) - cplx(0, sign * h);
          const cplx dz = G * zn / m.R(zn);
          zn -= dz;
          if (!std::isfinite(zn.real()) || !std::isfinite(zn.imag())) break;
          if (std::abs(dz) <= 1e-15 * std::abs(zn)) {
            ok = true;
            break;
          }
        }
        zz = zn;
      }
      if (ok) {
        z = zz;
        done = true;
      }
    }
    if (!done) throw Error(ErrorKind::TraceFailure, "level-curve continuation stalled at s = " + std::to_string(s));
    s = target;
    out.push_back(z);
  }
  return out;
}

/// Point on the negative real axis where Re Phi equals the level.
inline double seed_on_negative_axis(const PhiModel& m, double level) {
  auto f = [&](double x) { return m.re_phi(cplx(x, 0)) - level; };
  double lo = -1, hi = -0.1;
  const double f_near0 = m.branch == PhiModel::Branch::Weak ? -1.0 : 1.0;  // sign of f as x -> 0-
  while (std::signbit(f(lo)) != std::signbit(-f_near0)) {
    lo *= 2;
    if (lo < -1e6) throw Error(ErrorKind::TraceFailure, "no level crossing on the negative axis");
  }
  while (std::signbit(f(hi)) != std::signbit(f_near0)) {
    hi *= 0.1;
    if (hi > -1e-300) throw Error(ErrorKind::TraceFailure, "no level crossing near the origin");
  }
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

// Direction in which s > 0 leaves the real seed into the upper half-plane.
inline double upward_sign(const PhiModel& m, double x0) {
  const cplx step = cplx(0, 1) * cplx(x0, 0) / m.R(cplx(x0, 0));
  return step.imag() > 0 ? 1.0 : -1.0;
}

inline std::vector<double> even_grid(int n) {
  std::vector<double> tau(static_cast<std::size_t>(2 * n));
  for (int k = 0; k < 2 * n; ++k) tau[static_cast<std::size_t>(k)] = M_PI * (k + 0.5) / n;
  return tau;
}

/// Open piece through the real seed x0 whose ends sit at s = -+S/2, sampled
/// at n points per side. Near a simple end z - a ~ s^(2/3) and the map
/// s ~ theta^3 makes z smooth in theta; a double end (t = 1) has
/// z - a ~ s^(1/2) and uses s ~ theta^4.
inline SupportPiece open_piece(const PhiModel& m, double x0, double S, int n, bool double_ends,
                               SupportPiece::Kind kind, cplx end_lo, cplx end_hi, double level) {
  auto B = [&](double th) {
    return double_ends ? (2 - 3 * std::cos(th) + std::pow(std::cos(th), 3)) / 4
                       : (th - std::sin(th) * std::cos(th)) / M_PI;
  };
  auto dB = [&](double th) {
    return double_ends ? 0.75 * std::pow(std::abs(std::sin(th)), 3) : 2 * std::pow(std::sin(th), 2) / M_PI;
  };
  const std::vector<double> tau = even_grid(n);
  std::vector<double> st(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) st[static_cast<std::size_t>(k)] = S * B(tau[static_cast<std::size_t>(k)]) - S / 2;

  std::vector<double> targets;
  for (double s : st)
    if (s > 0) targets.push_back(s);
  const double sign = upward_sign(m, x0);
  const std::vector<cplx> up = trace_level(m, cplx(x0, 0), targets, sign);

  std::vector<cplx> half(static_cast<std::size_t>(n));
  std::size_t u = 0;
  for (int k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (st[kk] > 0) half[kk] = up[u++];
    else if (st[kk] == 0) half[kk] = cplx(x0, 0);
  }
  for (int k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (st[kk] < 0) half[kk] = std::conj(half[static_cast<std::size_t>(n - 1 - k)]);
  }

  SupportPiece p;
  p.kind = kind;
  p.closed = false;
  p.start = end_lo;
  p.end = end_hi;
  const std::size_t M = 2 * static_cast<std::size_t>(n);
  p.nodes.resize(M);
  p.tangent.resize(M);
  p.weights.resize(M);
  for (std::size_t k = 0; k < M; ++k) {
    const std::size_t j = k < static_cast<std::size_t>(n) ? k : M - 1 - k;
    const cplx z = half[j];
    const double dsdt = S * dB(tau[k]);
    p.nodes[k] = z;
    p.tangent[k] = cplx(0, sign) * z / m.R(z) * dsdt;
    p.weights[k] = 0.5 * dsdt / (2 * M_PI) * (M_PI / n);
  }
  for (const cplx& z : half) {
    if (std::abs(m.re_phi(z) - level) > 1e-8)
      throw Error(ErrorKind::TraceFailure, "traced point leaves the level set");
  }
  return p;
}

/// Closed loop Re Phi = level through x0 < 0, sampled uniformly in s = Im Phi
/// with M points; S is the total change of Im Phi around the loop.
inline SupportPiece closed_loop(const PhiModel& m, double x0, double S, int M, double level) {
  const int n = M / 2;
  std::vector<double> targets;
  for (int k = 1; k <= n; ++k) targets.push_back(S * k / M);
  const double sign = upward_sign(m, x0);
  const std::vector<cplx> up = trace_level(m, cplx(x0, 0), targets, sign);
  const cplx last = up.back();
  if (std::abs(last.imag()) > 1e-9 * std::abs(last) || last.real() <= 0 || last.real() > m.am.real())
    throw Error(ErrorKind::LevelNotClosed, "loop does not return to the positive real axis");

  SupportPiece p;
  p.kind = SupportPiece::Kind::Loop;
  p.closed = true;
  p.nodes.resize(static_cast<std::size_t>(M));
  p.nodes[0] = cplx(x0, 0);
  for (int k = 1; k <= n; ++k) p.nodes[static_cast<std::size_t>(k)] = up[static_cast<std::size_t>(k - 1)];
  p.nodes[static_cast<std::size_t>(n)] = cplx(last.real(), 0);
  for (int k = n + 1; k < M; ++k)
    p.nodes[static_cast<std::size_t>(k)] = std::conj(p.nodes[static_cast<std::size_t>(M - k)]);
  const double dsdt = S / (2 * M_PI);
  for (const cplx& z : p.nodes) {
    if (std::abs(m.re_phi(z) - level) > 1e-8)
      throw Error(ErrorKind::TraceFailure, "traced point leaves the level set");
    p.tangent.push_back(cplx(0, sign) * z / m.R(z) * dsdt);
    p.weights.push_back(S / M / (2 * M_PI));
  }
  return p;
}

/// [a_-, a_+] as x = c - h cos(tau), evenly extended.
inline SupportPiece interval_piece(double A, int n) {
  const double c = A + 2, h = 2 * std::sqrt(A + 1);
  const std::vector<double> tau = even_grid(n);
  SupportPiece p;
  p.kind = SupportPiece::Kind::Interval;
  p.closed = false;
  p.start = cplx(c - h, 0);
  p.end = cplx(c + h, 0);
  for (double th : tau) {
    const double x = c - h * std::cos(th);
    p.nodes.emplace_back(x, 0);
    p.tangent.emplace_back(h * std::sin(th), 0);
    p.weights.push_back(0.5 * h * h * std::pow(std::sin(th), 2) / (2 * M_PI * x) * (M_PI / n));
  }
  return p;
}

// Conjugates every point, reversing the orientation of a symmetric piece.
inline SupportPiece reversed(SupportPiece p) {
  for (auto& z : p.nodes) z = std::conj(z);
  for (auto& z : p.tangent) z = std::conj(z);
  return p;
}

inline SupportPiece scaled(SupportPiece p, double factor) {
  for (auto& z : p.nodes) z *= factor;
  for (auto& z : p.tangent) z *= factor;
  p.start *= factor;
  p.end *= factor;
  return p;
}

}  // namespace detail

/// Points of |z e^(1-z)| = 1, |z| <= 1 at angles 2 pi k / samples, found by
/// solving ln r + 1 - r cos(phi) = 0 for the radius.
inline std::vector<cplx> szego_curve(int samples) {
  if (samples < 8) throw Error(ErrorKind::DomainError, "szego_curve requires samples >= 8");
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double phi = 2 * M_PI * k / samples;
    const double c = std::cos(phi);
    if (k == 0) {
      out.emplace_back(1, 0);
      continue;
    }
    auto f = [&](double r) { return std::log(r) + 1 - r * c; };
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, std::exp(-3.0), 1.0, boost::math::tools::eps_tolerance<double>(52),
                                               iters);
    out.push_back(std::polar(0.5 * (r.first + r.second), phi));
  }
  return out;
}

/// Open arc Re Phi = 0 from a_- to a_+ passing left of the origin, for 0 < t < 1.
/// At t = 1 the arc closes into the Szego curve and the regime is reported as such.
inline SupportDescription weak_arc(double t, int samples = 512) {
  if (!(t > 0) || t > 1 + 1e-12) throw Error(ErrorKind::DomainError, "weak_arc requires 0 < t <= 1");
  if (samples < 16) throw Error(ErrorKind::DomainError, "weak_arc requires samples >= 16");
  detail::PhiModel m(t);
  if (m.branch != detail::PhiModel::Branch::Critical && detail::antiderivative_check(m) > 1e-10)
    throw Error(ErrorKind::QuadratureFailure, "closed-form antiderivative disagrees with path quadrature");
  const double x0 = detail::seed_on_negative_axis(m, 0.0);
  const bool critical = m.branch == detail::PhiModel::Branch::Critical;

  SupportDescription sd;
  sd.regime = critical ? Regime::SzegoCurve : Regime::WeakArc;
  sd.t = t;
  sd.A = m.A;
  sd.l = 1;
  sd.a_minus = m.am;
  sd.a_plus = m.ap;
  sd.pieces.push_back(detail::open_piece(m, x0, 2 * M_PI, samples, critical, SupportPiece::Kind::Arc, m.am, m.ap, 0));
  sd.arc_samples = sd.pieces.back().ordered();
  return sd;
}

/// Loop C_l (Re Phi = -ln l), counterclockwise, and interval [a_-, a_+] for t > 1. At l = 1 the
/// loop passes through a_-. At l = 0 the loop is replaced by a point mass |A|
/// at the origin.
inline SupportDescription strong_loop(double t, double l, int samples = 512) {
  if (!(t > 1) || !std::isfinite(t) || detail::is_critical(t))
    throw Error(ErrorKind::DomainError, "strong_loop requires t > 1");
  if (!(l >= 0 && l <= 1)) throw Error(ErrorKind::DomainError, "strong_loop requires 0 <= l <= 1");
  if (samples < 16 || samples % 2) throw Error(ErrorKind::DomainError, "strong_loop requires even samples >= 16");
  detail::PhiModel m(t);
  SupportDescription sd;
  sd.t = t;
  sd.A = m.A;
  sd.l = l;
  sd.a_minus = m.am;
  sd.a_plus = m.ap;
  sd.interval = {m.am.real(), m.ap.real()};
  if (l == 0) {
    sd.regime = Regime::StrongDeltaInterval;
    sd.point_mass = std::abs(m.A);
    sd.pieces.push_back(detail::interval_piece(m.A, samples / 2));
    return sd;
  }
  if (detail::antiderivative_check(m) > 1e-10)
    throw Error(ErrorKind::QuadratureFailure, "closed-form antiderivative disagrees with path quadrature");
  sd.regime = Regime::StrongLoopInterval;
  const double level = -std::log(l);
  const double x0 = detail::seed_on_negative_axis(m, level);
  // Residue of R(z)/z at the origin: Im Phi changes by 2 pi |A| around the loop.
  const double S = 2 * M_PI * std::abs(m.A);
  if (l == 1) {
    sd.pieces.push_back(detail::reversed(
        detail::open_piece(m, x0, S, samples / 2, false, SupportPiece::Kind::Loop, m.am, m.am, level)));
    const cplx last = sd.pieces.back().nodes[static_cast<std::size_t>(samples / 2 - 1)];
    const double expected = 50 * std::pow(M_PI / samples, 2) * std::abs(m.ap - m.am);
    if (std::abs(last - m.am) > expected)
      throw Error(ErrorKind::LevelNotClosed, "loop at l = 1 does not reach a_-");
  } else {
    sd.pieces.push_back(detail::reversed(detail::closed_loop(m, x0, S, samples, level)));
  }
  sd.loop_samples = sd.pieces.back().ordered();
  sd.pieces.push_back(detail::interval_piece(m.A, samples / 2));
  return sd;
}

/// Dispatches on t: weak arc, Szego curve, or the strong loop and interval.
inline SupportDescription support(double t, double l, int samples = 512) {
  if (t > 1 && !detail::is_critical(t)) return strong_loop(t, l, samples);
  return weak_arc(t, samples);
}

/// Applies z -> t z to every point; masses are unchanged.
inline SupportDescription to_penner_plane(SupportDescription sd) {
  if (sd.plane == Plane::Penner) return sd;
  const double t = sd.t;
  sd.a_minus *= t;
  sd.a_plus *= t;
  for (auto& z : sd.loop_samples) z *= t;
  for (auto& z : sd.arc_samples) z *= t;
  sd.interval = {sd.interval.first * t, sd.interval.second * t};
  for (auto& p : sd.pieces) p = detail::scaled(std::move(p), t);
  sd.plane = Plane::Penner;
  return sd;
}

inline SupportDescription to_laguerre_plane(SupportDescription sd) {
  if (sd.plane == Plane::Laguerre) return sd;
  const double f = 1 / sd.t;
  sd.a_minus *= f;
  sd.a_plus *= f;
  for (auto& z : sd.loop_samples) z *= f;
  for (auto& z : sd.arc_samples) z *= f;
  sd.interval = {sd.interval.first * f, sd.interval.second * f};
  for (auto& p : sd.pieces) p = detail::scaled(std::move(p), f);
  sd.plane = Plane::Laguerre;
  return sd;
}

/// Density at every node of every piece, in the plane of sd.
inline std::vector<DensitySample> density_samples(const SupportDescription& sd) {
  std::vector<DensitySample> out;
  for (const auto& p : sd.pieces) {
    for (const cplx& z : p.ordered()) {
      const double rho = sd.plane == Plane::Penner ? density_penner(sd.t, z) : density(sd.A, z);
      out.push_back({z, rho});
    }
  }
  return out;
}

/// max |Re Phi(z) + ln l| over the curved samples (Laguerre plane).
inline double level_residual(const SupportDescription& sd) {
  const SupportDescription lag = to_laguerre_plane(sd);
  detail::PhiModel m(sd.t);
  const double level = sd.regime == Regime::StrongLoopInterval ? -std::log(sd.l) : 0.0;
  double worst = 0;
  for (const auto& p : lag.pieces) {
    if (p.kind == SupportPiece::Kind::Interval) continue;
    for (const cplx& z : p.nodes) worst = std::max(worst, std::abs(m.re_phi(z) - level));
  }
  return worst;
}

/// Discrete winding number of a closed polyline about c.
inline int winding_number(const std::vector<cplx>& pts, cplx c) {
  double total = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cplx a = pts[i] - c, b = pts[(i + 1) % pts.size()] - c;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}

namespace detail {

// Derivative of periodic samples by the trigonometric interpolant.
inline std::vector<cplx> periodic_derivative(const std::vector<cplx>& z) {
  const std::size_t M = z.size();
  std::vector<cplx> twiddle(M);
  for (std::size_t k = 0; k < M; ++k) twiddle[k] = std::polar(1.0, -2 * M_PI * static_cast<double>(k) / M);
  std::vector<cplx> coef(M, cplx(0, 0));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t k = 0; k < M; ++k) coef[m] += z[k] * twiddle[(m * k) % M];
  std::vector<cplx> out(M, cplx(0, 0));
  for (std::size_t m = 0; m < M; ++m) {
    const long mm = m < M / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(M);
    if (2 * m == M) continue;
    const cplx c = coef[m] * cplx(0, static_cast<double>(mm)) / static_cast<double>(M);
    for (std::size_t k = 0; k < M; ++k) out[k] += c * std::conj(twiddle[(m * k) % M]);
  }
  return out;
}

}  // namespace detail

/// Masses on the curved piece and on the interval. The curved piece is
/// integrated in arclength, rho |z'(tau)| dtau, with z' obtained from the
/// sampled geometry; the interval uses Gauss-Chebyshev nodes of the second
/// kind, which carry the square-root endpoint weight.
inline FillingFractions filling_fractions(const SupportDescription& sd_in) {
  const SupportDescription sd = to_laguerre_plane(sd_in);
  FillingFractions out;
  if (sd.regime == Regime::StrongDeltaInterval) out.loop_fraction = sd.point_mass;
  for (const auto& p : sd.pieces) {
    if (p.kind == SupportPiece::Kind::Interval) continue;
    const std::vector<cplx> dz = detail::periodic_derivative(p.nodes);
    const double dtau = 2 * M_PI / static_cast<double>(p.nodes.size());
    double sum = 0;
    for (std::size_t k = 0; k < p.nodes.size(); ++k) sum += density(sd.A, p.nodes[k]) * std::abs(dz[k]) * dtau;
    out.loop_fraction += p.closed ? sum : 0.5 * sum;
  }
  if (sd.regime == Regime::StrongLoopInterval || sd.regime == Regime::StrongDeltaInterval) {
    const double c = sd.A + 2, h = 2 * std::sqrt(sd.A + 1);
    const int n = 200;
    double sum = 0;
    for (int k = 1; k <= n; ++k) {
      const double th = k * M_PI / (n + 1);
      const double u = std::cos(th), s = std::sin(th);
      const double x = c + h * u;
      // rho dx = [rho / (h sqrt(1 - u^2))] h^2 sqrt(1 - u^2) du
      const double smooth = density(sd.A, cplx(x, 0)) / (h * s);
      sum += M_PI / (n + 1) * s * s * smooth;
    }
    out.interval_fraction = h * h * sum;
  }
  return out;
}

namespace detail {

// Kress weights R_d for int_0^{2 pi} ln(4 sin^2((tau - tau_j)/2)) f(tau) dtau
// on M = 2n equispaced nodes, indexed by d = k - j mod M.
inline std::vector<double> kress_weights(std::size_t M) {
  const std::size_t n = M / 2;
  std::vector<double> R(M);
  for (std::size_t d = 0; d < M; ++d) {
    const double x = M_PI * static_cast<double>(d) / static_cast<double>(n);
    double s = 0;
    for (std::size_t m = 1; m < n; ++m) s += std::cos(static_cast<double>(m) * x) / static_cast<double>(m);
    R[d] = -(2 * M_PI / static_cast<double>(n)) * s -
           (M_PI / static_cast<double>(n * n)) * std::cos(static_cast<double>(n) * x);
  }
  return R;
}

/// int ln|z_j - z'| dmu(z') over the piece itself at each node z_j.
///
/// The log kernel is split as ln|2 sin((tau - tau_j)/2)| (plus the mirror term
/// at -tau_j for evenly extended pieces) and a smooth remainder; the singular
/// part is integrated with the Kress weights and the remainder with the
/// trapezoidal rule.
inline std::vector<double> self_potential(const SupportPiece& p) {
  const std::size_t M = p.nodes.size();
  const double dtau = 2 * M_PI / static_cast<double>(M);
  const std::vector<double> R = kress_weights(M);
  const double offset = p.closed ? 0.0 : 0.5;
  std::vector<double> tau(M), f(M);
  for (std::size_t k = 0; k < M; ++k) {
    tau[k] = dtau * (static_cast<double>(k) + offset);
    f[k] = p.weights[k] / dtau;
  }
  std::vector<double> U(M, 0.0);
  for (std::size_t j = 0; j < M; ++j) {
    const std::size_t jm = M - 1 - j;  // mirror node of an even piece
    double sum = 0;
    for (std::size_t k = 0; k < M; ++k) {
      const double r1 = R[(k + M - j) % M];
      const double s1 = std::abs(2 * std::sin((tau[k] - tau[j]) / 2));
      double K;
      if (p.closed) {
        K = k == j ? std::log(std::abs(p.tangent[j])) : std::log(std::abs(p.nodes[k] - p.nodes[j]) / s1);
        sum += f[k] * (0.5 * r1 + dtau * K);
      } else {
        const double r2 = R[(k + M - jm) % M];
        const double s2 = std::abs(2 * std::sin((tau[k] + tau[j]) / 2));
        if (k == j || k == jm)
          K = std::log(std::abs(p.tangent[j])) - std::log(std::abs(2 * std::sin(tau[j])));
        else
          K = std::log(std::abs(p.nodes[k] - p.nodes[j]) / (s1 * s2));
        sum += f[k] * (0.5 * r1 + 0.5 * r2 + dtau * K);
      }
    }
    U[j] = sum;
  }
  return U;
}

inline double point_potential(const SupportPiece& q, cplx z) {
  double s = 0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * std::log(std::abs(z - q.nodes[k]));
  return s;
}

// Logarithmic potential of the whole support at the nodes of each piece.
inline std::vector<std::vector<double>> log_potentials(const SupportDescription& sd) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < sd.pieces.size(); ++i) {
    std::vector<double> U = self_potential(sd.pieces[i]);
    for (std::size_t j = 0; j < sd.pieces.size(); ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < U.size(); ++k) U[k] += point_potential(sd.pieces[j], sd.pieces[i].nodes[k]);
    }
    out.push_back(std::move(U));
  }
  return out;
}

inline double penner_potential(cplx z) { return z.real() + std::log(std::abs(z)); }

inline void check_consistent(double t, const SupportDescription& sd) {
  if (std::abs(sd.t - t) > 1e-12 * std::max(1.0, t))
    throw Error(ErrorKind::DomainError, "support description was built for a different t");
  if (sd.regime == Regime::StrongDeltaInterval)
    throw Error(ErrorKind::SingularPhase, "point charge at the origin has infinite self-energy");
  double mass = 0;
  for (const auto& p : sd.pieces) mass += p.mass();
  if (std::abs(mass - 1) > 1e-8) throw Error(ErrorKind::QuadratureFailure, "support mass differs from 1");
}

}  // namespace detail

/// E(t) = (1/t) int V rho |dz| - int int ln|z - z'| rho rho |dz| |dz'| over the
/// Penner-plane support, V(z) = Re z + ln|z|.
inline double coulomb_energy(double t, const SupportDescription& sd_in) {
  detail::check_consistent(t, sd_in);
  const SupportDescription sd = to_penner_plane(sd_in);
  const auto U = detail::log_potentials(sd);
  double E = 0;
  for (std::size_t i = 0; i < sd.pieces.size(); ++i) {
    const auto& p = sd.pieces[i];
    for (std::size_t k = 0; k < p.nodes.size(); ++k)
      E += p.weights[k] * (detail::penner_potential(p.nodes[k]) / t - U[i][k]);
  }
  return E;
}

/// -(1/2) ln t - ((t-1)^2 / 2t^2) ln|t-1| + (3/2)(1 - 1/t), with the t = 1 limit 0.
inline double coulomb_energy_closed_form(double t) {
  if (!(t > 0)) throw Error(ErrorKind::DomainError, "coulomb_energy_closed_form requires t > 0");
  const double tail = detail::is_critical(t) ? 0.0 : (t - 1) * (t - 1) / (2 * t * t) * std::log(std::abs(t - 1));
  return -0.5 * std::log(t) - tail + 1.5 * (1 - 1 / t);
}

/// V_eff = V - 2t int ln|z - z'| rho |dz'| at the nodes of each piece.
inline std::vector<PiecePotential> effective_potential(double t, const SupportDescription& sd_in) {
  detail::check_consistent(t, sd_in);
  const SupportDescription sd = to_penner_plane(sd_in);
  const auto U = detail::log_potentials(sd);
  std::vector<PiecePotential> out;
  for (std::size_t i = 0; i < sd.pieces.size(); ++i) {
    const auto& p = sd.pieces[i];
    std::vector<double> v(p.nodes.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = detail::penner_potential(p.nodes[k]) - 2 * t * U[i][k];
    PiecePotential pp;
    pp.kind = p.kind;
    pp.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - pp.mean) * (x - pp.mean);
    pp.stdev = std::sqrt(var / static_cast<double>(v.size()));
    pp.min = *std::min_element(v.begin(), v.end());
    pp.max = *std::max_element(v.begin(), v.end());
    out.push_back(pp);
  }
  return out;
}

/// V_eff on the loop minus V_eff on the interval. Throws QuadratureFailure if
/// V_eff varies along either piece by more than flat_tol (standard deviation).
inline EffectivePotentialGap effective_potential_gap(double t, double l, const SupportDescription& sd,
                                                     double flat_tol = 1e-4) {
  if (sd.regime != Regime::StrongLoopInterval)
    throw Error(sd.regime == Regime::StrongDeltaInterval ? ErrorKind::SingularPhase : ErrorKind::DomainError,
                "effective_potential_gap requires the strong regime with l > 0");
  if (std::abs(sd.l - l) > 1e-12) throw Error(ErrorKind::DomainError, "support description was built for a different l");
  const auto pieces = effective_potential(t, sd);
  EffectivePotentialGap out;
  for (const auto& p : pieces) {
    if (p.kind == SupportPiece::Kind::Interval) {
      out.gamma2 = p.mean;
      out.stdev2 = p.stdev;
    } else {
      out.gamma1 = p.mean;
      out.stdev1 = p.stdev;
    }
  }
  out.gap = out.gamma1 - out.gamma2;
  if (out.stdev1 > flat_tol || out.stdev2 > flat_tol)
    throw Error(ErrorKind::QuadratureFailure, "effective potential is not constant on the support");
  return out;
}

namespace detail {

inline double segment_distance(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0) return std::abs(p - a);
  const double u = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + u * ab));
}

inline double polyline_distance(cplx p, const std::vector<cplx>& line) {
  if (line.size() == 1) return std::abs(p - line[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, segment_distance(p, line[i], line[i + 1]));
  return best;
}

}  // namespace detail

/// Polyline with at least min_vertices vertices, refining every edge equally.
inline std::vector<cplx> densify(const std::vector<cplx>& line, std::size_t min_vertices = 2048) {
  if (line.size() < 2 || line.size() >= min_vertices) return line;
  const std::size_t edges = line.size() - 1;
  const std::size_t per = (min_vertices - 1 + edges - 1) / edges;
  std::vector<cplx> out;
  out.reserve(edges * per + 1);
  for (std::size_t i = 0; i < edges; ++i)
    for (std::size_t k = 0; k < per; ++k)
      out.push_back(line[i] + (line[i + 1] - line[i]) * (static_cast<double>(k) / static_cast<double>(per)));
  out.push_back(line.back());
  return out;
}

/// Symmetric Hausdorff distance between two polylines, measured from the
/// vertices of each to the edges of the other.
inline double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double h = 0;
  for (const cplx& p : a) h = std::max(h, detail::polyline_distance(p, b));
  for (const cplx& p : b) h = std::max(h, detail::polyline_distance(p, a));
  return h;
}

/// Polylines of each support piece; the point mass of the l = 0 regime is a
/// single vertex at the origin.
inline std::vector<std::pair<SupportPiece::Kind, std::vector<cplx>>> support_polylines(const SupportDescription& sd,
                                                                                      std::size_t min_vertices = 2048) {
  std::vector<std::pair<SupportPiece::Kind, std::vector<cplx>>> out;
  if (sd.regime == Regime::StrongDeltaInterval) out.push_back({SupportPiece::Kind::Loop, {cplx(0, 0)}});
  for (const auto& p : sd.pieces) out.push_back({p.kind, densify(p.ordered(), min_vertices)});
  return out;
}

/// Distances from each saddle (Penner plane) to the limiting support, and the
/// fraction of saddles nearest to the loop, arc or point mass rather than the
/// interval.
inline CloudComparison cloud_vs_theory(const ZeroSet& zs, const SupportDescription& sd_in) {
  const SupportDescription sd = to_penner_plane(sd_in);
  const auto lines = support_polylines(sd);
  CloudComparison out;
  std::size_t on_loop = 0;
  double total = 0;
  for (const auto& p : zs.scaled) {
    const cplx z(p.re.convert_to<double>(), p.im.convert_to<double>());
    double best = std::numeric_limits<double>::infinity();
    SupportPiece::Kind nearest = SupportPiece::Kind::Loop;
    for (const auto& [kind, line] : lines) {
      const double d = detail::polyline_distance(z, line);
      if (d < best) {
        best = d;
        nearest = kind;
      }
    }
    out.max_dist = std::max(out.max_dist, best);
    total += best;
    if (nearest != SupportPiece::Kind::Interval) ++on_loop;
  }
  out.count = zs.scaled.size();
  if (out.count) {
    out.mean_dist = total / static_cast<double>(out.count);
    out.loop_count_fraction = static_cast<double>(on_loop) / static_cast<double>(out.count);
  }
  return out;
}

}  // namespace penner
