#include "penner/asymptotics.hpp"
#include "penner/spectral.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace penner;

namespace {

double energy_closed_form(double t) {
  return -0.5 * std::log(t) - (t - 1) * (t - 1) / (2 * t * t) * std::log(std::abs(t - 1)) + 1.5 * (1 - 1 / t);
}

// Re of the integral of sqrt((w - a-)(w - a+))/w from a- to z along a straight
// ray, with the root continued from the positive value on (a+, inf).
double re_phi_by_ray(double t, cplx z) {
  auto [am, ap] = endpoints(-1 / t);
  const cplx dir = z - am;
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(
      [&](double u) {
        const cplx w = am + u * dir;
        return (std::sqrt(w - am) * std::sqrt(w - ap) / w * dir).real();
      },
      0.0, 1.0);
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::DomainError;
}

}  // namespace

TEST(Endpoints, Examples) {
  auto [m1, p1] = endpoints(-1);
  EXPECT_EQ(m1, cplx(1, 0));
  EXPECT_EQ(p1, cplx(1, 0));
  auto [m0, p0] = endpoints(0);
  EXPECT_NEAR(std::abs(m0), 0.0, 1e-15);
  EXPECT_NEAR(p0.real(), 4.0, 1e-15);
  auto [mh, ph] = endpoints(-0.5);
  EXPECT_NEAR(mh.real(), 1.5 - std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(ph.real(), 1.5 + std::sqrt(2.0), 1e-15);
}

TEST(Endpoints, ConjugateInWeakRegime) {
  for (double A : {-1.2, -2.0, -7.5}) {
    auto [am, ap] = endpoints(A);
    EXPECT_EQ(ap, std::conj(am));
    EXPECT_LT(am.imag(), 0);
  }
}

TEST(Density, Examples) {
  EXPECT_NEAR(density(0, cplx(2, 0)), 1 / (2 * M_PI), 1e-15);
  EXPECT_EQ(density(-1, cplx(1, 0)), 0.0);
  EXPECT_EQ(density(-0.5, endpoints(-0.5).first), 0.0);
  EXPECT_EQ(kind_of([] { density(-0.5, cplx(0, 0)); }), ErrorKind::OriginSingular);
  EXPECT_NEAR(density_penner(2, cplx(0.5, 0.3)), density(-0.5, cplx(0.25, 0.15)) / 2, 1e-16);
}

TEST(Density, ArcsineLawNormalization) {
  // A = 0: rho = sqrt(x(4 - x))/(2 pi x) on [0, 4] integrates to 1
  boost::math::quadrature::tanh_sinh<double> ts;
  double mass = ts.integrate([](double x) { return density(0, cplx(x, 0)); }, 0.0, 4.0);
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Szego, KnownPointsAndResidual) {
  auto pts = szego_curve(256);
  EXPECT_EQ(pts[0], cplx(1, 0));
  // z = -r with r e^r = 1/e
  const double r = boost::math::lambert_w0(std::exp(-1.0));
  EXPECT_NEAR(pts[128].real(), -r, 1e-14);
  EXPECT_NEAR(pts[128].real(), -0.2784645, 1e-7);
  for (const cplx& z : pts) {
    EXPECT_LT(std::abs(std::abs(z * std::exp(1.0 - z)) - 1), 1e-12);
    EXPECT_LE(std::abs(z), 1 + 1e-15);
  }
}

TEST(StrongLoop, LevelSetResidualAgainstRayQuadrature) {
  auto sd = strong_loop(2, 0.5, 256);
  EXPECT_LT(level_residual(sd), 1e-8);
  for (std::size_t k = 3; k < sd.loop_samples.size(); k += 17) {
    const cplx z = sd.loop_samples[k];
    if (std::abs(z.imag()) < 1e-3) continue;  // rays from a- along the real axis hit the cut
    EXPECT_NEAR(re_phi_by_ray(2, z), -std::log(0.5), 1e-8) << z;
  }
}

TEST(StrongLoop, ClosedWindsOnceAndIsSymmetric) {
  for (double l : {0.05, 0.5, 1.0}) {
    auto sd = strong_loop(2, l, 256);
    EXPECT_EQ(winding_number(sd.loop_samples, cplx(0, 0)), 1) << l;
    const auto& nodes = sd.pieces[0].nodes;
    for (const cplx& z : nodes) {
      double best = 1e300;
      for (const cplx& w : nodes) best = std::min(best, std::abs(w - std::conj(z)));
      EXPECT_LT(best, 1e-10);
    }
  }
}

TEST(StrongLoop, TouchesAMinusAtLEqualsOne) {
  auto sd = strong_loop(2, 1, 256);
  EXPECT_EQ(sd.loop_samples.front(), sd.a_minus);
  EXPECT_EQ(sd.loop_samples.back(), sd.a_minus);
  EXPECT_LT(std::abs(sd.loop_samples[1] - sd.a_minus), 1e-3);
  EXPECT_LT(level_residual(sd), 1e-8);
}

TEST(StrongLoop, ShrinksAsLGoesToZero) {
  double prev = 1e300;
  for (double l : {0.9, 0.5, 0.1, 0.01, 1e-4}) {
    auto sd = strong_loop(2, l, 64);
    double r = 0;
    for (const cplx& z : sd.loop_samples) r = std::max(r, std::abs(z));
    EXPECT_LT(r, prev) << l;
    prev = r;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(WeakArc, SymmetricWithConjugateEndpoints) {
  auto sd = weak_arc(0.5, 256);
  EXPECT_EQ(sd.regime, Regime::WeakArc);
  EXPECT_EQ(sd.arc_samples.front(), sd.a_minus);
  EXPECT_EQ(sd.arc_samples.back(), sd.a_plus);
  const auto& nodes = sd.pieces[0].nodes;
  for (const cplx& z : nodes) {
    double best = 1e300;
    for (const cplx& w : nodes) best = std::min(best, std::abs(w - std::conj(z)));
    EXPECT_LT(best, 1e-10);
  }
  EXPECT_LT(level_residual(sd), 1e-8);
  // passes left of the origin
  double min_re = 0;
  for (const cplx& z : sd.arc_samples) min_re = std::min(min_re, z.real());
  EXPECT_LT(min_re, 0);
}

TEST(WeakArc, ClosesOntoSzegoCurve) {
  // endpoint gap 4 sqrt|A+1| and Hausdorff distance both shrink like sqrt(1 - t)
  const auto sz = densify(szego_curve(4096));
  std::vector<double> h;
  for (double t : {0.99, 0.999}) {
    auto sd = weak_arc(t, 512);
    const double A = -1 / t;
    EXPECT_NEAR(std::abs(sd.a_plus - sd.a_minus), 4 * std::sqrt(std::abs(A + 1)), 1e-12);
    EXPECT_NEAR(std::abs(sd.a_plus - 1.0), 2 * std::sqrt(std::abs(A + 1)), 2 * (1 - t));
    h.push_back(hausdorff_distance(densify(sd.arc_samples), sz));
  }
  EXPECT_NEAR(h[0] / h[1], std::sqrt(10.0), 0.3);
}

TEST(WeakArc, EqualsSzegoCurveAtCriticalPoint) {
  auto sd = weak_arc(1, 512);
  EXPECT_EQ(sd.regime, Regime::SzegoCurve);
  for (const cplx& z : sd.arc_samples) EXPECT_LT(std::abs(std::abs(z * std::exp(1.0 - z)) - 1), 1e-12);
  const auto sz = densify(szego_curve(4096));
  double worst = 0;
  for (const cplx& z : sd.arc_samples) worst = std::max(worst, detail::polyline_distance(z, sz));
  EXPECT_LT(worst, 1e-3);
  EXPECT_LT(hausdorff_distance(densify(sd.arc_samples), sz), 1e-2);
}

TEST(FillingFractions, StrongRegime) {
  for (auto [t, l] : {std::pair{2.0, 0.5}, std::pair{4.0, 1.0}, std::pair{1.5, 1.0}, std::pair{1.5, 0.05}}) {
    auto ff = filling_fractions(strong_loop(t, l, 256));
    EXPECT_NEAR(ff.loop_fraction, 1 / t, 1e-4) << t << " " << l;
    EXPECT_NEAR(ff.interval_fraction, 1 - 1 / t, 1e-4) << t << " " << l;
  }
}

TEST(FillingFractions, WeakAndPointMass) {
  for (double t : {0.5, 0.9}) {
    auto ff = filling_fractions(weak_arc(t, 256));
    EXPECT_NEAR(ff.loop_fraction + ff.interval_fraction, 1.0, 1e-6) << t;
  }
  auto sd = strong_loop(1.5, 0, 256);
  EXPECT_EQ(sd.regime, Regime::StrongDeltaInterval);
  EXPECT_NEAR(sd.point_mass, 1 / 1.5, 1e-15);
  auto ff = filling_fractions(sd);
  EXPECT_NEAR(ff.interval_fraction, 1 - 1 / 1.5, 1e-10);
}

TEST(FillingFractions, PennerPlaneGivesSameMasses) {
  auto sd = strong_loop(2, 0.5, 256);
  auto a = filling_fractions(sd);
  auto b = filling_fractions(to_penner_plane(sd));
  EXPECT_NEAR(a.loop_fraction, b.loop_fraction, 1e-14);
  EXPECT_NEAR(a.interval_fraction, b.interval_fraction, 1e-14);
}

TEST(Coulomb, MatchesClosedForm) {
  EXPECT_NEAR(coulomb_energy(2, strong_loop(2, 1, 256)), 0.75 - 0.5 * std::log(2.0), 1e-6);
  EXPECT_NEAR(coulomb_energy(0.5, weak_arc(0.5, 256)), energy_closed_form(0.5), 1e-6);
  EXPECT_NEAR(coulomb_energy(4, strong_loop(4, 0.3, 256)), energy_closed_form(4), 1e-6);
  EXPECT_NEAR(coulomb_energy(1, weak_arc(1, 256)), 0.0, 1e-6);
}

TEST(Coulomb, IndependentOfL) {
  const double e1 = coulomb_energy(2, strong_loop(2, 1, 256));
  const double e2 = coulomb_energy(2, strong_loop(2, 0.5, 256));
  EXPECT_NEAR(e1, e2, 1e-6);
}

TEST(Coulomb, PointChargeIsSingular) {
  EXPECT_EQ(kind_of([] { coulomb_energy(2, strong_loop(2, 0, 64)); }), ErrorKind::SingularPhase);
  EXPECT_EQ(kind_of([] { coulomb_energy(3, strong_loop(2, 0.5, 64)); }), ErrorKind::DomainError);
}

TEST(EffectivePotential, GapAndLevels) {
  const double t = 2;
  auto g1 = effective_potential_gap(t, 1, strong_loop(t, 1, 256));
  EXPECT_NEAR(g1.gap, 0.0, 1e-4);
  auto g05 = effective_potential_gap(t, 0.5, strong_loop(t, 0.5, 256));
  EXPECT_NEAR(g05.gap, -2 * std::log(0.5), 1e-4);
  for (const auto& g : {g1, g05}) {
    EXPECT_NEAR(g.gamma2, 3 - 2 * std::log(2.0), 1e-4);
    EXPECT_LT(g.stdev1, 1e-4);
    EXPECT_LT(g.stdev2, 1e-4);
  }
}

TEST(EffectivePotential, GeneralT) {
  const double t = 1.5, l = 0.3;
  auto g = effective_potential_gap(t, l, strong_loop(t, l, 256));
  EXPECT_NEAR(g.gamma2, (2 * t - 1) - t * std::log(t) - (t - 1) * std::log(t - 1), 1e-4);
  EXPECT_NEAR(g.gap, -t * std::log(l), 1e-4);
}

TEST(EffectivePotential, FlatOnWeakArc) {
  auto v = effective_potential(0.5, weak_arc(0.5, 256));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_LT(v[0].stdev, 1e-4);
}

TEST(Geometry, WindingAndHausdorff) {
  std::vector<cplx> circle;
  for (int k = 0; k < 64; ++k) circle.push_back(std::polar(1.0, 2 * M_PI * k / 64));
  EXPECT_EQ(winding_number(circle, 0), 1);
  EXPECT_EQ(winding_number(circle, 3), 0);
  std::vector<cplx> a{{0, 0}, {1, 0}}, b{{0, 0.5}, {1, 0.5}};
  EXPECT_NEAR(hausdorff_distance(a, b), 0.5, 1e-15);
  EXPECT_GE(densify(a).size(), 2048u);
}

TEST(Cloud, StrongRegimeClustersOnLoopAndInterval) {
  PrecisionContext ctx(60);
  ScopedPrecision guard(ctx);
  auto seq = CouplingSequence::km_family(Real(1.5), Real(1), Real(0.5));
  auto sd = strong_loop(1.5, 1, 1024);
  std::vector<double> mean;
  for (int n : {20, 80}) {
    auto zs = saddle_points(seq.g(n), n, ctx);
    auto c = cloud_vs_theory(zs, sd);
    if (n == 80) {
      EXPECT_LT(c.max_dist, 0.05);
      EXPECT_NEAR(c.loop_count_fraction, 2.0 / 3, 0.05);
    }
    mean.push_back(c.mean_dist);
  }
  EXPECT_LT(mean[1], mean[0]);
}

TEST(Cloud, WeakRegimeClustersOnArc) {
  PrecisionContext ctx(60);
  ScopedPrecision guard(ctx);
  auto sd = weak_arc(0.9, 1024);
  std::vector<double> mean;
  for (int n : {20, 80}) {
    auto zs = saddle_points(Real(0.9) / n, n, ctx);
    auto c = cloud_vs_theory(zs, sd);
    if (n == 80) EXPECT_LT(c.max_dist, 0.05);
    mean.push_back(c.mean_dist);
  }
  EXPECT_LT(mean[1], mean[0]);
}

TEST(Cloud, CondensateNearOrigin) {
  // c l^n = 0.05^80 sits ~104 digits below the integer part of 1/g
  PrecisionContext ctx(200);
  ScopedPrecision guard(ctx);
  auto seq = CouplingSequence::km_family(Real(1.5), Real(0.05), Real(1));
  auto zs = saddle_points(seq.g(80), 80, ctx);
  auto c = cloud_vs_theory(zs, strong_loop(1.5, 0.05, 1024));
  EXPECT_LT(c.max_dist, 0.05);
  int near = 0;
  for (const auto& z : zs.scaled) near += abs(z) < Real(0.1);
  EXPECT_GE(near / 80.0, 1 / 1.5);
}
