#include "penner/asymptotics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace penner;

namespace {

const PrecisionContext ctx(50);

double d(const Real& x) { return x.convert_to<double>(); }

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::DomainError;
}

// -B_10/(10*8) n^{-10} t^8 ((1-t)^{-8} - 1), the first term left out at K = 4
double first_dropped(int n, double t) {
  const double b10 = 5.0 / 66.0;
  return std::abs(b10 / 80.0 * std::pow(n, -10.0) * std::pow(t, 8) * (std::pow(std::abs(1 - t), -8) - 1));
}

}  // namespace

TEST(Osc, WeakAndStrongBranches) {
  ScopedPrecision guard(ctx);
  EXPECT_NEAR(d(osc_contribution(1, Real(2) / 3, ctx)), std::log(2.0), 1e-15);
  EXPECT_EQ(kind_of([&] { osc_contribution(2, Real(2) / 3, ctx); }), ErrorKind::SinZero);
  EXPECT_NEAR(d(osc_contribution(4, Real(8), ctx)), std::log(2.0) / 32, 1e-15);
  EXPECT_EQ(kind_of([&] { osc_contribution(4, Real(1), ctx); }), ErrorKind::CriticalT);
}

TEST(Per, PlanarTermsAndTruncation) {
  ScopedPrecision guard(ctx);
  EXPECT_NEAR(d(planar_perturbative(Real(0.5))), 0.5 * std::log(2.0) - 0.25, 1e-15);
  EXPECT_NEAR(d(planar_perturbative(Real(2))), 0.5, 1e-15);
  // K = 3 minus K = 2 is the B_6 term: -(1/42)/(6*4) n^{-6} t^4 ((1-t)^{-4} - 1)
  Real diff = per_contribution(10, Real(0.5), 3, ctx) - per_contribution(10, Real(0.5), 2, ctx);
  double b6 = -(1.0 / 42) / 24 * std::pow(10.0, -6) * std::pow(0.5, 4) * (std::pow(0.5, -4) - 1);
  EXPECT_NEAR(d(diff), b6, 1e-22);
  EXPECT_EQ(kind_of([&] { per_contribution(10, Real(1), 3, ctx); }), ErrorKind::CriticalT);
}

TEST(Decomposition, ThooftStrongCoupling) {
  PrecisionContext c60(60);
  ScopedPrecision guard(c60);
  Real t = Real(3) / 2;
  std::vector<double> res;
  for (int n : {20, 40, 80}) {
    auto b = breakdown(n, t / n, 4, c60);
    double r = std::abs(d(b.residual));
    EXPECT_LE(r, 10 * first_dropped(n, 1.5)) << n;
    res.push_back(r);
  }
  EXPECT_LE(res[2], 1e-8);
  EXPECT_NEAR(std::log2(res[1] / res[2]), 10.0, 0.5);
}

TEST(Decomposition, WeakCouplingAlongKMSequence) {
  // 't Hooft t = 1/2 puts every n on a pole; g_n = 1/(2n + 2^{-n}) has n g_n -> 1/2
  auto seq = CouplingSequence::km_family(Real(0.5), Real(0.5), Real(1));
  std::vector<double> res;
  for (int n : {20, 40, 80}) {
    PrecisionContext local(seq.required_digits(n, 60));
    ScopedPrecision guard(local);
    auto b = breakdown(n, seq.g(n), 4, local);
    double r = std::abs(d(b.residual));
    EXPECT_LE(r, 10 * first_dropped(n, d(b.t))) << n;
    res.push_back(r);
  }
  EXPECT_LE(res[2], 1e-8);
  EXPECT_NEAR(std::log2(res[1] / res[2]), 10.0, 0.5);
}

TEST(Planar, ClosedFormValues) {
  ScopedPrecision guard(ctx);
  EXPECT_NEAR(d(planar_free_energy({Real(0.5), Real(1)}, ctx)), 0.5 * std::log(2.0) - 0.25, 1e-15);
  EXPECT_NEAR(d(planar_free_energy({Real(2), Real(1)}, ctx)), 0.5, 1e-15);
  EXPECT_NEAR(d(planar_free_energy({Real(2), Real(0.5)}, ctx)), 0.5 + 0.5 * std::log(0.5), 1e-15);
  EXPECT_EQ(kind_of([&] { planar_free_energy({Real(2), Real(0)}, ctx); }), ErrorKind::SingularPhase);
  EXPECT_EQ(kind_of([&] { planar_free_energy({Real(1), Real(0.5)}, ctx); }), ErrorKind::CriticalT);
  EXPECT_NEAR(d(planar_free_energy({Real(1), Real(0.5)}, ctx, true)), std::log(0.5) + 0.25, 1e-15);
}

TEST(Planar, RoutesAgreeOnRandomPoints) {
  ScopedPrecision guard(ctx);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ut(0.05, 5.0), ul(0.001, 1.0);
  for (int i = 0; i < 100; ++i) {
    PhasePoint p{Real(ut(rng)), Real(ul(rng))};
    if (p.t == 1) continue;
    EXPECT_LE(abs(planar_closed_form(p) - planar_via_holomorphic(p)), Real(1e-25));
  }
}

TEST(Planar, KMSequenceConverges) {
  auto seq = CouplingSequence::km_family(Real(2), Real(0.5), Real(1));
  std::vector<double> err;
  for (int n : {25, 50, 100, 200}) {
    PrecisionContext local(seq.required_digits(n, 50));
    ScopedPrecision guard(local);
    Real f = free_energy_exact(n, seq.g(n), local).value;
    err.push_back(std::abs(d(f - planar_free_energy({Real(2), Real(0.5)}, local))));
  }
  EXPECT_LE(err.back(), 1e-2);
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], err[i - 1]);
}

TEST(Transition, JumpEqualsLogL) {
  for (double l : {0.25, 0.5, 0.75, 1.0}) {
    auto td = transition_diagnostics(Real(l), Real(0.01), ctx);
    EXPECT_NEAR(d(td.jump_in_dFdt), std::log(l), 1e-3) << l;
  }
}

TEST(Transition, ContinuousAtLEqualsOne) {
  auto td = transition_diagnostics(Real(1), Real(0.01), ctx);
  EXPECT_TRUE(td.is_continuous_at_l1);
  ASSERT_EQ(td.second_derivative.size(), 3u);
  EXPECT_GT(abs(td.second_derivative[2]), abs(td.second_derivative[1]));
  EXPECT_GT(abs(td.second_derivative[1]), abs(td.second_derivative[0]));
  double h = d(td.probe_h.back());
  EXPECT_LE(std::abs(d(td.value_gap)), 10 * h * std::abs(std::log(h)));
  EXPECT_FALSE(transition_diagnostics(Real(0.5), Real(0.01), ctx).is_continuous_at_l1);
}

TEST(KMLimit, FamilyRecoversL) {
  auto est = km_limit_estimate(CouplingSequence::km_family(Real(2), Real(0.5), Real(1)), 500, ctx);
  EXPECT_NEAR(d(est.l_hat), 0.5, 0.01);
  EXPECT_NEAR(d(est.t_hat), 2.0, 0.01);
  EXPECT_TRUE(est.converged);
  EXPECT_FALSE(est.hits_zero);
}

TEST(KMLimit, RationalThooftSubsequences) {
  ScopedPrecision guard(ctx);
  auto seq = CouplingSequence::thooft(Real(3) / 2);
  auto zero = km_limit_estimate(seq, 300, ctx, 3, 3);
  EXPECT_TRUE(zero.hits_zero);
  EXPECT_EQ(zero.l_hat, 0);
  auto one = km_limit_estimate(seq, 301, ctx, 3, 1);
  EXPECT_FALSE(one.hits_zero);
  EXPECT_NEAR(d(one.l_hat), 1.0, 0.01);
}

TEST(KMLimit, IrrationalThooftOscillation) {
  ScopedPrecision guard(ctx);
  Real t = sqrt(Real(2));
  EXPECT_GT(thooft_oscillation_spread(t, 2000, ctx), Real(0.01));
  // |sin(pi n/t)|^{1/n} itself settles near 1 for this badly approximable t
  auto est = km_limit_estimate(CouplingSequence::thooft(t), 2000, ctx);
  EXPECT_NEAR(d(est.l_hat), 1.0, 0.02);
}

TEST(Euler, KnownValues) {
  EXPECT_EQ(euler_characteristic(1, 1), Rational(-1, 12));
  EXPECT_EQ(euler_characteristic(0, 3), Rational(1, 6));
  EXPECT_EQ(euler_characteristic(0, 4), Rational(-1, 24));
  EXPECT_THROW(euler_characteristic(0, 2), Error);
  EXPECT_THROW(euler_characteristic(1, 0), Error);
}

TEST(Euler, ExpansionCoefficientsMatch) {
  EXPECT_EQ(topological_coefficient(1, 1), Rational(1, 12));
  for (int k = 0; k <= 3; ++k) {
    for (int s = 1; s <= 5; ++s) {
      if (2 - 2 * k - s >= 0) continue;
      EXPECT_EQ(topological_coefficient(k, s), Rational(-euler_characteristic(k, s))) << k << " " << s;
    }
  }
}

TEST(Topological, PlanarAtOne) {
  auto v = topological_expansion_positive(Real(1), 1000000, 0, ctx);
  EXPECT_NEAR(d(v.value), -2 * std::log(2.0) + 1.25, 1e-15);
}

TEST(Topological, MatchesExactPositiveCoupling) {
  ScopedPrecision guard(ctx);
  const int n = 20;
  Real t(0.3);
  auto v = topological_expansion_positive(t, n, 3, ctx);
  Real exact = -z_positive(n, t / n, ctx).log_modulus / (n * n);
  EXPECT_LE(abs(v.value - exact), v.dropped_term);
}
