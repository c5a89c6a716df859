#include "penner/bernoulli.hpp"
#include "penner/laguerre.hpp"

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <gtest/gtest.h>

#include <complex>

using namespace penner;

namespace {

double d(const Real& x) { return x.convert_to<double>(); }

struct QComplex {
  Rational re, im;
};

QComplex mul(const QComplex& a, const QComplex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

// Explicit binomial sum in exact rational arithmetic.
QComplex laguerre_binomial_sum(int n, const Rational& alpha, const QComplex& z) {
  QComplex total{0, 0};
  QComplex minus_z_pow{1, 0};  // (-z)^k
  Rational k_fact = 1;
  for (int k = 0; k <= n; ++k) {
    // binom(n + alpha, n - k)
    Rational top = Rational(n) + alpha;
    Rational b = 1;
    for (int j = 0; j < n - k; ++j) b *= (top - j) / Rational(j + 1);
    Rational c = b / k_fact;
    total.re += c * minus_z_pow.re;
    total.im += c * minus_z_pow.im;
    minus_z_pow = mul(minus_z_pow, QComplex{-z.re, -z.im});
    k_fact *= (k + 1);
  }
  return total;
}

using Big = boost::multiprecision::cpp_bin_float_50;

// Zeros as eigenvalues of the companion matrix of the monic polynomial.
std::vector<std::complex<Big>> companion_zeros(int n, const Rational& alpha) {
  std::vector<Rational> coef(static_cast<std::size_t>(n + 1));
  Rational k_fact = 1;
  for (int k = 0; k <= n; ++k) {
    Rational top = Rational(n) + alpha;
    Rational b = 1;
    for (int j = 0; j < n - k; ++j) b *= (top - j) / Rational(j + 1);
    coef[static_cast<std::size_t>(k)] = b / k_fact * (k % 2 ? -1 : 1);
    k_fact *= (k + 1);
  }
  Eigen::Matrix<Big, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  m.setZero();
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) {
    Rational q = -coef[static_cast<std::size_t>(i)] / coef[static_cast<std::size_t>(n)];
    m(i, n - 1) = Big(boost::multiprecision::numerator(q).str()) / Big(boost::multiprecision::denominator(q).str());
  }
  Eigen::EigenSolver<decltype(m)> solver(m, false);
  std::vector<std::complex<Big>> out;
  for (int i = 0; i < n; ++i) out.push_back(solver.eigenvalues()(i));
  return out;
}

}  // namespace

TEST(LaguerreEval, LowDegree) {
  ScopedPrecision guard(50);
  LaguerreSpec s1{1, Real(-2.5)};
  EXPECT_NEAR(d(laguerre_eval(s1, Complex(0)).re), -1.5, 1e-40);
  LaguerreSpec s2{2, Real(-2.5)};
  EXPECT_NEAR(d(laguerre_eval(s2, Complex(0)).re), 0.375, 1e-40);
}

TEST(LaguerreEval, MatchesBinomialSum) {
  ScopedPrecision guard(60);
  for (int n : {1, 2, 5, 8, 10}) {
    Rational alpha(-73, 10);
    QComplex zq{2, 1};
    QComplex exact = laguerre_binomial_sum(n, alpha, zq);
    LaguerreSpec spec{n, Real(-73) / 10};
    Complex v = laguerre_eval(spec, Complex(Real(2), Real(1)));
    EXPECT_LE(abs(v.re - to_real(exact.re)), Real(1e-25)) << n;
    EXPECT_LE(abs(v.im - to_real(exact.im)), Real(1e-25)) << n;
  }
}

TEST(LaguerreZeros, LinearAndQuadratic) {
  PrecisionContext ctx(50);
  ScopedPrecision guard(ctx);
  auto z1 = laguerre_zeros({1, Real(-2.5)}, ctx);
  ASSERT_EQ(z1.zeros.size(), 1u);
  EXPECT_NEAR(d(z1.zeros[0].re), -1.5, 1e-40);

  auto z2 = laguerre_zeros({2, Real(-2.5)}, ctx);
  ASSERT_EQ(z2.zeros.size(), 2u);
  EXPECT_NEAR(d(z2.zeros[0].re), -0.5, 1e-20);
  EXPECT_NEAR(d(z2.zeros[0].im), -std::sqrt(0.5), 1e-20);
  EXPECT_NEAR(d(z2.zeros[1].im), std::sqrt(0.5), 1e-20);
}

TEST(LaguerreZeros, MatchCompanionMatrix) {
  PrecisionContext ctx(60);
  ScopedPrecision guard(ctx);
  for (auto [n, num, den] : {std::tuple{3, -42, 10}, std::tuple{5, -73, 10}, std::tuple{8, -113, 10}}) {
    auto zs = laguerre_zeros({n, Real(num) / den}, ctx);
    auto oracle = companion_zeros(n, Rational(num, den));
    for (const auto& z : zs.zeros) {
      double best = 1e300;
      for (const auto& o : oracle) {
        Big dr = o.real() - Big(z.re.str(60));
        Big di = o.imag() - Big(z.im.str(60));
        best = std::min(best, static_cast<double>(sqrt(dr * dr + di * di)));
      }
      EXPECT_LT(best, 1e-20) << "n = " << n;
    }
  }
}

TEST(LaguerreZeros, SumRuleAndConjugateSymmetry) {
  PrecisionContext ctx(80);
  ScopedPrecision guard(ctx);
  for (int n : {6, 17, 40}) {
    Real alpha = Real(-1) - Real(n) / Real(1.5) - Real(0.3);
    auto zs = laguerre_zeros({n, alpha}, ctx);
    ASSERT_EQ(static_cast<int>(zs.zeros.size()), n);
    Complex sum(0);
    for (const auto& z : zs.zeros) sum += z;
    Real expect = Real(n) * (n + alpha);
    EXPECT_LE(abs(sum.re - expect), ctx.half_tolerance() * abs(expect)) << n;
    EXPECT_LE(abs(sum.im), ctx.half_tolerance() * abs(expect)) << n;
    for (const auto& z : zs.zeros) {
      Real best = 1e300;
      for (const auto& w : zs.zeros) best = std::min(best, abs(Complex(w.re - z.re, w.im + z.im)));
      EXPECT_LE(best, ctx.half_tolerance() * std::max(Real(1), abs(z)));
    }
  }
}

TEST(LaguerreZeros, DegenerateParameter) {
  PrecisionContext ctx(50);
  try {
    laguerre_zeros({5, Real(-3)}, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Degenerate);
  }
  EXPECT_NO_THROW(laguerre_zeros({2, Real(-3)}, ctx));
}

TEST(Saddle, SmallCases) {
  PrecisionContext ctx(50);
  ScopedPrecision guard(ctx);
  auto s1 = saddle_points(Real(1), 1, ctx);
  EXPECT_NEAR(d(s1.scaled[0].re), -1.0, 1e-40);
  EXPECT_NEAR(d(saddle_residual(s1)), 0.0, 1e-40);

  auto s2 = saddle_points(Real(2) / 3, 2, ctx);
  EXPECT_NEAR(d(s2.scaled[0].re), -1.0 / 3, 1e-20);
  EXPECT_NEAR(d(s2.scaled[1].im), 0.4714045207910317, 1e-15);
  EXPECT_LT(saddle_residual(s2), Real(1e-20));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LE(abs(s2.scaled[i] - s2.zeros[i] * s2.g), Real(1e-45));
  }
}

TEST(Saddle, ResidualDetectsPerturbation) {
  PrecisionContext ctx(50);
  ScopedPrecision guard(ctx);
  auto zs = saddle_points(Real(1.5) / 20, 20, ctx);
  EXPECT_LT(saddle_residual(zs), Real(1e-20));
  zs.scaled[3].re += Real(1e-3);
  EXPECT_GT(saddle_residual(zs), Real(1e-2));
}

TEST(Saddle, EightyPointsAtHighPrecision) {
  PrecisionContext ctx(200);
  ScopedPrecision guard(ctx);
  auto zs = saddle_points(Real(1.5) / 80, 80, ctx);
  EXPECT_EQ(zs.scaled.size(), 80u);
  EXPECT_LT(saddle_residual(zs), Real(1e-20));
}
