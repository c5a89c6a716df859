/**
 * @file precision.hpp
 * @brief Extended-precision real/complex types, precision contexts and the
 * error type shared by every module.
 */
#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

namespace penner {

/// Variable-precision MPFR real. Expression templates are off so that `auto`
/// always yields a value.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

enum class ErrorKind {
  ZeroOfG,
  AsymptoticRegime,
  PoleOfLog,
  Degenerate,
  NoConvergence,
  CoincidentPoints,
  GBarnesZero,
  SinZero,
  QuadratureFailure,
  CriticalT,
  SingularPhase,
  DomainError,
  TraceFailure,
  LevelNotClosed,
  OriginSingular,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ZeroOfG: return "ZeroOfG";
    case ErrorKind::AsymptoticRegime: return "AsymptoticRegime";
    case ErrorKind::PoleOfLog: return "PoleOfLog";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::GBarnesZero: return "GBarnesZero";
    case ErrorKind::SinZero: return "SinZero";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::CriticalT: return "CriticalT";
    case ErrorKind::SingularPhase: return "SingularPhase";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::TraceFailure: return "TraceFailure";
    case ErrorKind::LevelNotClosed: return "LevelNotClosed";
    case ErrorKind::OriginSingular: return "OriginSingular";
  }
  return "Unknown";
}

/// Every numerical failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Working precision for extended-precision evaluations.
struct PrecisionContext {
  int digits = 50;
  int max_terms = 100000;

  PrecisionContext() = default;
  explicit PrecisionContext(int d, int terms = 100000) : digits(d), max_terms(terms) { validate(); }

  void validate() const {
    if (digits < 30) throw Error(ErrorKind::DomainError, "PrecisionContext: digits must be >= 30");
    if (max_terms < 10) throw Error(ErrorKind::DomainError, "PrecisionContext: max_terms must be >= 10");
  }

  PrecisionContext with_digits(int d) const { return PrecisionContext(d, max_terms); }

  /// Relative tolerance used to decide that sin(pi x) vanishes.
  Real pole_tolerance() const { return pow(Real(10), -(digits - 12)); }
  /// Tolerance that iterative solvers must certify.
  Real half_tolerance() const { return pow(Real(10), -(digits / 2)); }

  /// Default digits, overridable through PENNER_DIGITS.
  static int default_digits(int fallback = 50) {
    if (const char* env = std::getenv("PENNER_DIGITS")) {
      int d = std::atoi(env);
      if (d >= 30) return d;
    }
    return fallback;
  }
};

/// Sets the MPFR default precision for the lifetime of the guard.
///
/// The Boost 1.74 MPFR backend keeps one process-wide default, so evaluations
/// at different precisions must not interleave across threads.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(int digits) : saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(digits));
  }
  explicit ScopedPrecision(const PrecisionContext& ctx) : ScopedPrecision(ctx.digits) {}
  ~ScopedPrecision() { Real::default_precision(saved_); }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_;
};

namespace mp {

inline Real pi() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

inline Real euler_gamma() {
  Real r;
  mpfr_const_euler(r.backend().data(), MPFR_RNDN);
  return r;
}

inline Real zeta_ui(unsigned long k) {
  Real r;
  mpfr_zeta_ui(r.backend().data(), k, MPFR_RNDN);
  return r;
}

/// ln Gamma(x) for x > 0.
inline Real lgamma_pos(const Real& x) {
  Real r;
  mpfr_lngamma(r.backend().data(), x.backend().data(), MPFR_RNDN);
  return r;
}

/// zeta'(-1) = 1/12 - ln A (Glaisher), 330 significant digits.
inline Real zeta_prime_minus_one() {
  static const char* literal =
      "-0.16542114370045092921391966024278064276403638033520178366652230635735969966657717275952510033250"
      "87555383771201878848931122162119125117972483649871822588793599461904093536475317808273416226945845"
      "98894742863191811536766739448730810029593617129058439071988431358656815342499996177857828958964041"
      "223427610502936239241879494058053377754";
  return Real(literal);
}

inline Real ln2pi() { return log(2 * pi()); }

/// sin(pi x) evaluated after exact reduction of x to the nearest integer.
inline Real sin_pi(const Real& x) {
  Real k = round(x);
  Real r = x - k;
  Real s = sin(pi() * r);
  // (-1)^k
  Real half = k / 2;
  if (half != floor(half)) s = -s;
  return s;
}

/// Copy of x rounded to the current default precision.
///
/// Arithmetic with builtin operands keeps the precision of the Real operand,
/// so arguments are rebased before use.
inline Real working(const Real& x) {
  Real r;
  mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
  return r;
}

/// Distance from x to the nearest integer.
inline Real frac_distance(const Real& x) { return abs(x - round(x)); }

}  // namespace mp

/// Minimal complex arithmetic over Real (std::complex<T> is unspecified for
/// non-builtin T and MPC is not assumed to be present).
struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT(implicit)
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(int r) : re(r), im(0) {}              // NOLINT(implicit)
  Complex(double r, double i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const Real& s) { re *= s; im *= s; return *this; }
  Complex& operator/=(const Real& s) { re /= s; im /= s; return *this; }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const Real& s) { return a *= s; }
  friend Complex operator*(const Real& s, Complex a) { return a *= s; }
  friend Complex operator/(Complex a, const Real& s) { return a /= s; }
  friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
};

inline Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
inline Real abs(const Complex& z) { return hypot(z.re, z.im); }
inline Complex conj(const Complex& z) { return Complex(z.re, -z.im); }
inline Complex cexp(const Complex& z) {
  Real m = exp(z.re);
  return Complex(m * cos(z.im), m * sin(z.im));
}

}  // namespace penner
