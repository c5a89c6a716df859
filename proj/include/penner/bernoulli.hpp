#pragma once

#include "penner/precision.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

namespace penner {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Exact even-index Bernoulli numbers B_0, B_2, B_4, ...
///
/// `at(m)` returns B_{2m}. The table grows on demand and is shared process-wide.
class BernoulliTable {
 public:
  static const BernoulliTable& instance() {
    static BernoulliTable table;
    return table;
  }

  /// B_{2m}, exact.
  Rational at(int m) const {
    std::lock_guard<std::mutex> lock(mutex_);
    grow(m);
    return even_[static_cast<std::size_t>(m)];
  }

  /// B_{2m} as an extended-precision real at the current default precision.
  Real real_at(int m) const {
    unsigned prec = Real::default_precision();
    std::lock_guard<std::mutex> lock(mutex_);
    grow(m);
    auto& cache = reals_[prec];
    while (static_cast<int>(cache.size()) <= m) {
      const Rational& q = even_[cache.size()];
      Real num(boost::multiprecision::numerator(q).str());
      Real den(boost::multiprecision::denominator(q).str());
      cache.push_back(num / den);
    }
    return cache[static_cast<std::size_t>(m)];
  }

 private:
  BernoulliTable() = default;

  // Akiyama-Tanigawa, keeping only even indices (B_1 is the only nonzero odd one).
  void grow(int m) const {
    int have = static_cast<int>(even_.size());
    if (m < have) return;
    int nmax = 2 * std::max(m, 2 * have + 8);
    std::vector<Rational> a(static_cast<std::size_t>(nmax + 1));
    even_.clear();
    for (int n = 0; n <= nmax; ++n) {
      a[static_cast<std::size_t>(n)] = Rational(1, n + 1);
      for (int j = n; j >= 1; --j) {
        a[static_cast<std::size_t>(j - 1)] = j * (a[static_cast<std::size_t>(j - 1)] - a[static_cast<std::size_t>(j)]);
      }
      if (n % 2 == 0) even_.push_back(a[0]);
    }
    reals_.clear();
  }

  mutable std::mutex mutex_;
  mutable std::vector<Rational> even_;
  mutable std::map<unsigned, std::vector<Real>> reals_;
};

inline Rational bernoulli_b2n(int m) { return BernoulliTable::instance().at(m); }

inline Real to_real(const Rational& q) {
  Real num(boost::multiprecision::numerator(q).str());
  Real den(boost::multiprecision::denominator(q).str());
  return num / den;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace penner
