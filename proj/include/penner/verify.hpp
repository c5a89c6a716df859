/**
 * @file verify.hpp
 * @brief Acceptance checks grouped into the suites run by `penner verify` and
 * by the acceptance test binary.
 */
#pragma once

#include "penner/asymptotics.hpp"
#include "penner/barnes.hpp"
#include "penner/laguerre.hpp"
#include "penner/partition.hpp"
#include "penner/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace penner::verify {

/// One measured quantity against its tolerance.
struct Measurement {
  std::string label;
  double value = 0;
  double tolerance = 0;
  bool ok = false;
  const char* relation = "<=";

  static Measurement at_most(std::string label, double v, double tol) {
    return {std::move(label), v, tol, v <= tol, "<="};
  }
  static Measurement at_least(std::string label, double v, double tol) {
    return {std::move(label), v, tol, v >= tol, ">="};
  }
  static Measurement holds(std::string label, bool b) { return {std::move(label), b ? 1.0 : 0.0, 1.0, b, "=="}; }
};

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string title;
  std::vector<Measurement> measurements;
  double seconds = 0;
  double budget = 0;
  std::string error;  // set when the check threw

  bool pass() const {
    if (!error.empty() || seconds > budget) return false;
    for (const auto& m : measurements)
      if (!m.ok) return false;
    return true;
  }

  /// First failing measurement, or the one closest to its tolerance.
  const Measurement* headline() const {
    const Measurement* best = nullptr;
    double worst = -1;
    for (const auto& m : measurements) {
      if (!m.ok) return &m;
      double r = m.relation[0] == '<' ? m.value / m.tolerance : m.relation[0] == '>' ? m.tolerance / m.value : 0;
      if (!std::isfinite(r)) r = 0;
      if (r > worst) {
        worst = r;
        best = &m;
      }
    }
    return best;
  }
};

struct Criterion {
  int id;
  const char* suite;
  const char* title;
  double budget;
  std::function<std::vector<Measurement>()> run;
};

namespace detail {

inline double d(const Real& x) { return x.convert_to<double>(); }

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::vector<Measurement> barnes_consistency() {
  const PrecisionContext ctx(50);
  ScopedPrecision guard(ctx);
  std::vector<Measurement> out;
  double stirling = 0;
  for (int n = 20; n <= 40; ++n) {
    auto s = log_barnes_g_stirling(Real(n), 4);
    stirling = std::max(stirling, d(abs(s.value - log_barnes_g_integer(n, ctx))));
  }
  out.push_back(Measurement::at_most("ln G(1+n) Stirling K=4 vs exact, n in [20,40]", stirling, 1e-10));
  double refl = 0;
  for (double x : {0.3, 2.7, 5.2})
    refl = std::max(refl, d(abs(log_abs_barnes_g_reflected(Real(x), ctx) - log_barnes_g_product(Real(-x), 20000, ctx))));
  out.push_back(Measurement::at_most("reflection vs canonical product at x = 0.3, 2.7, 5.2", refl, 1e-6));
  return out;
}

inline std::vector<Measurement> factorization() {
  const PrecisionContext ctx(50);
  double worst = 0;
  for (int n : {1, 2, 3, 5, 10})
    for (double g : {0.34, 0.7, 1.3, 2.5, 10.0}) worst = std::max(worst, d(check_factorization(n, Real(g), ctx)));
  return {Measurement::at_most("factorization relative discrepancy, 5x5 grid", worst, 1e-12)};
}

inline std::vector<Measurement> quadrature_oracles() {
  const PrecisionContext ctx(50);
  double eig = 0, contour = 0;
  for (int n : {1, 2}) {
    for (double g : {0.25, 1.0, 2.0})
      eig = std::max(eig, std::abs(d(z_positive(n, Real(g), ctx).log_modulus) - d(quadrature_oracle_eig(n, g).log_modulus)));
    for (double g : {0.34, 0.7, 1.3}) {
      auto exact = z0_holomorphic(n, Real(g), ctx);
      auto quad = contour_quadrature_z0(n, g);
      double phase = std::remainder(d(exact.phase) - d(quad.phase), 2 * M_PI);
      contour = std::max({contour, std::abs(d(exact.log_modulus) - d(quad.log_modulus)), std::abs(phase)});
    }
  }
  return {Measurement::at_most("ln Z_n eigenvalue quadrature vs closed form", eig, 1e-8),
          Measurement::at_most("holomorphic contour quadrature vs closed form", contour, 1e-6)};
}

inline std::vector<Measurement> expansion_decomposition() {
  std::vector<Measurement> out;
  auto run = [&](const char* name, const CouplingSequence& seq) {
    double r40 = 0, r80 = 0;
    for (int n : {40, 80}) {
      PrecisionContext local(seq.required_digits(n, 60));
      ScopedPrecision guard(local);
      double r = std::abs(d(breakdown(n, seq.g(n), 4, local).residual));
      (n == 40 ? r40 : r80) = r;
    }
    out.push_back(Measurement::at_most(std::string(name) + ": |residual| at n = 80", r80, 1e-8));
    out.push_back(Measurement::at_most(std::string(name) + ": |log2(r40/r80) - 10|", std::abs(std::log2(r40 / r80) - 10), 0.5));
  };
  run("t = 3/2 't Hooft", CouplingSequence::thooft(Real(3) / 2));
  // every 't Hooft n is a pole at t = 1/2, so the KM family with l = 1/2 is used
  {
    PrecisionContext c(50);
    ScopedPrecision guard(c);
    run("t = 1/2 KM(1/2, 1/2, 1)", CouplingSequence::km_family(Real(0.5), Real(0.5), Real(1)));
  }
  return out;
}

inline std::vector<Measurement> planar_limit() {
  const PrecisionContext ctx(50);
  ScopedPrecision guard(ctx);
  std::vector<Measurement> out;
  auto seq = CouplingSequence::km_family(Real(2), Real(0.5), Real(1));
  {
    PrecisionContext local(seq.required_digits(200, 50));
    ScopedPrecision g2(local);
    double err = std::abs(d(free_energy_exact(200, seq.g(200), local).value - planar_free_energy({Real(2), Real(0.5)}, local)));
    out.push_back(Measurement::at_most("|F_200 - F(2, 0.5)| along KM(2, 0.5, 1)", err, 1e-2));
  }
  out.push_back(Measurement::at_most("|F(2,1) - 0.5|", std::abs(d(planar_free_energy({Real(2), Real(1)}, ctx)) - 0.5), 1e-12));
  out.push_back(Measurement::at_most("|F(1/2,1) - 0.096574|",
                                     std::abs(d(planar_free_energy({Real(0.5), Real(1)}, ctx)) - 0.096574), 1e-6));
  out.push_back(Measurement::at_most("|F(1/2,1) - (ln 2 / 2 - 1/4)|",
                                     std::abs(d(planar_free_energy({Real(0.5), Real(1)}, ctx) - (log(Real(2)) / 2 - Real(1) / 4))),
                                     1e-12));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ut(0.05, 5.0), ul(0.001, 1.0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    PhasePoint p{Real(ut(rng)), Real(ul(rng))};
    if (p.t == 1) continue;
    worst = std::max(worst, d(abs(planar_closed_form(p) - planar_via_holomorphic(p))));
  }
  out.push_back(Measurement::at_most("closed form vs holomorphic route, 100 random points", worst, 1e-25));
  return out;
}

inline std::vector<Measurement> phase_transitions() {
  const PrecisionContext ctx(50);
  std::vector<Measurement> out;
  for (double l : {0.25, 0.5, 1.0}) {
    auto td = transition_diagnostics(Real(l), Real(0.01), ctx);
    out.push_back(Measurement::at_most("|jump dF/dt - ln l| at l = " + fmt(l), std::abs(d(td.jump_in_dFdt) - std::log(l)), 1e-3));
    if (l == 1.0) {
      bool grows = td.second_derivative.size() == 3;
      for (std::size_t i = 1; grows && i < td.second_derivative.size(); ++i)
        grows = abs(td.second_derivative[i]) > abs(td.second_derivative[i - 1]);
      out.push_back(Measurement::holds("l = 1: |d2F/dt2| grows monotonically as h decreases", grows));
    }
  }
  return out;
}

inline std::vector<Measurement> thooft_nonconvergence() {
  const PrecisionContext ctx(50);
  ScopedPrecision guard(ctx);
  return {Measurement::at_least("running max - min of F_osc over n <= 2000, t = sqrt 2",
                                d(thooft_oscillation_spread(sqrt(Real(2)), 2000, ctx)), 0.01)};
}

inline std::vector<Measurement> saddle_residual_check() {
  const PrecisionContext ctx(200);
  ScopedPrecision guard(ctx);
  auto zs = saddle_points(Real(3) / 2 / 80, 80, ctx);
  return {Measurement::at_most("max saddle residual, n = 80, t = 3/2, 200 digits", d(saddle_residual(zs)), 1e-15)};
}

inline std::vector<Measurement> clustering() {
  std::vector<Measurement> out;
  auto trend = [&](const char* name, double m20, double m80) {
    out.push_back(Measurement::holds(std::string(name) + ": mean distance n = 20 -> 80 decreases (" + fmt(m20) + " -> " +
                                         fmt(m80) + ")",
                                     m80 < m20));
  };
  {
    PrecisionContext ctx(60);
    ScopedPrecision guard(ctx);
    auto sd = weak_arc(0.9, 1024);
    auto c20 = cloud_vs_theory(saddle_points(Real(0.9) / 20, 20, ctx), sd);
    auto c80 = cloud_vs_theory(saddle_points(Real(0.9) / 80, 80, ctx), sd);
    out.push_back(Measurement::at_most("weak t = 0.9: max distance at n = 80", c80.max_dist, 0.05));
    trend("weak", c20.mean_dist, c80.mean_dist);
  }
  {
    PrecisionContext ctx(60);
    ScopedPrecision guard(ctx);
    auto seq = CouplingSequence::km_family(Real(1.5), Real(1), Real(0.5));
    auto sd = strong_loop(1.5, 1, 1024);
    auto c20 = cloud_vs_theory(saddle_points(seq.g(20), 20, ctx), sd);
    auto c80 = cloud_vs_theory(saddle_points(seq.g(80), 80, ctx), sd);
    out.push_back(Measurement::at_most("strong t = 1.5, l = 1: max distance at n = 80", c80.max_dist, 0.05));
    trend("strong", c20.mean_dist, c80.mean_dist);
  }
  {
    auto seq = CouplingSequence::km_family(Real(1.5), Real(0.05), Real(1));
    auto sd = strong_loop(1.5, 0.05, 1024);
    std::vector<double> mean;
    for (int n : {20, 80}) {
      PrecisionContext ctx(seq.required_digits(n, 60));
      ScopedPrecision guard(ctx);
      auto zs = saddle_points(seq.g(n), n, ctx);
      auto c = cloud_vs_theory(zs, sd);
      mean.push_back(c.mean_dist);
      if (n != 80) continue;
      out.push_back(Measurement::at_most("condensing t = 1.5, l = 0.05: max distance at n = 80", c.max_dist, 0.05));
      int near = 0;
      for (const auto& z : zs.scaled) near += abs(z) < Real(0.1);
      out.push_back(Measurement::at_least("condensing: fraction within 0.1 of origin", near / 80.0, 1 / 1.5));
    }
    trend("condensing", mean[0], mean[1]);
  }
  return out;
}

inline std::vector<Measurement> coulomb() {
  std::vector<Measurement> out;
  for (double t : {0.5, 2.0}) {
    auto sd = t < 1 ? weak_arc(t, 256) : strong_loop(t, 1, 256);
    out.push_back(Measurement::at_most("|E quadrature - closed form| at t = " + fmt(t),
                                       std::abs(coulomb_energy(t, sd) - coulomb_energy_closed_form(t)), 1e-6));
  }
  const double e1 = coulomb_energy(2, strong_loop(2, 1, 256));
  const double e05 = coulomb_energy(2, strong_loop(2, 0.5, 256));
  out.push_back(Measurement::at_most("|E(l = 1) - E(l = 0.5)| at t = 2", std::abs(e1 - e05), 1e-6));
  return out;
}

inline std::vector<Measurement> effective_potential_check() {
  const double t = 2, l = 0.5;
  auto g = effective_potential_gap(t, l, strong_loop(t, l, 256));
  return {Measurement::at_most("|gap + t ln l| at (2, 0.5)", std::abs(g.gap + t * std::log(l)), 1e-4),
          Measurement::at_most("stdev of V_eff on loop", g.stdev1, 1e-4),
          Measurement::at_most("stdev of V_eff on interval", g.stdev2, 1e-4),
          Measurement::at_most("|V_eff on interval - (3 - 2 ln 2)|", std::abs(g.gamma2 - (3 - 2 * std::log(2.0))), 1e-4)};
}

inline std::vector<Measurement> filling() {
  std::vector<Measurement> out;
  for (double t : {1.5, 2.0, 4.0}) {
    double worst = 0;
    for (double l : {0.5, 1.0}) {
      auto ff = filling_fractions(strong_loop(t, l, 256));
      worst = std::max({worst, std::abs(ff.loop_fraction - 1 / t), std::abs(ff.interval_fraction - (1 - 1 / t))});
    }
    out.push_back(Measurement::at_most("loop 1/t, interval 1 - 1/t at t = " + fmt(t) + ", l in {0.5, 1}", worst, 1e-4));
  }
  return out;
}

inline std::vector<Measurement> euler() {
  bool all = true;
  for (int k = 0; k <= 3; ++k)
    for (int s = 1; s <= 5; ++s)
      if (2 - 2 * k - s < 0) all = all && topological_coefficient(k, s) == Rational(-euler_characteristic(k, s));
  return {Measurement::holds("expansion coefficients equal -chi_{k,s}, k <= 3, s <= 5", all),
          Measurement::holds("chi_{1,1} = -1/12", euler_characteristic(1, 1) == Rational(-1, 12)),
          Measurement::holds("chi_{0,3} = 1/6", euler_characteristic(0, 3) == Rational(1, 6))};
}

inline std::vector<Measurement> szego_closing() {
  std::vector<Measurement> out;
  const auto sz = densify(szego_curve(4096));
  out.push_back(Measurement::at_most("Hausdorff(weak arc t = 0.999, Szego curve)",
                                     hausdorff_distance(densify(weak_arc(0.999, 512).arc_samples), sz), 0.02));
  double worst = 0;
  for (double t : {0.99, 0.999, 0.9999}) {
    auto [am, ap] = endpoints(-1 / t);
    const double rate = 2 * std::sqrt(std::abs(-1 / t + 1));
    const double dev = std::max(std::abs(std::abs(ap - 1.0) / rate - 1), std::abs(std::abs(am - 1.0) / rate - 1));
    worst = std::max(worst, dev / std::abs(-1 / t + 1));
  }
  // the ratio tends to 1 linearly in |A+1|
  out.push_back(Measurement::at_most("max_t | |a_pm - 1| / (2 sqrt|A+1|) - 1 | / |A+1|, t = 0.99 .. 0.9999", worst, 1.0));
  return out;
}

}  // namespace detail

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "barnes", "Barnes consistency", 10, detail::barnes_consistency},
      {2, "partition", "Factorization identity", 5, detail::factorization},
      {3, "partition", "Quadrature oracles", 60, detail::quadrature_oracles},
      {4, "expansion", "Expansion decomposition", 10, detail::expansion_decomposition},
      {5, "expansion", "Planar limit", 30, detail::planar_limit},
      {6, "expansion", "Phase transitions", 5, detail::phase_transitions},
      {7, "expansion", "'t Hooft non-convergence", 5, detail::thooft_nonconvergence},
      {8, "spectral", "Saddle points", 60, detail::saddle_residual_check},
      {9, "spectral", "Clustering", 120, detail::clustering},
      {10, "spectral", "Coulomb energy", 60, detail::coulomb},
      {11, "spectral", "Effective potential", 60, detail::effective_potential_check},
      {12, "spectral", "Filling fractions", 30, detail::filling},
      {13, "expansion", "Euler characteristics", 1, detail::euler},
      {14, "spectral", "Szego closing", 10, detail::szego_closing},
  };
  return all;
}

inline bool is_suite(const std::string& s) {
  return s == "all" || s == "barnes" || s == "partition" || s == "expansion" || s == "spectral";
}

inline CriterionResult run(const Criterion& c) {
  CriterionResult r{c.id, c.suite, c.title, {}, 0, c.budget, {}};
  const auto start = std::chrono::steady_clock::now();
  try {
    r.measurements = c.run();
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Runs the criteria of `suite` in order, calling `report` after each.
inline std::vector<CriterionResult> run_suite(const std::string& suite,
                                              const std::function<void(const CriterionResult&)>& report = {}) {
  if (!is_suite(suite)) throw Error(ErrorKind::DomainError, "unknown verify suite: " + suite);
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (suite != "all" && suite != c.suite) continue;
    out.push_back(run(c));
    if (report) report(out.back());
  }
  return out;
}

/// "PASS  4 [expansion] Expansion decomposition: <headline> (0.8 s / 10 s)"
inline std::string summary_line(const CriterionResult& r) {
  char buf[512];
  std::string detail;
  if (!r.error.empty()) {
    detail = "error: " + r.error;
  } else if (const Measurement* m = r.headline()) {
    std::snprintf(buf, sizeof buf, "%s = %.3g %s %.3g", m->label.c_str(), m->value, m->ok ? m->relation : "vs", m->tolerance);
    detail = buf;
  }
  std::snprintf(buf, sizeof buf, "%s %2d [%s] %s: %s (%.2f s / %.0f s)", r.pass() ? "PASS" : "FAIL", r.id, r.suite.c_str(),
                r.title.c_str(), detail.c_str(), r.seconds, r.budget);
  return buf;
}

/// One row per measurement, for the verify table.
inline std::vector<std::string> detail_lines(const CriterionResult& r) {
  std::vector<std::string> out;
  char buf[512];
  for (const auto& m : r.measurements) {
    std::snprintf(buf, sizeof buf, "      %s  %-70s %.6g %s %.3g", m.ok ? "ok  " : "FAIL", m.label.c_str(), m.value, m.relation,
                  m.tolerance);
    out.emplace_back(buf);
  }
  if (r.seconds > r.budget) {
    std::snprintf(buf, sizeof buf, "      FAIL  runtime %.2f s over budget %.0f s", r.seconds, r.budget);
    out.emplace_back(buf);
  }
  return out;
}

}  // namespace penner::verify
