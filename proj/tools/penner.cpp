// penner: command-line front end for the library.
//
// Exit codes: 0 success, 1 verification failure, 2 bad arguments, 3 numerical failure.

#include "penner/asymptotics.hpp"
#include "penner/io.hpp"
#include "penner/laguerre.hpp"
#include "penner/partition.hpp"
#include "penner/spectral.hpp"
#include "penner/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace penner;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kBadArgs = 2, kNumerical = 3 };

struct BadArgs : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Range {
  double min = 0, max = 0;
  int steps = 1;

  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < steps; ++i) v.push_back(steps == 1 ? min : min + (max - min) * i / (steps - 1));
    return v;
  }
};

/// Options shared by all commands; each command registers the ones it uses.
struct RunConfig {
  std::optional<std::string> t, l, g;
  std::optional<std::string> c;
  bool thooft = false;
  std::optional<int> n;
  int n_min = 1, n_max = 100, step = 1;
  int samples = 512, K = 4;
  int digits = PrecisionContext::default_digits(50);
  int k_max = 3, s_max = 5;
  std::vector<double> t_range{0.2, 3, 20}, l_range{0.1, 1, 20};
  double h = 1e-6;
  std::string plane = "penner";
  std::string format = "csv";
  std::string output;
  std::string suite = "all";
};

Real parse_real(const std::string& s, const char* name) {
  try {
    return Real(s);
  } catch (const std::exception&) {
    throw BadArgs(std::string("--") + name + ": not a number: " + s);
  }
}

Range parse_range(const std::vector<double>& v, const char* name) {
  if (v.size() != 3) throw BadArgs(std::string("--") + name + " takes MIN MAX STEPS");
  Range r{v[0], v[1], static_cast<int>(v[2])};
  if (r.steps < 1 || r.steps != v[2] || !(r.min <= r.max)) throw BadArgs(std::string("--") + name + ": empty range");
  return r;
}

PrecisionContext make_context(int digits) {
  if (digits < 30) throw BadArgs("--digits must be >= 30");
  return PrecisionContext(digits);
}

double dbl(const Real& x) { return x.convert_to<double>(); }

/// Data goes to --output or stdout; summaries go to stdout when data is in a
/// file and to stderr otherwise, so piped data stays clean.
class Sink {
 public:
  explicit Sink(const RunConfig& cfg) : cfg_(cfg) {}

  std::ostream& summary() const { return cfg_.output.empty() ? std::cerr : std::cout; }

  void table(const io::Table& t) const {
    write([&](std::ostream& os) {
      if (cfg_.format == "json")
        io::write_json(os, t);
      else
        io::write_csv(os, t);
    });
  }

  void figure(const io::Figure& f) const {
    write([&](std::ostream& os) { io::write_svg(os, f); });
  }

 private:
  template <class F>
  void write(F&& f) const {
    if (cfg_.output.empty()) {
      f(std::cout);
      return;
    }
    std::ofstream os(cfg_.output);
    if (!os) throw BadArgs("cannot open output file " + cfg_.output);
    f(os);
  }

  const RunConfig& cfg_;
};

void require_table_format(const RunConfig& cfg, const char* cmd) {
  if (cfg.format == "svg") throw BadArgs(std::string(cmd) + ": svg output is available for cloud and support only");
}

const char* kind_name(SupportPiece::Kind k) {
  switch (k) {
    case SupportPiece::Kind::Loop: return "loop";
    case SupportPiece::Kind::Arc: return "arc";
    case SupportPiece::Kind::Interval: return "interval";
  }
  return "unknown";
}

std::string status_of(const Error& e) { return to_string(e.kind()); }

// ---------------------------------------------------------------- free-energy

int cmd_free_energy(const RunConfig& cfg) {
  require_table_format(cfg, "free-energy");
  const PrecisionContext ctx = make_context(cfg.digits);
  ScopedPrecision guard(ctx);
  const Sink sink(cfg);

  std::optional<CouplingSequence> seq;
  std::optional<Real> planar;
  std::vector<int> ns;
  if (cfg.g) {
    if (!cfg.n) throw BadArgs("--g requires --n");
    ns = {*cfg.n};
  } else {
    if (!cfg.t) throw BadArgs("free-energy needs --t (with --l or --thooft) or --n with --g");
    const Real t = parse_real(*cfg.t, "t");
    if (!(t > 0)) throw BadArgs("--t must be positive");
    if (cfg.thooft || !cfg.l) {
      seq = CouplingSequence::thooft(t);
    } else {
      const Real l = parse_real(*cfg.l, "l");
      if (l < 0 || l > 1) throw BadArgs("--l must lie in [0, 1]");
      const Real c = parse_real(cfg.c.value_or("1"), "c");
      if (c == 0) throw BadArgs("--c must be nonzero");
      seq = CouplingSequence::km_family(t, l, c);
      try {
        planar = planar_free_energy({t, l}, ctx);
      } catch (const Error&) {
      }
    }
    if (cfg.n) {
      ns = {*cfg.n};
    } else {
      if (cfg.n_min < 1 || cfg.n_max < cfg.n_min || cfg.step < 1) throw BadArgs("empty n range");
      for (int n = cfg.n_min; n <= cfg.n_max; n += cfg.step) ns.push_back(n);
    }
  }
  if (cfg.K < 0) throw BadArgs("--K must be >= 0");
  for (int n : ns)
    if (n < 1) throw BadArgs("--n must be >= 1");

  io::Table table{{"n", "g_n", "t_n", "exact", "osc", "per", "residual", "planar_limit", "status"}, {}};
  int flagged = 0;
  for (int n : ns) {
    PrecisionContext local = seq ? ctx.with_digits(seq->required_digits(n, ctx.digits)) : ctx;
    ScopedPrecision row_guard(local);
    const Real g = seq ? seq->g(n) : parse_real(*cfg.g, "g");
    if (!(g > 0)) throw BadArgs("--g must be positive");
    std::vector<io::Cell> row{static_cast<long long>(n), dbl(g), dbl(n * g), {}, {}, {}, {}, {}, std::string("ok")};
    if (planar) row[7] = dbl(*planar);
    try {
      auto b = breakdown(n, g, cfg.K, local);
      row[3] = dbl(b.exact);
      row[4] = dbl(b.osc);
      row[5] = dbl(b.per);
      row[6] = dbl(b.residual);
    } catch (const Error& e) {
      ++flagged;
      row[8] = status_of(e);
      try {
        row[3] = dbl(free_energy_exact(n, g, local).value);
      } catch (const Error&) {
      }
    }
    table.add(std::move(row));
  }
  sink.table(table);

  if (seq && !cfg.n && cfg.n_max >= 100) {
    auto est = km_limit_estimate(*seq, cfg.n_max, ctx);
    auto& os = sink.summary();
    os << "l-limit: " << (est.converged ? "converged" : "not converged") << " (l_hat " << io::format_number(dbl(est.l_hat))
       << ", tail spread " << io::format_number(dbl(est.l_spread)) << (est.hits_zero ? ", sin(pi/g_n) = 0 on some n" : "")
       << ")\n";
    if (seq->kind == CouplingSequence::Kind::THooft) {
      try {
        os << "osc spread over n <= " << cfg.n_max << ": "
           << io::format_number(dbl(thooft_oscillation_spread(seq->t, cfg.n_max, ctx))) << "\n";
      } catch (const Error& e) {
        os << "osc spread: " << status_of(e) << "\n";
      }
    }
  }
  if (flagged) {
    std::cerr << flagged << " row(s) flagged (pole, sin = 0 or critical t)\n";
    return kNumerical;
  }
  return kOk;
}

// ---------------------------------------------------------------- support helpers

double parse_l(const RunConfig& cfg, double fallback) {
  if (!cfg.l) return fallback;
  const double l = dbl(parse_real(*cfg.l, "l"));
  if (!(l >= 0 && l <= 1)) throw BadArgs("--l must lie in [0, 1]");
  return l;
}

double parse_t(const RunConfig& cfg) {
  if (!cfg.t) throw BadArgs("--t is required");
  const double t = dbl(parse_real(*cfg.t, "t"));
  if (!(t > 0) || !std::isfinite(t)) throw BadArgs("--t must be positive");
  return t;
}

SupportDescription build_support(double t, double l, int samples) {
  if (samples < 16) throw BadArgs("--samples must be >= 16");
  return t > 1 && !detail::is_critical(t) ? strong_loop(t, l, samples + samples % 2) : weak_arc(t, samples);
}

void add_support_rows(io::Table& table, const SupportDescription& sd, bool with_kind_prefix) {
  long long piece = 0;
  for (const auto& [kind, line] : support_polylines(sd, 0)) {
    const bool point = sd.regime == Regime::StrongDeltaInterval && piece == 0;
    const std::string name = point ? "point" : kind_name(kind);
    for (std::size_t i = 0; i < line.size(); ++i) {
      std::vector<io::Cell> row;
      if (with_kind_prefix) row.push_back(std::string("support"));
      row.insert(row.end(), {piece, name, static_cast<long long>(i), line[i].real(), line[i].imag()});
      table.add(std::move(row));
    }
    ++piece;
  }
}

void add_support_lines(io::Figure& fig, const SupportDescription& sd) {
  for (const auto& [kind, line] : support_polylines(sd)) {
    fig.lines.push_back({line, kind == SupportPiece::Kind::Interval ? "#2ca02c" : "#1f77b4"});
  }
}

// ---------------------------------------------------------------- cloud

int cmd_cloud(const RunConfig& cfg) {
  if (!cfg.n) throw BadArgs("cloud needs --n");
  const int n = *cfg.n;
  if (n < 1 || n > 512) throw BadArgs("--n must lie in [1, 512]");
  const double t = parse_t(cfg);
  PrecisionContext ctx = make_context(cfg.digits);
  ScopedPrecision outer(ctx);

  CouplingSequence seq = cfg.l && !cfg.thooft ? CouplingSequence::km_family(parse_real(*cfg.t, "t"), parse_real(*cfg.l, "l"),
                                                                            parse_real(cfg.c.value_or("0.5"), "c"))
                                              : CouplingSequence::thooft(parse_real(*cfg.t, "t"));
  ctx = ctx.with_digits(seq.required_digits(n, ctx.digits));
  ScopedPrecision guard(ctx);
  const Real g = seq.g(n);
  // without --l the finite-n value |sin(pi/g_n)|^{1/n} selects the loop
  const double l = cfg.l ? parse_l(cfg, 1) : std::min(1.0, dbl(exp(log(abs(sin(mp::pi() / g))) / n)));
  const ZeroSet zs = saddle_points(g, n, ctx);
  const SupportDescription sd = to_penner_plane(build_support(t, l, std::max(cfg.samples, 1024)));
  const CloudComparison cmp = cloud_vs_theory(zs, sd);

  const Sink sink(cfg);
  if (cfg.format == "svg") {
    io::Figure fig;
    std::ostringstream title;
    title << "n = " << n << ", t = " << *cfg.t << ", l = " << io::format_number(l) << " (" << to_string(sd.regime) << ")";
    fig.title = title.str();
    add_support_lines(fig, sd);
    for (const auto& z : zs.scaled) fig.scatter.emplace_back(dbl(z.re), dbl(z.im));
    sink.figure(fig);
  } else {
    io::Table table{{"set", "piece", "kind", "index", "re", "im"}, {}};
    for (std::size_t i = 0; i < zs.scaled.size(); ++i)
      table.add({std::string("saddle"), 0LL, std::string("point"), static_cast<long long>(i), dbl(zs.scaled[i].re),
                 dbl(zs.scaled[i].im)});
    add_support_rows(table, sd, true);
    sink.table(table);
  }
  auto& os = sink.summary();
  os << "regime: " << to_string(sd.regime) << "\n"
     << "g_n: " << io::format_number(dbl(g)) << "\n"
     << "max_dist: " << io::format_number(cmp.max_dist) << "\n"
     << "mean_dist: " << io::format_number(cmp.mean_dist) << "\n"
     << "loop_fraction: " << io::format_number(cmp.loop_count_fraction) << "\n"
     << "saddle_residual: " << io::format_number(dbl(saddle_residual(zs))) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- support / density

SupportDescription support_for(const RunConfig& cfg) {
  const double t = parse_t(cfg);
  const double l = parse_l(cfg, 1);
  if (cfg.plane != "penner" && cfg.plane != "laguerre") throw BadArgs("--plane must be penner or laguerre");
  SupportDescription sd = build_support(t, l, cfg.samples);
  return cfg.plane == "penner" ? to_penner_plane(sd) : sd;
}

int cmd_support(const RunConfig& cfg) {
  const SupportDescription sd = support_for(cfg);
  const Sink sink(cfg);
  if (cfg.format == "svg") {
    io::Figure fig;
    fig.title = std::string("support, t = ") + *cfg.t + " (" + to_string(sd.regime) + ", " + cfg.plane + " plane)";
    add_support_lines(fig, sd);
    fig.scatter = {sd.a_minus, sd.a_plus};
    sink.figure(fig);
  } else {
    io::Table table{{"piece", "kind", "index", "re", "im"}, {}};
    add_support_rows(table, sd, false);
    sink.table(table);
  }
  auto& os = sink.summary();
  os << "regime: " << to_string(sd.regime) << "\n"
     << "a_minus: " << io::format_number(sd.a_minus.real()) << " " << io::format_number(sd.a_minus.imag()) << "\n"
     << "a_plus: " << io::format_number(sd.a_plus.real()) << " " << io::format_number(sd.a_plus.imag()) << "\n";
  if (sd.regime == Regime::StrongDeltaInterval) os << "point_mass: " << io::format_number(sd.point_mass) << "\n";
  const auto ff = filling_fractions(sd);
  os << "loop_fraction: " << io::format_number(ff.loop_fraction) << "\n"
     << "interval_fraction: " << io::format_number(ff.interval_fraction) << "\n";
  return kOk;
}

int cmd_density(const RunConfig& cfg) {
  require_table_format(cfg, "density");
  const SupportDescription sd = support_for(cfg);
  io::Table table{{"re", "im", "rho"}, {}};
  for (const auto& s : density_samples(sd)) table.add({s.z.real(), s.z.imag(), s.rho});
  Sink(cfg).table(table);
  return kOk;
}

// ---------------------------------------------------------------- phase-diagram

int cmd_phase_diagram(const RunConfig& cfg) {
  require_table_format(cfg, "phase-diagram");
  const Range tr = parse_range(cfg.t_range, "t-range"), lr = parse_range(cfg.l_range, "l-range");
  if (!(tr.min > 0)) throw BadArgs("--t-range must stay above 0");
  if (lr.min < 0 || lr.max > 1) throw BadArgs("--l-range must lie in [0, 1]");
  if (!(cfg.h > 0 && cfg.h < 0.1)) throw BadArgs("--dt must lie in (0, 0.1)");
  const PrecisionContext ctx = make_context(cfg.digits);
  ScopedPrecision guard(ctx);

  io::Table table{{"t", "l", "F", "dF_dt", "regime", "status"}, {}};
  for (double t : tr.values()) {
    for (double l : lr.values()) {
      std::vector<io::Cell> row{t, l, {}, {}, std::string(t < 1 ? "weak" : "strong"), std::string("ok")};
      if (l == 0) {
        row[4] = std::string("singular");
        row[5] = std::string(to_string(ErrorKind::SingularPhase));
      } else if (std::abs(t - 1) <= cfg.h) {
        row[2] = dbl(planar_free_energy({Real(t), Real(l)}, ctx, true));
        row[4] = std::string("critical");
        row[5] = std::string(to_string(ErrorKind::CriticalT));
      } else {
        try {
          row[2] = dbl(planar_free_energy({Real(t), Real(l)}, ctx));
          row[3] = dbl(detail::planar_derivative(Real(t), Real(l), Real(cfg.h)));
        } catch (const Error& e) {
          row[5] = status_of(e);
        }
      }
      table.add(std::move(row));
    }
  }
  const Sink sink(cfg);
  sink.table(table);
  if (tr.min < 1 && tr.max > 1) {
    auto& os = sink.summary();
    for (double l : lr.values()) {
      if (l == 0) continue;
      auto td = transition_diagnostics(Real(l), Real(0.01), ctx);
      os << "l " << io::format_number(l) << ": jump dF/dt across t = 1 " << io::format_number(dbl(td.jump_in_dFdt))
         << ", ln l " << io::format_number(std::log(l)) << (td.is_continuous_at_l1 ? ", continuous" : "") << "\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- euler

std::string rational_text(const Rational& q) {
  std::ostringstream s;
  s << boost::multiprecision::numerator(q) << "/" << boost::multiprecision::denominator(q);
  return s.str();
}

int cmd_euler(const RunConfig& cfg) {
  require_table_format(cfg, "euler");
  if (cfg.k_max < 0 || cfg.s_max < 1) throw BadArgs("--k-max must be >= 0 and --s-max >= 1");
  io::Table table{{"k", "s", "chi", "chi_value", "coefficient", "match"}, {}};
  int mismatches = 0;
  for (int k = 0; k <= cfg.k_max; ++k) {
    for (int s = 1; s <= cfg.s_max; ++s) {
      if (2 - 2 * k - s >= 0) continue;
      const Rational chi = euler_characteristic(k, s);
      const Rational coef = topological_coefficient(k, s);
      const bool match = coef == Rational(-chi);
      mismatches += !match;
      table.add({static_cast<long long>(k), static_cast<long long>(s), rational_text(chi), to_double(chi),
                 rational_text(coef), std::string(match ? "yes" : "no")});
    }
  }
  Sink(cfg).table(table);
  return mismatches ? kVerifyFailed : kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const RunConfig& cfg) {
  if (!verify::is_suite(cfg.suite)) throw BadArgs("unknown suite " + cfg.suite);
  int failed = 0;
  auto results = verify::run_suite(cfg.suite, [](const verify::CriterionResult& r) {
    std::cout << verify::summary_line(r) << "\n";
    for (const auto& line : verify::detail_lines(r)) std::cout << line << "\n";
    std::cout.flush();
  });
  for (const auto& r : results) failed += !r.pass();
  std::cout << (failed ? "FAIL" : "PASS") << ": " << results.size() - failed << " of " << results.size()
            << " criteria passed\n";
  return failed ? kVerifyFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penner matrix model with negative coupling: free energies, saddle points and supports"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_option("-o,--output", cfg.output, "output file (default stdout)");
  };
  auto add_digits = [&](CLI::App* sub) {
    sub->add_option("--digits", cfg.digits, "working decimal digits (default 50 or PENNER_DIGITS)");
  };

  auto* fe = app.add_subcommand("free-energy", "exact free energy and its oscillatory/perturbative split along a sequence");
  auto* fe_g = fe->add_option("--g", cfg.g, "single coupling g (needs --n)");
  auto* fe_t = fe->add_option("--t", cfg.t, "'t Hooft parameter t");
  fe->add_option("--l", cfg.l, "KM parameter l in [0, 1]");
  fe->add_option("--c", cfg.c, "KM constant c (default 1)");
  fe->add_flag("--thooft", cfg.thooft, "use g_n = t/n");
  fe->add_option("--n", cfg.n, "single matrix size");
  fe->add_option("--n-min", cfg.n_min, "first n (default 1)");
  fe->add_option("--n-max", cfg.n_max, "last n (default 100)");
  fe->add_option("--step", cfg.step, "n increment (default 1)");
  fe->add_option("--K", cfg.K, "perturbative truncation order (default 4)");
  fe_g->excludes(fe_t);
  add_format(fe);
  add_digits(fe);

  auto* cl = app.add_subcommand("cloud", "saddle points at finite n against the limiting support");
  cl->add_option("--n", cfg.n, "matrix size, at most 512")->required();
  cl->add_option("--t", cfg.t, "'t Hooft parameter t")->required();
  cl->add_option("--l", cfg.l, "KM parameter l (default: 't Hooft sequence)");
  cl->add_option("--c", cfg.c, "KM constant c (default 0.5; c = 1 with l = 1 makes 1/g_n an integer)");
  cl->add_flag("--thooft", cfg.thooft, "use g_n = t/n even when --l is given");
  cl->add_option("--samples", cfg.samples, "support samples (default 512, at least 1024 used)");
  add_format(cl);
  add_digits(cl);

  auto* su = app.add_subcommand("support", "limiting support of the saddle points");
  su->add_option("--t", cfg.t, "'t Hooft parameter t")->required();
  su->add_option("--l", cfg.l, "KM parameter l (default 1)");
  su->add_option("--samples", cfg.samples, "samples per curved piece (default 512)");
  su->add_option("--plane", cfg.plane, "penner or laguerre (default penner)");
  add_format(su);

  auto* de = app.add_subcommand("density", "limiting density along the support");
  de->add_option("--t", cfg.t, "'t Hooft parameter t")->required();
  de->add_option("--l", cfg.l, "KM parameter l (default 1)");
  de->add_option("--samples", cfg.samples, "samples per curved piece (default 512)");
  de->add_option("--plane", cfg.plane, "penner or laguerre (default penner)");
  add_format(de);

  auto* pd = app.add_subcommand("phase-diagram", "planar free energy over a (t, l) grid");
  pd->add_option("--t-range", cfg.t_range, "MIN MAX STEPS (default 0.2 3 20)")->expected(3);
  pd->add_option("--l-range", cfg.l_range, "MIN MAX STEPS (default 0.1 1 20)")->expected(3);
  pd->add_option("--dt", cfg.h, "finite-difference step for dF/dt (default 1e-6)");
  add_format(pd);
  add_digits(pd);

  auto* eu = app.add_subcommand("euler", "virtual Euler characteristics against the expansion coefficients");
  eu->add_option("--k-max", cfg.k_max, "largest genus (default 3)");
  eu->add_option("--s-max", cfg.s_max, "largest number of punctures (default 5)");
  add_format(eu);

  auto* ve = app.add_subcommand("verify", "run acceptance checks");
  ve->add_option("suite", cfg.suite, "barnes, partition, expansion, spectral or all (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArgs;
  }

  try {
    if (const char* env = std::getenv("PENNER_DIGITS")) {
      char* end = nullptr;
      const long d = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || d < 30 || d > 100000) throw BadArgs("PENNER_DIGITS must be an integer >= 30");
    }
    if (fe->parsed()) return cmd_free_energy(cfg);
    if (cl->parsed()) return cmd_cloud(cfg);
    if (su->parsed()) return cmd_support(cfg);
    if (de->parsed()) return cmd_density(cfg);
    if (pd->parsed()) return cmd_phase_diagram(cfg);
    if (eu->parsed()) return cmd_euler(cfg);
    if (ve->parsed()) return cmd_verify(cfg);
  } catch (const BadArgs& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadArgs;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::DomainError ? kBadArgs : kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kBadArgs;
}
