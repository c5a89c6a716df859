#include "penner/io.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdout of `penner <args>`, stderr discarded
Run run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " PENNER_BIN " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST(Io, SeventeenDigitsAndEmptyCells) {
  penner::io::Table t{{"x", "status"}, {}};
  t.add({0.1, std::string("ok")});
  t.add({-0.0, std::string("a,b")});
  t.add({{}, std::string("GBarnesZero")});
  std::ostringstream csv, json;
  penner::io::write_csv(csv, t);
  EXPECT_EQ(csv.str(), "x,status\n0.10000000000000001,ok\n0,\"a,b\"\n,GBarnesZero\n");
  penner::io::write_json(json, t);
  EXPECT_EQ(json.str(),
            "[\n {\"x\": 0.10000000000000001, \"status\": \"ok\"},\n {\"x\": 0, \"status\": \"a,b\"},\n"
            " {\"x\": null, \"status\": \"GBarnesZero\"}\n]\n");
}

TEST(Io, SvgHasOnePolylinePerLineAndOneCirclePerPoint) {
  penner::io::Figure f;
  f.lines.push_back({{{0, 0}, {1, 1}}, "#000000"});
  f.scatter = {{0.5, 0.5}, {0.2, 0.1}};
  std::ostringstream os;
  penner::io::write_svg(os, f);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  std::size_t circles = 0;
  for (std::size_t i = s.find("<circle"); i != std::string::npos; i = s.find("<circle", i + 1)) ++circles;
  EXPECT_EQ(circles, 2u);
  EXPECT_NE(s.find("<polyline"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("free-energy --n 3 --g 0.3").code, 0);
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("free-energy --t abc").code, 2);
  EXPECT_EQ(run_cli("free-energy --n 3 --g 0.3 --t 2").code, 2);
  EXPECT_EQ(run_cli("cloud --n 600 --t 1.5").code, 2);
  EXPECT_EQ(run_cli("verify nonsense").code, 2);
  EXPECT_EQ(run_cli("euler", "PENNER_DIGITS=10").code, 2);
  EXPECT_EQ(run_cli("density --t 0.5 --format svg").code, 2);
  // g = 1/2 puts the exact free energy on a pole
  EXPECT_EQ(run_cli("free-energy --n 2 --g 0.5").code, 3);
  EXPECT_EQ(run_cli("verify barnes").code, 0);
}

TEST(Cli, PoleRowsAreFlaggedAndSweepContinues) {
  // 't Hooft t = 1/2: every g_n = 1/(2n) is a pole
  auto r = run_cli("free-energy --thooft --t 0.5 --n-min 1 --n-max 4");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.out,
            "n,g_n,t_n,exact,osc,per,residual,planar_limit,status\n"
            "1,0.5,0.5,,,,,,GBarnesZero\n2,0.25,0.5,,,,,,GBarnesZero\n"
            "3,0.16666666666666666,0.5,,,,,,GBarnesZero\n4,0.125,0.5,,,,,,GBarnesZero\n");
}

TEST(Cli, OutputIsDeterministic) {
  for (const char* args : {"free-energy --t 2 --l 0.5 --c 1 --n-max 40 --format json", "phase-diagram --format csv",
                           "support --t 2 --l 0.5 --samples 64", "euler --format json"}) {
    auto a = run_cli(args), b = run_cli(args);
    EXPECT_EQ(a.code, 0) << args;
    EXPECT_FALSE(a.out.empty()) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, DigitsFromEnvironment) {
  auto a = run_cli("free-energy --n 20 --g 0.07", "PENNER_DIGITS=40");
  auto b = run_cli("free-energy --n 20 --g 0.07 --digits 90");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CloudSummaryAndRows) {
  auto r = run_cli("cloud --n 20 --t 0.9");
  EXPECT_EQ(r.code, 0);
  std::size_t saddles = 0;
  for (std::size_t i = r.out.find("\nsaddle,"); i != std::string::npos; i = r.out.find("\nsaddle,", i + 1)) ++saddles;
  EXPECT_EQ(saddles, 20u);
  EXPECT_NE(r.out.find("\nsupport,0,arc,"), std::string::npos);
}

TEST(Cli, PhaseDiagramFlagsSingularAndCriticalRows) {
  auto r = run_cli("phase-diagram --t-range 0.5 1.5 3 --l-range 0 1 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.5,0,,,singular,SingularPhase\n"), std::string::npos);
  EXPECT_NE(r.out.find("1,1,0.25,,critical,CriticalT\n"), std::string::npos);
}
