#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "ipm/io.hpp"
#include "ipm/measures.hpp"

using namespace ipm;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the installed binary with stderr dropped; stdout and the exit code
// are what the tests inspect.
CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(IPM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int raw = pclose(pipe);
  CliResult res;
  res.out = out;
  res.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

std::string temp_dir(const char* tag) {
  std::string dir = std::string("/tmp/ipm_cli_") + tag + "_XXXXXX";
  std::vector<char> buf(dir.begin(), dir.end());
  buf.push_back('\0');
  REQUIRE(mkdtemp(buf.data()) != nullptr);
  return std::string(buf.data());
}

std::string write_dirac_pair(const std::string& dir) {
  DiscreteMeasure p{{Point{{0.0}}}, {1.0}};
  DiscreteMeasure q{{Point{{1.0}}}, {1.0}};
  save_measure_csv(p, dir + "/p.csv");
  save_measure_csv(q, dir + "/q.csv");
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("").code == 1);                        // a subcommand is required
  CHECK(run_cli("bounds --n 100 --bogus 3").code == 1);
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("compute --help").code == 0);
}

TEST_CASE("compute prints the distance and an optional witness") {
  const std::string dir = write_dirac_pair(temp_dir("compute"));
  const std::string base =
      "compute --p " + dir + "/p.csv --q " + dir + "/q.csv";

  CliResult sum = run_cli(base + " --ball sum");
  CHECK(sum.code == 0);
  CHECK(sum.out == "0.66666666666666674\n");

  CliResult max = run_cli(base + " --ball max --witness " + dir + "/w.csv");
  CHECK(max.code == 0);
  CHECK(max.out == "1\n");

  // the witness file holds a feasible optimizer: header, then one row per
  // support point with its coordinates and value
  std::istringstream w(read_file(dir + "/w.csv"));
  std::string line;
  REQUIRE(std::getline(w, line));
  CHECK(line == "index,x1,f");
  double f0 = 0.0, f1 = 0.0;
  REQUIRE(std::getline(w, line));
  CHECK(line.rfind("0,0,", 0) == 0);
  f0 = std::stod(line.substr(4));
  REQUIRE(std::getline(w, line));
  CHECK(line.rfind("1,1,", 0) == 0);
  f1 = std::stod(line.substr(4));
  CHECK(f0 - f1 == doctest::Approx(1.0).epsilon(1e-9));  // attains the optimum
  CHECK(std::abs(f0) <= 1.0 + 1e-9);
  CHECK(std::abs(f1) <= 1.0 + 1e-9);

  SUBCASE("failure modes") {
    CHECK(run_cli(base + " --alpha 1.5").code == 1);
    CHECK(run_cli(base + " --norm l3").code == 1);
    CHECK(run_cli("compute --p " + dir + "/p.csv --q " + dir +
                  "/missing.csv").code == 3);
  }
}

TEST_CASE("bounds emits one CSV row per sample size") {
  CliResult res = run_cli("bounds --alpha 1 --d 4 --n 100 --lambda 1");
  CHECK(res.code == 0);
  CHECK(res.out == "n,bound,mode,branch\n100,7.5894663844041101,branch,alpha<d/2\n");

  CliResult multi = run_cli("bounds --alpha 1 --d 1 --n 100,1000,10000");
  CHECK(multi.code == 0);
  std::istringstream lines(multi.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "n,bound,mode,branch");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 3);

  CHECK(run_cli("bounds --n 100 --mode bogus").code == 1);
  CHECK(run_cli("bounds --alpha 0 --n 100").code == 1);
}

TEST_CASE("entropy reports net growth with a fitted order") {
  CliResult res = run_cli("entropy --alpha 1 --d 1 --eps 0.4,0.3,0.2,0.15,0.1");
  CHECK(res.code == 0);
  CHECK(res.out.rfind("eps,log_size\n", 0) == 0);
  CHECK(res.out.find("# fitted_exponent=1.0326301627660064") !=
        std::string::npos);

  CliResult rough =
      run_cli("entropy --alpha 0.5 --d 1 --eps 0.4,0.3,0.2,0.15,0.1");
  CHECK(rough.code == 0);
  CHECK(rough.out.find("# fitted_exponent=2.014074428709884") !=
        std::string::npos);

  CHECK(run_cli("entropy --alpha 1 --d 1 --eps 0.4,0.3").code == 1);
}

TEST_CASE("rademacher subcommand is deterministic under a fixed seed") {
  const std::string dir = temp_dir("rad");
  DiscreteMeasure sample{{Point{{0.0}}, Point{{1.0}}}, {0.5, 0.5}};
  save_measure_csv(sample, dir + "/s.csv");
  const std::string cmd =
      "rademacher --sample " + dir + "/s.csv --draws 200 --seed 7";

  CliResult a = run_cli(cmd);
  CHECK(a.code == 0);
  CHECK(a.out.rfind("mean,stderr\n", 0) == 0);
  std::istringstream row(a.out.substr(a.out.find('\n') + 1));
  double mean = -1.0, se = -1.0;
  char comma = 0;
  REQUIRE((row >> mean >> comma >> se));
  CHECK(mean > 0.0);
  CHECK(mean <= 1.0 + 1e-12);  // never exceeds the class radius here
  CHECK(se >= 0.0);

  CliResult b = run_cli(cmd);
  CHECK(b.out == a.out);

  CHECK(run_cli("rademacher --sample " + dir + "/s.csv --draws 0").code == 1);
  CHECK(run_cli("rademacher --sample " + dir + "/nope.csv").code == 3);
}

TEST_CASE("rates runs from a config file, flags override, output repeats") {
  const std::string dir = temp_dir("rates");
  const std::string cfg = dir + "/run.cfg";
  atomic_write_file(cfg,
                    "# convergence study on the unit interval\n"
                    "alpha = 1\n"
                    "d = 1\n"
                    "grid_per_axis = 1024\n"
                    "n_list = 16,32,64\n"
                    "reps = 5\n"
                    "seed = 42\n"
                    "out_dir = " + dir + "/cfg_out\n");

  CliResult a = run_cli("rates --config " + cfg + " --out-dir " + dir + "/a");
  CHECK(a.code == 0);
  CHECK(a.out.rfind("p_hat,stderr_p,r2\n0.58158988261346489,", 0) == 0);

  CliResult b = run_cli("rates --config " + cfg + " --out-dir " + dir + "/b");
  CHECK(b.out == a.out);

  // the --out-dir flag wins over the config value
  for (const char* name : {"records.csv", "summary.csv", "fit.csv", "rates.svg"})
    CHECK_NOTHROW(read_file(dir + "/a/" + name));
  CHECK_THROWS_AS(read_file(dir + "/cfg_out/records.csv"), IoError);

  SUBCASE("config file validation") {
    atomic_write_file(dir + "/bad.cfg", "alpha = 1\nwavelength = 3\n");
    CHECK(run_cli("rates --config " + dir + "/bad.cfg").code == 1);
    atomic_write_file(dir + "/short.cfg",
                      "alpha = 1\nd = 1\nn_list = 16,32\nreps = 5\n");
    CHECK(run_cli("rates --config " + dir + "/short.cfg").code == 1);
    CHECK(run_cli("rates --config " + dir + "/absent.cfg").code == 3);
  }
}

TEST_CASE("symcheck reports the two sides and passes on a lattice truth") {
  const std::string dir = temp_dir("sym");
  const std::string cfg = dir + "/run.cfg";
  atomic_write_file(cfg,
                    "alpha = 1\n"
                    "d = 1\n"
                    "grid_per_axis = 1024\n"
                    "n_list = 8,16,32\n"
                    "reps = 5\n"
                    "seed = 42\n");

  CliResult a = run_cli("symcheck --config " + cfg);
  CHECK(a.code == 0);
  CHECK(a.out.rfind("n,lhs_mean,rhs_mean,margin,pass\n32,", 0) == 0);
  CHECK(a.out.find(",1\n") != std::string::npos);

  CliResult b = run_cli("symcheck --config " + cfg);
  CHECK(b.out == a.out);

  CHECK(run_cli("symcheck --config " + cfg + " --sign-draws 10").code == 1);
}
