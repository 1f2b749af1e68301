// End-to-end checks of the command-line tool: exit codes, file formats,
// determinism. The binary path comes in through LONGMEM_CLI_PATH.

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "longmem/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = LONGMEM_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

RunResult run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd =
      kCli + " " + args + " > " + out.string() + " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = rc == -1 ? -1 : WEXITSTATUS(rc);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("longmem_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

// pull the first number following "key": from a JSON string
double json_number(const std::string& body, const std::string& key) {
  const auto pos = body.find('"' + key + '"');
  REQUIRE(pos != std::string::npos);
  auto colon = body.find(':', pos);
  REQUIRE(colon != std::string::npos);
  auto start = body.find_first_not_of(" \t\n[", colon + 1);
  return std::stod(body.substr(start));
}

}  // namespace

TEST_CASE("cli: simulate writes the requested number of rows, repeatably") {
  const auto dir = fresh_dir("simulate");
  const std::string series = (dir / "series.csv").string();
  auto r = run("simulate --delta 0.3 --n 1024 --seed 7 --out " + series, dir);
  REQUIRE(r.exit_code == 0);
  const std::string first = slurp(series);
  REQUIRE(count_lines(first) == 1025);  // header + 1024 rows
  REQUIRE(first.substr(0, 2) == "x\n");

  r = run("simulate --delta 0.3 --n 1024 --seed 7 --out " + series, dir);
  REQUIRE(r.exit_code == 0);
  REQUIRE(slurp(series) == first);  // byte identical
}

TEST_CASE("cli: simulate rejects an inadmissible delta with exit 2") {
  const auto dir = fresh_dir("simbad");
  const auto r = run("simulate --delta 0.6 --n 64 --out " +
                         (dir / "x.csv").string(),
                     dir);
  REQUIRE(r.exit_code == 2);
  REQUIRE(r.err.find("memory parameter") != std::string::npos);
}

TEST_CASE("cli: simulate can emit the innovation record") {
  const auto dir = fresh_dir("siminn");
  const std::string series = (dir / "path.csv").string();
  const auto r = run("simulate --delta 0.25 --n 128 --seed 3 --method "
                     "truncated-ma --emit-innovations --out " + series,
                     dir);
  REQUIRE(r.exit_code == 0);
  const std::string eps = slurp(dir / "path.innovations.csv");
  REQUIRE(count_lines(eps) == 129);
  REQUIRE(eps.substr(0, 4) == "eps\n");
}

TEST_CASE("cli: estimate recovers delta and reports JSON") {
  const auto dir = fresh_dir("estimate");
  const std::string series = (dir / "series.csv").string();
  REQUIRE(run("simulate --delta 0.3 --n 2048 --seed 11 --out " + series, dir)
              .exit_code == 0);
  const auto r = run("estimate --in " + series, dir);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("\"theta_hat\"") != std::string::npos);
  REQUIRE(json_number(r.out, "delta") == Catch::Approx(0.3).margin(0.052));
  REQUIRE(json_number(r.out, "n") == 2048);

  const auto w = run("estimate --estimator whittle --in " + series, dir);
  REQUIRE(w.exit_code == 0);
  REQUIRE(json_number(w.out, "n") == 2048);
  REQUIRE(w.out.find("\"estimator\": \"whittle\"") != std::string::npos);
}

TEST_CASE("cli: estimate input validation uses exit 2") {
  const auto dir = fresh_dir("estbad");
  const fs::path empty = dir / "empty.csv";
  std::ofstream(empty).close();
  REQUIRE(run("estimate --in " + empty.string(), dir).exit_code == 2);

  const fs::path garbled = dir / "garbled.csv";
  {
    std::ofstream os(garbled);
    os << "x\n1.0\nnot-a-number\n";
  }
  REQUIRE(run("estimate --in " + garbled.string(), dir).exit_code == 2);
  REQUIRE(run("estimate --in " + (dir / "missing.csv").string(), dir)
              .exit_code == 2);
}

TEST_CASE("cli: info reports the pure-fractional omega and se table") {
  const auto dir = fresh_dir("info");
  const auto r = run("info --delta 0.3 --n 1024", dir);
  REQUIRE(r.exit_code == 0);
  // omega = pi^2/6 and se(1024) = sqrt(6/pi^2/1024)
  REQUIRE(json_number(r.out, "omega") == Catch::Approx(1.6449341).margin(1e-4));
  REQUIRE(json_number(r.out, "se") == Catch::Approx(0.02437).margin(1e-5));
}

TEST_CASE("cli: spectrum excludes the origin and counts rows") {
  const auto dir = fresh_dir("spectrum");
  const auto r = run("spectrum --delta 0.3 --grid 64", dir);
  REQUIRE(r.exit_code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  REQUIRE(line == "lambda,f");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    const double lambda = std::stod(line);
    REQUIRE(lambda > 0.0);
  }
  REQUIRE(rows == 64);
}

TEST_CASE("cli: montecarlo runs a config and reruns identically") {
  const auto dir = fresh_dir("mc");
  const fs::path cfg = dir / "exp.cfg";
  const fs::path report = dir / "report.json";
  {
    std::ofstream os(cfg);
    os << "# tiny smoke experiment\n"
       << "theta.delta = 0.3\n"
       << "sigma2 = 1.0\n"
       << "n_grid = 64\n"
       << "replications = 3\n"
       << "law = gaussian\n"
       << "estimators = css\n"
       << "master_seed = 555\n"
       << "out = " << report.string() << "\n";
  }
  auto r = run("montecarlo --config " + cfg.string(), dir);
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(report));
  const std::string first = slurp(report);
  REQUIRE(first.find("\"aggregates\"") != std::string::npos);

  r = run("montecarlo --config " + cfg.string(), dir);
  REQUIRE(r.exit_code == 0);
  REQUIRE(slurp(report) == first);

  // R = 1 marks aggregates low-confidence
  r = run("montecarlo --config " + cfg.string() + " --replications 1", dir);
  REQUIRE(r.exit_code == 0);
  REQUIRE(slurp(report).find("\"low_confidence\": true") != std::string::npos);
}

TEST_CASE("cli: montecarlo rejects malformed configs with exit 2") {
  const auto dir = fresh_dir("mcbad");
  const fs::path cfg = dir / "bad.cfg";
  {
    std::ofstream os(cfg);
    os << "theta.delta = 0.3\nn_grid = 64\nunknown_key = 1\n";
  }
  REQUIRE(run("montecarlo --config " + cfg.string(), dir).exit_code == 2);
  REQUIRE(run("montecarlo --config " + (dir / "nope.cfg").string(), dir)
              .exit_code == 2);
}

TEST_CASE("cli: the shipped acceptance config reproduces the sampling bands") {
  const auto dir = fresh_dir("acccfg");
  const fs::path report = dir / "rep.json";
  const std::string cfg =
      std::string(LONGMEM_CONFIG_DIR) + "/acceptance_sampling.cfg";
  const auto r = run("montecarlo --config " + cfg + " --out " + report.string(),
                     dir);
  REQUIRE(r.exit_code == 0);
  const std::string body = slurp(report);
  REQUIRE(std::abs(json_number(body, "bias")) < 0.015);
  const double var = json_number(body, "cov_scaled");
  REQUIRE(var == Catch::Approx(0.6079271018540267).epsilon(0.15));
  const double cover = json_number(body, "coverage95_delta");
  REQUIRE(cover >= 0.92);
  REQUIRE(cover <= 0.975);
  REQUIRE(json_number(body, "ks_pvalue") > 0.01);
  REQUIRE(json_number(body, "nonconverged") == 0.0);
}

TEST_CASE("cli: model config file feeds simulate") {
  const auto dir = fresh_dir("modelcfg");
  const fs::path cfg = dir / "model.cfg";
  {
    std::ofstream os(cfg);
    os << "order.p = 1\norder.q = 0\ntheta.delta = 0.2\ntheta.ar = 0.5\n"
       << "theta.ma =\nsigma2 = 1.5\n";
  }
  const std::string series = (dir / "s.csv").string();
  const auto r = run("simulate --config " + cfg.string() +
                         " --n 64 --seed 5 --out " + series,
                     dir);
  REQUIRE(r.exit_code == 0);
  REQUIRE(count_lines(slurp(series)) == 65);
}
