#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "wedgeframe/cli.hpp"

using namespace wedgeframe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wf_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

// Runs the tool and returns its exit status; stdout and stderr go to log.
int tool(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(WEDGEFRAME_TOOL) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config round trip") {
  cli::ExperimentConfig c;
  CHECK(cli::parse_config(cli::serialize_config(c)) == c);
  c.command = cli::Command::Identify;
  c.witness.p2 = kInf;
  c.witness.matrix.kind = "power-wedge";
  c.witness.matrix.w = {2.5, 3.25, 0.125};
  c.frame.sizes = {3, 5};
  c.density.radii = {1.5, 2.75};
  c.identify.h = 1.0 / 96.0;
  c.tailsum.K1 = {7, 9};
  c.tailsum.q1 = kInf;
  c.seed = 123456789012345ULL;
  c.cert_slack = 0.1 / 3.0;
  const std::string s = cli::serialize_config(c);
  CHECK(cli::parse_config(s) == c);
  CHECK(cli::serialize_config(cli::parse_config(s)) == s);
}

TEST_CASE("config validation") {
  CHECK_THROWS_WITH_AS(cli::parse_config("{\"bogus\": 1}"), doctest::Contains("CONFIG"), Error);
  CHECK_THROWS_WITH_AS(cli::parse_config("{"), doctest::Contains("CONFIG"), Error);
  CHECK_THROWS_WITH_AS(cli::parse_config("{\"witness\": {\"epsilon\": \"x\"}}"), doctest::Contains("CONFIG"), Error);
  cli::ExperimentConfig c;
  c.format = "xml";
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(cli::exit_code_for(ErrorCode::CertFail) == 2);
  CHECK(cli::exit_code_for(ErrorCode::Exponents) == 1);
  CHECK(cli::exit_code_for(ErrorCode::NoKernel) == 3);
}

TEST_CASE("tailsum and density commands") {
  const fs::path dir = scratch("tail");
  spit(dir / "c.json", R"({"tailsum": {"d": 1, "p2": 2, "q1": 2, "w": {"C": 1, "alpha": 2, "beta": 0}, "K1": [5, 10, 20, 40]},
    "density": {"mu": 1.25, "coverage": 40, "radii": [5, 10, 20]}})");
  REQUIRE(tool("tailsum --config " + (dir / "c.json").string() + " --out " + (dir / "o").string(), dir / "log") == 0);
  std::istringstream csv(slurp(dir / "o" / "tailsum.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "K1,upper,lower");
  double prev = 1e300;
  int n = 0;
  while (std::getline(csv, line)) {
    const double upper = std::stod(line.substr(line.find(',') + 1));
    CHECK(upper < prev);
    prev = upper;
    ++n;
  }
  CHECK(n == 4);
  CHECK(fs::exists(dir / "o" / "tailsum.dat"));

  REQUIRE(tool("density --config " + (dir / "c.json").string() + " --out " + (dir / "o").string(), dir / "log") == 0);
  const std::string log = slurp(dir / "log");
  const double lower = std::stod(log.substr(log.find("lower=") + 6));
  CHECK(std::abs(lower - 0.64) <= 0.05 * 0.64);
}

TEST_CASE("frame command on an empty sequence") {
  const fs::path dir = scratch("frame");
  spit(dir / "empty.csv", "# no points\n");
  spit(dir / "c.json", "{\"frame\": {\"gamma_file\": \"" + (dir / "empty.csv").string() + "\", \"sizes\": [4]}}");
  REQUIRE(tool("frame --config " + (dir / "c.json").string() + " --out " + dir.string(), dir / "log") == 0);
  CHECK(slurp(dir / "frame.csv") == "N,rows,cols,sigma_min\n0,0,0,0\n");
}

TEST_CASE("witness command and exit codes") {
  const fs::path dir = scratch("witness");
  spit(dir / "ok.json", R"({"witness": {"matrix": {"kind": "gauss-gabor", "d": 2, "mu": 1.25, "lambda": 1.1, "radius": 60},
    "epsilon": 0.1}})");
  REQUIRE(tool("witness --config " + (dir / "ok.json").string() + " --out " + dir.string(), dir / "log") == 0);
  CHECK(slurp(dir / "log").find("epsilon=0.10000000000000001 total_bound=") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "witness.json"));
  CHECK(j.at("total_bound").get<double>() <= 0.105);

  spit(dir / "exp.json", R"({"witness": {"matrix": {"kind": "power-wedge", "d": 1, "lambda": 2}, "p1": 0.5}})");
  CHECK(tool("witness --config " + (dir / "exp.json").string() + " --out " + dir.string(), dir / "log") == 1);
  CHECK(slurp(dir / "log").find("EXPONENTS") != std::string::npos);

  spit(dir / "div.json",
       R"({"witness": {"matrix": {"kind": "power-wedge", "d": 1, "lambda": 2, "w": {"C": 1, "alpha": 1, "beta": 0}}}})");
  CHECK(tool("witness --config " + (dir / "div.json").string() + " --out " + dir.string(), dir / "log") == 1);
  CHECK(slurp(dir / "log").find("DIVERGENT_TAIL") != std::string::npos);

  CHECK(tool("witness --config " + (dir / "missing.json").string(), dir / "log") == 1);
  CHECK(tool("bogus --config " + (dir / "ok.json").string(), dir / "log") == 1);
  CHECK(tool("witness", dir / "log") == 1);
}

TEST_CASE("power-wedge witness through the CLI") {
  const fs::path dir = scratch("pw");
  spit(dir / "c.json", R"({"witness": {"matrix": {"kind": "power-wedge", "d": 1, "lambda": 2,
    "w": {"C": 1, "alpha": 4, "beta": 0}}, "epsilon": 0.01, "p2": "inf"}, "io": {"format": "json"}})");
  REQUIRE(tool("witness --config " + (dir / "c.json").string() + " --out " + dir.string(), dir / "log") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "witness.json"));
  CHECK(j.at("total_bound").get<double>() <= 0.0105);
}

TEST_CASE("outputs are byte deterministic") {
  const fs::path dir = scratch("det");
  spit(dir / "c.json", R"({"identify": {"sizes": [2, 3], "g": {"kind": "mixture"}},
    "tailsum": {"K1": [5, 10]}, "density": {"radii": [4, 8], "coverage": 20}})");
  for (const std::string cmd : {"identify", "tailsum", "density"}) {
    for (const std::string threads : {"1", "3"}) {
      REQUIRE(tool(cmd + " --config " + (dir / "c.json").string() + " --seed 9 --threads " + threads + " --out " +
                       (dir / ("r" + threads)).string(),
                   dir / "log") == 0);
    }
    CHECK(slurp(dir / "r1" / (cmd + ".csv")) == slurp(dir / "r3" / (cmd + ".csv")));
  }
  REQUIRE(tool("identify --config " + (dir / "c.json").string() + " --seed 10 --out " + (dir / "s10").string(),
               dir / "log") == 0);
  CHECK(slurp(dir / "r1" / "identify.csv") != slurp(dir / "s10" / "identify.csv"));
}
