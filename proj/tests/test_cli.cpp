#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dld/cli.hpp"
#include "dld/io.hpp"

namespace fs = std::filesystem;
using dld::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dld_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("unknown or missing map is a usage error") {
  const auto a = invoke({"field", "--map", "nope"});
  CHECK(a.code == dld::cli::kUsage);
  CHECK(a.err.find("linear-saddle") != std::string::npos);
  CHECK(a.err.find("henon") != std::string::npos);

  const auto b = invoke({"field"});
  CHECK(b.code == dld::cli::kUsage);
  CHECK(invoke({}).code == dld::cli::kUsage);
  CHECK(invoke({"field", "--map", "linear-saddle", "--bogus"}).code == dld::cli::kUsage);
}

TEST_CASE("seed is rejected") {
  CHECK(invoke({"field", "--map", "linear-saddle", "--seed", "1"}).code == dld::cli::kUsage);
}

TEST_CASE("oracle check") {
  const auto a = invoke({"oracle-check", "--map", "linear-saddle", "--lambda", "1.1", "--p", "0.5", "--N", "20"});
  CHECK(a.code == dld::cli::kOk);
  CHECK(a.out.find("PASS") != std::string::npos);

  CHECK(invoke({"oracle-check", "--map", "normal-form", "--u2", "0.5"}).code == dld::cli::kOk);
  CHECK(invoke({"oracle-check", "--map", "nonautonomous-linear", "--lambda-cycle", "1.1,1.3,1.05", "--N", "6"})
            .code == dld::cli::kOk);

  const auto bad = invoke({"oracle-check", "--map", "linear-saddle", "--corrupt-lambda", "1e-6"});
  CHECK(bad.code == dld::cli::kFailure);
  CHECK(bad.out.find("FAIL") != std::string::npos);

  CHECK(invoke({"oracle-check", "--map", "henon"}).code == dld::cli::kUsage);
}

TEST_CASE("field writes every format") {
  const fs::path dir = scratch("field");
  const auto r = invoke({"field", "--map", "linear-saddle", "--nx", "21", "--ny", "11", "--workers", "2", "--out",
                         (dir / "f.pgm").string(), (dir / "f.dldgrid").string(), (dir / "f.csv").string()});
  REQUIRE(r.code == dld::cli::kOk);
  CHECK(r.out.find("nodes=231") != std::string::npos);

  const auto img = dld::io::read_pgm(dir / "f.pgm");
  CHECK(img.width == 21);
  CHECK(img.height == 11);
  const auto f = dld::io::read_dldgrid(dir / "f.dldgrid");
  CHECK(f.grid.nx == 21);
  CHECK(f.params.N == 20);

  std::ifstream csv(dir / "f.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# dld field", 0) == 0);
  std::getline(csv, line);
  CHECK(line.rfind("# config", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("unsupported extension and unwritable path") {
  CHECK(invoke({"field", "--map", "linear-saddle", "--nx", "5", "--ny", "5", "--out", "x.txt"}).code ==
        dld::cli::kUsage);
  CHECK(invoke({"field", "--map", "linear-saddle", "--nx", "5", "--ny", "5", "--out", "/nonexistent/dir/x.csv"})
            .code == dld::cli::kUsage);
}

TEST_CASE("json config with flag override") {
  const fs::path dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.json");
    cfg << R"({"map": "linear-saddle", "lambda": 1.2, "p": 0.5, "N": 10,
               "domain": [-1, 1, -1, 1], "nx": 9, "ny": 7})";
  }
  const auto r = invoke({"field", "--config", (dir / "run.json").string(), "--nx", "11", "--out",
                         (dir / "f.dldgrid").string()});
  REQUIRE(r.code == dld::cli::kOk);
  const auto f = dld::io::read_dldgrid(dir / "f.dldgrid");
  CHECK(f.grid.nx == 11);
  CHECK(f.grid.ny == 7);
  CHECK(f.params.N == 10);
  CHECK(f.grid.xmin == -1.0);

  {
    std::ofstream cfg(dir / "bad.json");
    cfg << "{ not json";
  }
  CHECK(invoke({"field", "--config", (dir / "bad.json").string()}).code == dld::cli::kUsage);
  CHECK(invoke({"field", "--config", (dir / "missing.json").string()}).code == dld::cli::kUsage);
  fs::remove_all(dir);
}

TEST_CASE("transect output") {
  const fs::path dir = scratch("transect");
  const auto r = invoke({"transect", "--map", "linear-saddle", "--out", (dir / "t.csv").string()});
  REQUIRE(r.code == dld::cli::kOk);
  CHECK(r.out.find("crossings=1") != std::string::npos);
  std::ifstream is(dir / "t.csv");
  std::stringstream ss;
  ss << is.rdbuf();
  CHECK(ss.str().find("position,md,derivative") != std::string::npos);
  CHECK(ss.str().find("# crossings: 1") != std::string::npos);

  CHECK(invoke({"transect", "--map", "linear-saddle", "--half-length", "0"}).code == dld::cli::kUsage);
  CHECK(invoke({"transect", "--map", "linear-saddle", "--N", "0"}).code == dld::cli::kUsage);
  fs::remove_all(dir);
}

TEST_CASE("henon without escape radius fails at runtime") {
  const auto r = invoke({"field", "--map", "henon", "--nx", "20", "--ny", "20", "--N", "30", "--no-escape"});
  CHECK(r.code == dld::cli::kFailure);
  CHECK(r.err.find("NonFiniteIterate") != std::string::npos);
}
