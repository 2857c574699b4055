// End-to-end checks of the command-line binary. Each case shells out to
// ./odmts, so these run from the build directory where ctest starts them.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "odmts/io.hpp"
#include "support/fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  fs::path dir = "cli_test_tmp";
  fs::create_directories(dir);
  std::string cmd = "./odmts " + args + " > cli_test_tmp/out.txt 2> cli_test_tmp/err.txt";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "out.txt");
  r.err = slurp(dir / "err.txt");
  return r;
}

std::string fixture_file() {
  static std::string path;
  if (path.empty()) {
    fs::create_directories("cli_test_tmp");
    path = "cli_test_tmp/line.json";
    odmts::save_instance(fixtures::line_instance(), path);
  }
  return path;
}

}  // namespace

TEST_CASE("generate is deterministic and loadable") {
  auto a = run("generate --seed 11 --stops 9 --hubs 3 --fixed-arcs 2 "
               "--candidate-arcs 6 --core 4 --latent 3 --out cli_test_tmp/a.json");
  REQUIRE(a.exit_code == 0);
  auto b = run("generate --seed 11 --stops 9 --hubs 3 --fixed-arcs 2 "
               "--candidate-arcs 6 --core 4 --latent 3 --out cli_test_tmp/b.json");
  REQUIRE(b.exit_code == 0);
  CHECK(slurp("cli_test_tmp/a.json") == slurp("cli_test_tmp/b.json"));
  auto inst = odmts::load_instance("cli_test_tmp/a.json");
  CHECK(inst.stops.size() == 9);
  CHECK(inst.trips.size() == 7);

  // stdout emission is the same document
  auto c = run("generate --seed 11 --stops 9 --hubs 3 --fixed-arcs 2 "
               "--candidate-arcs 6 --core 4 --latent 3");
  CHECK(c.out == slurp("cli_test_tmp/a.json"));
}

TEST_CASE("solve writes a report and finds the known optimum") {
  auto r = run("solve --instance " + fixture_file() +
               " --out-dir cli_test_tmp/run --geojson");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("status optimal") != std::string::npos);

  auto rep = json::parse(slurp("cli_test_tmp/run/report.json"));
  CHECK(rep["status"] == "optimal");
  CHECK(rep["objective"]["total"].get<double>() == doctest::Approx(51.0));
  CHECK(rep["design"]["opened"] == 0);

  auto geo = json::parse(slurp("cli_test_tmp/run/design.geojson"));
  CHECK(geo["type"] == "FeatureCollection");
}

TEST_CASE("oracle and compare agree on the fixture") {
  auto r = run("oracle --instance " + fixture_file() + " --paranoid");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["objective"].get<double>() == doctest::Approx(51.0));
  CHECK(doc["designs_checked"] == 4);

  auto c = run("compare --instance " + fixture_file());
  CHECK(c.exit_code == 0);
  CHECK(c.out.find("NO") == std::string::npos);

  auto cl = run("compare --instance " + fixture_file() + " --follower lex");
  CHECK(cl.exit_code == 0);
}

TEST_CASE("enumerate and export-model write to stdout") {
  auto e = run("enumerate --instance " + fixture_file() + " --enum pe");
  REQUIRE(e.exit_code == 0);
  auto doc = json::parse(e.out);
  CHECK(doc["method"] == "pe");
  CHECK(doc["trips"].size() == 1);
  CHECK(doc["trips"][0]["complete"] == true);

  auto m = run("export-model --instance " + fixture_file() +
               " --formulation cpath");
  REQUIRE(m.exit_code == 0);
  CHECK(m.out.find("Minimize") != std::string::npos);
  CHECK(m.out.find("Binaries") != std::string::npos);
}

TEST_CASE("preprocess report carries model size predictions") {
  auto r = run("preprocess-report --instance " + fixture_file() + " --enum pe");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["model_prediction"].contains("rider_flow"));
  CHECK(doc["model_prediction"].contains("path_choice"));
  CHECK(doc["trips"]["total"] == 2);

  // demand-driven sets are incomplete, so no path-choice prediction
  auto d = run("preprocess-report --instance " + fixture_file() +
               " --enum pe-dcm");
  REQUIRE(d.exit_code == 0);
  auto ddoc = json::parse(d.out);
  CHECK(!ddoc["model_prediction"].contains("path_choice"));
}

TEST_CASE("failure exit codes") {
  CHECK(run("solve --instance cli_test_tmp/absent.json").exit_code == 2);
  CHECK(run("solve --instance " + fixture_file() +
            " --formulation cpath --enum pe-dcm --out-dir cli_test_tmp/x")
            .exit_code == 2);
  CHECK(run("generate --candidate-arcs 7").exit_code == 2);
  CHECK(run("solve --bogus-flag").exit_code == 2);
  CHECK(run("").exit_code == 2);

  auto g = run("generate --seed 3 --stops 14 --hubs 6 --fixed-arcs 4 "
               "--candidate-arcs 24 --out cli_test_tmp/wide.json");
  REQUIRE(g.exit_code == 0);
  CHECK(run("oracle --instance cli_test_tmp/wide.json").exit_code == 3);

  fs::create_directories("cli_test_tmp");
  int status = std::system(("ODMTS_SOLVER=null ./odmts solve --instance " +
                            fixture_file() +
                            " --out-dir cli_test_tmp/n > /dev/null 2>&1")
                               .c_str());
  CHECK(WEXITSTATUS(status) == 4);
}

TEST_CASE("preprocessing toggles do not move the objective") {
  std::string base = "solve --instance " + fixture_file() + " --out-dir ";
  auto full = run(base + "cli_test_tmp/p0");
  auto none = run(base + "cli_test_tmp/p1 --no-preprocess");
  auto some = run(base + "cli_test_tmp/p2 --no-preprocess=paths,shuttle-legs");
  REQUIRE(full.exit_code == 0);
  REQUIRE(none.exit_code == 0);
  REQUIRE(some.exit_code == 0);
  auto obj = [](const std::string& dir) {
    return json::parse(slurp(dir + "/report.json"))["objective"]["total"]
        .get<double>();
  };
  CHECK(obj("cli_test_tmp/p0") == doctest::Approx(obj("cli_test_tmp/p1")));
  CHECK(obj("cli_test_tmp/p0") == doctest::Approx(obj("cli_test_tmp/p2")));
}
