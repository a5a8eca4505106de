#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

std::string env(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE_MESSAGE(v != nullptr, name << " is not set");
  return v;
}

Result run(const std::string& args, const std::string& prefix = "") {
  const std::string cmd = prefix + " '" + env("MONOLAB_CLI") + "' " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("monolab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int validate(const std::vector<fs::path>& reports) {
  const std::string src = env("MONOLAB_SOURCE_DIR");
  std::string cmd = "python3 '" + src + "/tests/validate_reports.py' '" + src + "/schema/report.schema.json'";
  for (const auto& r : reports) cmd += " '" + r.string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("pendulum monodromy report") {
  const fs::path dir = scratch("monodromy");
  const Result r = run("--out-dir '" + dir.string() +
                       "' --format all monodromy --system spherical-pendulum --center 0,1 --radius 0.5 --method both");
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["status"] == "ok");
  CHECK(j["result"]["rotation"]["matrix"] == "[[1,1],[0,1]]");
  CHECK(j["result"]["fixed_point"]["matrix"] == "[[1,1],[0,1]]");
  CHECK(fs::exists(dir / "monodromy.json"));
  CHECK(fs::exists(dir / "monodromy.svg"));
  CHECK(fs::exists(dir / "monodromy.timings.json"));
  CHECK(validate({dir / "monodromy.json"}) == 0);
}

TEST_CASE("fractional default") {
  const Result r = run("fractional");
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["result"]["euler_number"] == "1/2");
  CHECK(j["result"]["fractional"]["matrix"] == "[[1,1/2],[0,1]]");
  CHECK(j["result"]["quotient"]["quotient_matrix"] == "[[1,1],[0,1]]");
}

TEST_CASE("configuration errors exit with 2") {
  const fs::path dir = scratch("errors");
  {
    std::ofstream(dir / "bad.json") << "{\"command\": \"monodromy\", \"radius\": ";
    const Result r = run("--config '" + (dir / "bad.json").string() + "'");
    CHECK(r.code == 2);
    const Json j = Json::parse(r.out);
    CHECK(j["status"] == "error");
    CHECK(j["error"]["kind"] == "invalid-config");
    std::ofstream(dir / "error.json") << r.out;
  }
  {
    std::ofstream(dir / "unknown.json") << "{\"command\": \"monodromy\", \"colour\": 1}";
    CHECK(run("--config '" + (dir / "unknown.json").string() + "'").code == 2);
  }
  CHECK(run("monodromy --system double-pendulum").code == 2);
  CHECK(run("monodromy --radius -1").code == 2);
  CHECK(run("nonsense").code == 2);
  CHECK(run("--format pdf bifurcation").code == 2);
  CHECK(validate({dir / "error.json"}) == 0);
}

TEST_CASE("pipeline errors exit with 1") {
  // A loop through the focus-focus value.
  const Result r = run("monodromy --system spherical-pendulum --center 0,0.5 --radius 0.5 --method fixed-point");
  CHECK(r.code == 1);
  const Json j = Json::parse(r.out);
  CHECK(j["status"] == "error");
  CHECK(j["error"]["kind"] == "reposition-loop");
}

TEST_CASE("reports are deterministic") {
  // Same output directory for both runs, since the report records it.
  const fs::path dir = scratch("det"), first = scratch("det_first");
  const std::string args = "--out-dir '" + dir.string() + "' --format all bifurcation --system resonance-1-2 --resolution 30";
  const char* files[] = {"bifurcation.json", "bifurcation.csv", "bifurcation.svg"};
  CHECK(run(args, "MONODROMY_LAB_THREADS=1").code == 0);
  for (const char* f : files) {
    REQUIRE(fs::exists(dir / f));
    fs::copy_file(dir / f, first / f);
  }
  CHECK(run(args, "MONODROMY_LAB_THREADS=4").code == 0);
  for (const char* f : files) {
    CAPTURE(f);
    CHECK(slurp(first / f) == slurp(dir / f));
  }
  CHECK(validate({dir / "bifurcation.json"}) == 0);
}

TEST_CASE("configuration round trip") {
  const fs::path dir = scratch("config");
  const Result first = run("--dump-config scattering --v0 2 --sigma 0.5 --samples 48");
  REQUIRE(first.code == 0);
  std::ofstream(dir / "c.json") << first.out;
  const Result second = run("--dump-config --config '" + (dir / "c.json").string() + "'");
  REQUIRE(second.code == 0);
  CHECK(first.out == second.out);
  const Json j = Json::parse(first.out);
  CHECK(j["v0"] == 2.0);
  CHECK(j["loop"]["center"][1] == 2.0);
}

TEST_CASE("spectrum and cell transport from a lattice file") {
  const fs::path dir = scratch("lattice");
  const Result s = run("--out-dir '" + dir.string() +
                       "' --format all spectrum --system spherical-pendulum --hbar 0.1 --window=-1.5,1.5,-1,2.5");
  REQUIRE(s.code == 0);
  REQUIRE(fs::exists(dir / "spectrum.csv"));
  const Result t = run("--out-dir '" + dir.string() + "' cell-transport --system spherical-pendulum --lattice '" +
                       (dir / "spectrum.csv").string() + "' --center 0,1 --radius 0.5 --multiplier 1");
  CHECK(t.code == 0);
  CHECK(Json::parse(t.out)["result"]["matrix"] == "[[1,1],[0,1]]");
  CHECK(validate({dir / "spectrum.json", dir / "cell-transport.json"}) == 0);
}

TEST_CASE("selftest and scattering reports validate") {
  const fs::path dir = scratch("misc");
  CHECK(run("--out-dir '" + dir.string() + "' selftest").code == 0);
  const Result r = run("--out-dir '" + dir.string() + "' scattering --system radial-bump --v0 1 --sigma 1 --center 0,1 --radius 0.4");
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["result"]["matrix"] == "[[1,1],[0,1]]");
  CHECK(validate({dir / "selftest.json", dir / "scattering.json"}) == 0);
}
