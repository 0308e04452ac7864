#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& scratch,
                  const std::string& tag) {
  const fs::path log = scratch / (tag + ".log");
  const std::string cmd =
      std::string(STRINGLAB_BIN) + " " + args + " >" + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return RunResult{WEXITSTATUS(raw), ss.str()};
}

json load_report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "stringlab_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("unknown experiment exits 2 and lists valid names") {
  const fs::path scratch = fresh_dir("unknown");
  const RunResult r = run_cli("run no-such-thing --out " +
                                  (scratch / "out").string(),
                              scratch, "unknown");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("lemma43") != std::string::npos);
  CHECK(r.output.find("kernel-validate") != std::string::npos);
  CHECK(!fs::exists(scratch / "out"));
}

TEST_CASE("config error writes no partial outputs") {
  const fs::path scratch = fresh_dir("badparam");
  const fs::path out = scratch / "out";
  const RunResult r = run_cli(
      "run lemma43 --param bogus=1 --out " + out.string(), scratch, "badparam");
  CHECK(r.exit_code == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("lemma43 default run passes and produces a stable report") {
  const fs::path scratch = fresh_dir("lemma43");
  const fs::path out1 = scratch / "a";
  const fs::path out2 = scratch / "b";
  const RunResult r1 =
      run_cli("run lemma43 --out " + out1.string(), scratch, "run1");
  CHECK(r1.exit_code == 0);
  const RunResult r2 =
      run_cli("run lemma43 --out " + out2.string(), scratch, "run2");
  CHECK(r2.exit_code == 0);

  json a = load_report(out1);
  json b = load_report(out2);
  CHECK(a["experiment"] == "lemma43");
  CHECK(a["all_pass"] == true);
  CHECK(a["checks"].size() >= 4);
  CHECK(a["rng_id"].get<std::string>().size() > 0);

  // byte-identical apart from the wall clock
  a.erase("wall_clock_sec");
  b.erase("wall_clock_sec");
  CHECK(a.dump() == b.dump());

  // the advertised table exists and is CRLF CSV with a header row
  std::ifstream csv(out1 / "union_bounds.csv", std::ios::binary);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "space,events,bound,truth\r");
}

TEST_CASE("numeric fields are identical across worker counts") {
  const fs::path scratch = fresh_dir("workers");
  const fs::path out1 = scratch / "w1";
  const fs::path out4 = scratch / "w4";
  CHECK(run_cli("run scaling-check --workers 1 --out " + out1.string(), scratch,
                "w1")
            .exit_code == 0);
  CHECK(run_cli("run scaling-check --workers 4 --out " + out4.string(), scratch,
                "w4")
            .exit_code == 0);
  json a = load_report(out1);
  json b = load_report(out4);
  a.erase("wall_clock_sec");
  b.erase("wall_clock_sec");
  a.erase("workers");
  b.erase("workers");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("params come from config file and are overridden by flags") {
  const fs::path scratch = fresh_dir("config");
  const fs::path cfg = scratch / "cfg.json";
  {
    std::ofstream os(cfg);
    os << R"({"spaces": 60, "seed": 5})";
  }
  const fs::path out = scratch / "out";
  const RunResult r = run_cli("run lemma43 --config " + cfg.string() +
                                  " --param spaces=40 --out " + out.string(),
                              scratch, "config");
  CHECK(r.exit_code == 0);
  const json rep = load_report(out);
  CHECK(rep["params"]["spaces"] == 40);  // flag wins
  CHECK(rep["seed"] == 5);
}

TEST_CASE("failing check exits 1 but still writes the report") {
  const fs::path scratch = fresh_dir("fail");
  const fs::path out = scratch / "out";
  // an impossible ceiling forces a check failure
  const RunResult r = run_cli(
      "run prop12 --param max_ratio=0.1 --out " + out.string(), scratch, "fail");
  CHECK(r.exit_code == 1);
  const json rep = load_report(out);
  CHECK(rep["all_pass"] == false);
}
