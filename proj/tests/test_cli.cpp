#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "voternet/cli.hpp"
#include "voternet/graph.hpp"

using namespace voternet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("voternet-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("validate_config diagnostics") {
  RunConfig cfg;
  cfg.command = "validate";
  cfg.n = 100;
  cfg.beta = 0.3;
  cfg.gamma = 0.4;
  auto d = validate_config(cfg);
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("not subcritical") != std::string::npos);

  cfg.beta = 0.1;
  cfg.gamma = 0.5;
  d = validate_config(cfg);
  bool has_kgamma = false;
  for (const auto& msg : d) has_kgamma |= msg.find("K_gamma") != std::string::npos;
  CHECK(has_kgamma);

  cfg.gamma = 0.3;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("gen writes the documented header") {
  TempDir dir;
  RunConfig cfg;
  cfg.command = "gen";
  cfg.n = 1000;
  cfg.beta = 0.1;
  cfg.gamma = 0.4;
  cfg.variant = "snr";
  cfg.seed = 7;
  cfg.out = dir.file("g.txt");
  CHECK(run(cfg) == kOk);
  const std::string content = slurp(cfg.out);
  CHECK(content.rfind("1000 0.1 0.4 snr\n", 0) == 0);

  const GraphFile f = read_graph_file(cfg.out);
  CHECK(f.n == 1000);
  CHECK(f.graph.is_simple());
}

TEST_CASE("exact on the 3-path fixture reports the worst hitting pair") {
  TempDir dir;
  write_graph_file(dir.file("p3.txt"), Graph(3, {{1, 2, 1}, {2, 3, 1}}), 0.1,
                   0.3, "none");

  RunConfig cfg;
  cfg.command = "exact";
  cfg.graph_path = dir.file("p3.txt");
  cfg.dynamics = "classical";
  cfg.theta = 0;
  cfg.out = dir.file("exact.json");
  REQUIRE(run(cfg) == kOk);

  const json j = json::parse(slurp(cfg.out));
  REQUIRE(j["components"].size() == 1);
  CHECK(j["components"][0]["t_hit"].get<double>() == doctest::Approx(4.0));
  CHECK(j["components"][0]["t_coal"].get<double>() > 0);
  CHECK(j["config"]["version"] == kVersion);

  RunConfig audit = cfg;
  audit.command = "audit";
  audit.out = dir.file("audit.json");
  REQUIRE(run(audit) == kOk);
  const json a = json::parse(slurp(audit.out));
  CHECK(a["components"][0]["all_pass"].get<bool>());
}

TEST_CASE("exit codes") {
  TempDir dir;

  RunConfig bad;
  bad.command = "gen";
  bad.n = 100;
  bad.beta = 0.3;
  bad.gamma = 0.4;  // not subcritical
  bad.out = dir.file("never.txt");
  CHECK(run(bad) == kInvalidParams);
  CHECK_FALSE(fs::exists(bad.out));

  // a tight cap turns an exact request into exit 3
  write_graph_file(dir.file("p10.txt"),
                   Graph(10, {{1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1},
                              {5, 6, 1}, {6, 7, 1}, {7, 8, 1}, {8, 9, 1},
                              {9, 10, 1}}),
                   0.1, 0.3, "none");
  RunConfig capped;
  capped.command = "exact";
  capped.graph_path = dir.file("p10.txt");
  capped.caps.hitting = 5;
  capped.out = dir.file("never.json");
  CHECK(run(capped) == kCapExceeded);

  // heavy censoring yields exit 4 but still writes results
  RunConfig censored;
  censored.command = "simulate";
  censored.graph_path = dir.file("p10.txt");
  censored.init = "unique";
  censored.horizon = 1e-9;
  censored.reps = 20;
  censored.out = dir.file("censored.json");
  CHECK(run(censored) == kCensored);
  const json j = json::parse(slurp(censored.out));
  CHECK(j["censored"].get<int>() == 20);
}

TEST_CASE("simulate record carries the run parameters") {
  TempDir dir;
  RunConfig cfg;
  cfg.command = "simulate";
  cfg.n = 50;
  cfg.beta = 0.1;
  cfg.gamma = 0.3;
  cfg.variant = "cl";
  cfg.init = "bernoulli:0.5";
  cfg.reps = 50;
  cfg.seed = 3;
  cfg.out = dir.file("sim.json");
  REQUIRE(run(cfg) == kOk);
  const json j = json::parse(slurp(cfg.out));
  for (const char* key : {"N", "beta", "gamma", "variant", "dynamics", "theta",
                          "init", "reps", "mean", "stderr", "q05", "q50", "q95",
                          "seed"})
    CHECK(j.contains(key));
}

TEST_CASE("scaling runs are byte-identical") {
  TempDir dir;
  RunConfig cfg;
  cfg.command = "scaling";
  cfg.beta = 0.1;
  cfg.gamma = 0.35;
  cfg.variant = "cl";
  cfg.dynamics = "classical";
  cfg.theta = 0;
  cfg.grid = "16:64:x2";
  cfg.reps = 10;
  cfg.seed = 11;
  cfg.out = dir.file("run1");
  REQUIRE(run(cfg) == kOk);
  RunConfig cfg2 = cfg;
  cfg2.out = dir.file("run2");
  REQUIRE(run(cfg2) == kOk);
  CHECK(slurp(dir.file("run1.csv")) == slurp(dir.file("run2.csv")));

  json j1 = json::parse(slurp(dir.file("run1.json")));
  json j2 = json::parse(slurp(dir.file("run2.json")));
  CHECK(j1["slope"] == j2["slope"]);
  CHECK(j1["points"] == j2["points"]);
}

TEST_CASE("output directory override applies to relative paths") {
  TempDir dir;
  ::setenv("VOTERNET_OUTDIR", dir.path.c_str(), 1);
  write_artifact("override.txt", "payload");
  ::unsetenv("VOTERNET_OUTDIR");
  CHECK(slurp(dir.file("override.txt")) == "payload\n");
}

TEST_CASE("cli_main end to end") {
  const char* ok[] = {"voternet", "validate", "--n", "100", "--beta", "0.1",
                      "--gamma", "0.3"};
  CHECK(cli_main(8, ok) == kOk);

  // scaling takes its sizes from the grid, not from --n
  TempDir sdir;
  const std::string prefix = sdir.file("sc");
  const char* scal[] = {"voternet", "scaling", "--dynamics", "classical",
                        "--theta", "0", "--gamma", "0.35", "--beta", "0.1",
                        "--grid", "16:64:x2", "--reps", "5", "--seed", "2",
                        "-o", prefix.c_str()};
  CHECK(cli_main(18, scal) == kOk);
  CHECK(fs::exists(prefix + ".csv"));
  CHECK(fs::exists(prefix + ".json"));

  TempDir dir;
  const std::string out = dir.file("cli.json");
  const char* gw[] = {"voternet", "gw",      "--n",     "200",  "--beta",
                      "0.1",      "--gamma", "0.4",     "--k",  "1",
                      "--samples", "500",    "--seed",  "2",    "-o",
                      out.c_str()};
  CHECK(cli_main(16, gw) == kOk);
  const json j = json::parse(slurp(out));
  CHECK(j["mode"] == "tree-size");
  CHECK(j["mean"].get<double>() >= 1.0);
}
