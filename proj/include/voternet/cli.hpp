#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voternet/chains.hpp"

namespace voternet {

inline constexpr const char* kVersion = "voternet 0.1.0";

// Exit codes: 0 success, 2 invalid parameters, 3 exact cap exceeded,
// 4 censoring above threshold (partial results are still written).
enum ExitCode {
  kOk = 0,
  kInvalidParams = 2,
  kCapExceeded = 3,
  kCensored = 4,
};

struct RunConfig {
  std::string command;

  // graph parameters / input
  std::int64_t n = 0;
  double beta = 0;
  double gamma = 0;
  std::string variant = "cl";
  bool allow_nonsubcritical = false;
  bool fast = false;
  std::string graph_path;

  // dynamics
  std::string dynamics = "classical";
  double theta = 0;
  std::string init = "bernoulli";
  double u = 0.5;
  bool coalescing = false;
  std::string starts = "all";  // all | pair:x,y | stationary
  bool active_edge = false;
  bool reference_clocks = false;
  std::optional<double> horizon;
  double censor_threshold = 0.05;

  // batch / scaling
  std::int64_t reps = 100;
  std::string grid;
  double tolerance = 0.15;
  std::optional<double> target;
  bool quenched = false;

  // branching
  std::int64_t root_k = 1;
  std::int64_t samples = 10000;
  std::optional<double> alpha;
  std::int64_t truncation = 0;
  bool thin = false;
  std::string dump_tree;

  // exact solves
  std::int64_t component = 0;  // 0 = all components
  ExactCaps caps;

  // common
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;  // path or prefix; empty = stdout
  std::string csv;  // optional extra CSV path
  bool agreement = false;
};

// Precondition diagnostics without running anything; empty means valid.
std::vector<std::string> validate_config(const RunConfig& cfg);

// Dispatches one command, writes artifacts atomically, returns an exit code.
int run(const RunConfig& cfg);

int cli_main(int argc, const char* const* argv);

// temp-file-and-rename write; honours VOTERNET_OUTDIR for relative paths
void write_artifact(const std::string& path, const std::string& content);

}  // namespace voternet
