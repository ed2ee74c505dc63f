#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "voternet/chains.hpp"
#include "voternet/graph.hpp"
#include "voternet/rng.hpp"
#include "voternet/structure.hpp"

namespace voternet {

struct VoterConfig {
  Dynamics dynamics = Dynamics::classical;
  double theta = 0;
  enum class Init { bernoulli, unique };
  Init init = Init::bernoulli;
  double u = 0.5;
  std::optional<double> horizon;
  // Schedule only discordant interactions instead of all activations;
  // same law, fewer events on nearly consensual states.
  bool active_edge = false;
  // Per-ordered-pair exponential clocks; slow reference path for checking
  // the activation scheduler.
  bool reference_pair_clocks = false;

  void validate() const;
};

struct SimOutcome {
  double tau_cons = 0;
  bool censored = false;
  std::vector<std::pair<std::int32_t, double>> per_component_tau;  // by rep
  std::uint64_t events = 0;
};

struct CoalOutcome {
  double tau_coal = 0;
  std::vector<std::pair<std::int32_t, double>> per_component_tau;  // by rep
  std::uint64_t jumps = 0;
};

// Exact continuous-time simulation; every component runs on its own
// substream keyed by its representative vertex, so per-component laws do
// not depend on which other components are present.
SimOutcome simulate_voter(const Graph& g, const ComponentDecomposition& decomp,
                          const VoterConfig& cfg, const RngStream& rng);
SimOutcome simulate_voter(const Graph& g, const VoterConfig& cfg,
                          const RngStream& rng);

struct CoalStart {
  enum class Kind { all, pair, stationary_pair };
  Kind kind = Kind::all;
  std::int32_t x = 1;  // pair / stationary_pair anchor
  std::int32_t y = 1;
};

CoalOutcome simulate_coalescing(const Graph& g,
                                const ComponentDecomposition& decomp,
                                Dynamics dynamics, double theta,
                                const CoalStart& start, const RngStream& rng);
CoalOutcome simulate_coalescing(const Graph& g, Dynamics dynamics, double theta,
                                const CoalStart& start, const RngStream& rng);

struct BatchStats {
  std::int64_t reps = 0;
  double mean = 0;
  double variance = 0;   // unbiased
  double stderr_mean = 0;
  double q05 = 0, q50 = 0, q95 = 0;
  std::int64_t censored = 0;
};

// Runs fn once per replicate on stream (seed, purpose, replicate index)
// and aggregates. Replicates with censored == true are excluded from the
// moments but counted.
struct ReplicateResult {
  double value = 0;
  bool censored = false;
};

BatchStats batch(std::int64_t reps, std::uint64_t seed, std::string_view purpose,
                 const std::function<ReplicateResult(std::int64_t, RngStream)>& fn,
                 int threads = 1);

// Replicate loop shared by batch and the experiment harnesses; results are
// ordered by replicate index regardless of the thread count.
std::vector<ReplicateResult> run_replicates(
    std::int64_t reps, int threads,
    const std::function<ReplicateResult(std::int64_t)>& fn);

BatchStats summarize(const std::vector<ReplicateResult>& results);

std::string batch_stats_json(const BatchStats& s);

}  // namespace voternet
