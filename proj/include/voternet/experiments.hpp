#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voternet/chains.hpp"
#include "voternet/dynamics.hpp"
#include "voternet/graph.hpp"
#include "voternet/rng.hpp"

namespace voternet {

enum class ExponentScope { global, component1 };

struct ExponentQuery {
  double gamma = 0;  // in (0, 1/2)
  double theta = 0;
  Dynamics dynamics = Dynamics::classical;
  ExponentScope scope = ExponentScope::global;
};

// Piecewise consensus-time exponent in N as a function of (gamma, theta),
// for the whole graph or for the component of vertex 1.
double theoretical_exponent(const ExponentQuery& q);

// Same exponent expressed through the degree power-law tail tau = 1 + 1/gamma.
double exponent_in_tau(double tau, double theta, Dynamics dynamics,
                       ExponentScope scope = ExponentScope::global);

struct ScalingOptions {
  VoterConfig::Init init = VoterConfig::Init::bernoulli;
  double u = 0.5;
  double tolerance = 0.15;
  std::optional<double> target;  // defaults to the theoretical exponent
  std::optional<double> horizon;
  bool quenched = false;  // one graph per grid point instead of one per replicate
  int threads = 1;
  int bootstrap = 200;
};

struct ScalingPoint {
  std::int64_t n = 0;
  BatchStats stats;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  double slope = 0;
  double ci_low = 0;
  double ci_high = 0;
  double median_slope = 0;  // diagnostic fit on medians
  double theory = 0;
  double target = 0;
  double tolerance = 0;
  bool verdict = false;
  std::int64_t censored = 0;
};

// Fits log mean consensus time against log N over a geometric grid of
// sizes, one fresh graph per replicate.
ScalingResult scaling_experiment(const GraphSpec& spec_template,
                                 Dynamics dynamics, double theta,
                                 const std::vector<std::int64_t>& grid,
                                 std::int64_t reps, const RngStream& rng,
                                 const ScalingOptions& opts = {});

std::string scaling_result_json(const ScalingResult& r, const std::string& extra = {});
std::string scaling_result_csv(const ScalingResult& r);

// "lo:hi:xK" -> geometric grid with factor K.
std::vector<std::int64_t> parse_grid(const std::string& text);

struct ComponentProbe {
  std::int64_t comp1_size = 0;
  BatchStats comp1;
  bool double_star_found = false;
  std::string double_star_kind;
  std::vector<std::int32_t> double_star_path;
  std::int64_t double_star_size = 0;
  BatchStats double_star;
  std::string dominant;  // "component1", "double_star", or "unavailable"
};

// Coalescing-dual timing on the component of vertex 1 versus a located
// double-star component.
ComponentProbe component_probe(const Graph& g, const GraphSpec& spec,
                               Dynamics dynamics, double theta,
                               std::int64_t reps, std::uint64_t seed);

std::string component_probe_json(const ComponentProbe& p);

struct VariantSummary {
  std::string variant;
  double edge_count_mean = 0, edge_count_se = 0;
  double max_degree_mean = 0, max_degree_se = 0;
  double largest_component_mean = 0, largest_component_se = 0;
};

struct AgreementReport {
  std::vector<VariantSummary> variants;
  // standardized |mean difference| / combined standard error, keyed by
  // "<a>-<b>:<metric>"
  std::vector<std::pair<std::string, double>> standardized_differences;
};

AgreementReport model_agreement_probe(std::int64_t n, double beta, double gamma,
                                      std::int64_t reps, std::uint64_t seed,
                                      int threads = 1);

std::string agreement_report_json(const AgreementReport& r);

}  // namespace voternet
