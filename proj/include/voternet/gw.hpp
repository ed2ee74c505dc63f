#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voternet/graph.hpp"
#include "voternet/rng.hpp"

namespace voternet {

// Mark of a tree vertex: a graph vertex in [N], or 0 for the zero-weight
// placeholder produced by the truncated law.
constexpr std::int64_t kDagger = 0;

// Vertex-valued law P(M = m) proportional to m^{-gamma} on [N]. With a
// truncation level z, marks <= z are mapped to the placeholder instead.
class MarkLaw {
 public:
  MarkLaw(const GraphSpec& spec, std::int64_t truncation_z = 0);

  std::int64_t sample(RngStream& rng) const;
  double prob(std::int64_t m) const;  // of the untruncated law
  std::int64_t truncation() const { return truncation_z_; }

 private:
  std::int64_t n_;
  std::int64_t truncation_z_;
  std::vector<double> cum_;  // cum_[i] = sum of m^-gamma for m <= i
};

struct TreeNode {
  std::int64_t parent = -1;      // index into nodes, -1 for the root
  std::int32_t child_rank = 0;   // position among the parent's children, 1-based
  std::int64_t mark = kDagger;
  std::int64_t offspring = 0;
  bool thinned = false;
};

// Breadth-first flat tree: children of node i are consecutive and appear
// after i; this makes the thinning pass a single forward scan.
struct MarkedTree {
  std::int64_t root_mark = 0;
  std::vector<TreeNode> nodes;

  std::int64_t size() const { return static_cast<std::int64_t>(nodes.size()); }
  std::string ulam_label(std::int64_t i) const;
};

struct TreeSampleOptions {
  std::int64_t truncation_z = 0;   // 0 = untruncated marks
  std::int64_t node_guard = 10'000'000;
};

// Cluster-exploration tree rooted at k: the root gets Pois(w(k)) children,
// every other vertex draws an independent mark and Pois(w(mark)) children.
// Throws std::overflow_error at the node guard; the guard trips only when
// the parameters are effectively critical.
MarkedTree sample_tree(std::int64_t k, const GraphSpec& spec, RngStream rng,
                       const TreeSampleOptions& opts = {});

struct ThinResult {
  Graph graph;                              // multigraph over unthinned marks
  std::vector<std::int64_t> unthinned_marks;  // sorted
};

// Breadth-first thinning across the forest: a node is thinned when its
// parent is thinned or an earlier unthinned node carries the same mark.
// Edge multiplicities come from the offspring-mark counts of the earlier
// node of each unthinned pair. Thinned flags are written back into trees.
ThinResult thin_forest(std::span<MarkedTree> trees, std::int64_t n);

// Line-per-node text form "ulam_label mark offspring thinned".
void write_tree(std::ostream& os, const MarkedTree& t);

// Heavy-tailed limit of the size-biased weight: density proportional to
// x^{-1/gamma} above beta/(1-gamma).
struct LimitWeight {
  double beta = 0;
  double gamma = 0;
};

double sample_limit_weight(const LimitWeight& lw, RngStream& rng);

struct TailReport {
  double slope = 0;      // fitted log-log CCDF slope
  double ci_low = 0;
  double ci_high = 0;
  double mean_size = 0;
  std::int64_t samples = 0;
  std::vector<std::int64_t> thresholds;
  std::vector<double> ccdf;
};

// Samples Galton-Watson trees whose offspring law is Poisson mixed over
// alpha * (limit weight) and fits the tail exponent of the total size.
// Requires 1 < alpha < (1 - 2*gamma) / beta.
TailReport gw_tail_statistics(const GraphSpec& spec, double alpha,
                              std::int64_t samples, RngStream rng);

std::string tail_report_json(const TailReport& r);

}  // namespace voternet
