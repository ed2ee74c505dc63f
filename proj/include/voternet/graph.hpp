#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "voternet/rng.hpp"

namespace voternet {

enum class Variant { CL, SNR, GRG, MNR };

std::string variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

// Parameters of one member of the inhomogeneous random graph family.
// Vertices are 1-based throughout: edge probabilities and weights depend
// on the vertex index, so the labelling is part of the contract.
struct GraphSpec {
  std::int64_t n = 0;
  double beta = 0.0;
  double gamma = 0.0;
  Variant variant = Variant::CL;
  bool allow_nonsubcritical = false;

  // Throws std::invalid_argument on bad parameters; beta + 2*gamma >= 1 is
  // rejected unless allow_nonsubcritical is set.
  void validate() const;
};

struct Edge {
  std::int32_t u = 0;  // u < v, 1-based
  std::int32_t v = 0;
  std::int32_t mult = 1;
};

// Immutable adjacency structure. Simple variants carry multiplicity 1 and
// no loops; the multigraph variant may carry both. A loop contributes 2 to
// the degree of its vertex.
class Graph {
 public:
  Graph() = default;
  Graph(std::int64_t n, std::vector<Edge> edges,
        std::vector<std::int32_t> loops = {});

  std::int64_t n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::int64_t edge_endpoint_count() const { return endpoint_count_; }
  bool is_simple() const { return simple_; }

  std::int64_t degree(std::int32_t v) const { return deg_[v]; }
  std::int32_t loop_count(std::int32_t v) const {
    return loops_.empty() ? 0 : loops_[v];
  }

  // Distinct neighbours of v with per-neighbour multiplicity.
  struct NeighborRange {
    const std::int32_t* nb_first;
    const std::int32_t* nb_last;
    const std::int32_t* mult_first;
    std::size_t size() const { return static_cast<std::size_t>(nb_last - nb_first); }
    const std::int32_t* begin() const { return nb_first; }
    const std::int32_t* end() const { return nb_last; }
  };
  NeighborRange neighbors(std::int32_t v) const {
    return {adj_.data() + adj_off_[v], adj_.data() + adj_off_[v + 1],
            adj_mult_.data() + adj_off_[v]};
  }
  std::int64_t neighbor_count(std::int32_t v) const {
    return adj_off_[v + 1] - adj_off_[v];
  }
  bool adjacent(std::int32_t u, std::int32_t v) const;

 private:
  std::int64_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::int32_t> loops_;  // empty, or size n+1
  std::vector<std::int64_t> deg_;
  std::vector<std::int64_t> adj_off_;
  std::vector<std::int32_t> adj_;
  std::vector<std::int32_t> adj_mult_;
  std::int64_t endpoint_count_ = 0;
  bool simple_ = true;
};

// Pair connection probability for the simple variants; for the multigraph
// variant the returned value is the Poisson mean of the pair multiplicity,
// not a probability (flagged by is_probability).
struct EdgeProb {
  double value;
  bool is_probability;
};
EdgeProb edge_prob(std::int64_t i, std::int64_t j, const GraphSpec& spec);

// Vertex weights: w(i) = sum_j beta N^{2 gamma - 1} i^{-gamma} j^{-gamma}.
// Precomputes i^{-gamma} and the power sum once per spec.
class WeightTable {
 public:
  explicit WeightTable(const GraphSpec& spec);

  double weight(std::int64_t i) const;
  double total() const { return total_; }         // w([N])
  double power_sum() const { return power_sum_; }  // sum_j j^{-gamma}
  double inv_pow(std::int64_t i) const { return inv_pow_[i]; }
  // Poisson mean of the pair multiplicity in the multigraph model. Equals
  // w(i)w(j)/w([N]); for i == j this is the loop mean.
  double pair_mean(std::int64_t i, std::int64_t j) const;

 private:
  double prefactor_;  // beta N^{2 gamma - 1}
  double power_sum_;
  double total_;
  std::vector<double> inv_pow_;  // 1-based
};

double weight(std::int64_t i, const GraphSpec& spec);
double total_weight(const GraphSpec& spec);

struct SampleOptions {
  // Skip pairs with connection probability below 1e-12 / N^2 (tail of each
  // row). Only changes which pairs are examined, not the law of the rest.
  bool fast = false;
};

// Draws one graph. Deterministic given (spec, rng): pair {i,j} is decided
// by draw index (i-1)*N + (j-1) of rng.substream("pairs"), so the result
// is independent of traversal order.
Graph sample_graph(const GraphSpec& spec, const RngStream& rng,
                   const SampleOptions& opts = {});

// Multigraph -> simple graph: multiplicities clamped to 1, loops dropped.
Graph collapse(const Graph& g);

// Text format: header "N beta gamma variant", then one line per edge
// "i j" or "i j m" (m omitted when 1); loops are written "i i m".
struct GraphFile {
  std::int64_t n = 0;
  double beta = 0.0;
  double gamma = 0.0;
  std::string variant = "none";
  Graph graph;
};

void write_graph(std::ostream& os, const Graph& g, double beta, double gamma,
                 const std::string& variant);
GraphFile read_graph(std::istream& is);
GraphFile read_graph_file(const std::string& path);
void write_graph_file(const std::string& path, const Graph& g, double beta,
                      double gamma, const std::string& variant);

}  // namespace voternet
