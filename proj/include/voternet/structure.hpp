#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voternet/graph.hpp"

namespace voternet {

struct ComponentDecomposition {
  std::vector<std::int32_t> component_id;            // 1-based vertex -> index
  std::vector<std::vector<std::int32_t>> components;  // sorted, ordered by rep
  std::vector<std::int32_t> rep;                      // minimal vertex index

  const std::vector<std::int32_t>& component_of(std::int32_t v) const {
    return components[component_id[v]];
  }
};

ComponentDecomposition components(const Graph& g);

// Threshold separating big from small components: N^{(1-2g)/(2-2g)} * ln N.
// Defined for 0 < gamma < 1/2 only.
double k_gamma(std::int64_t n, double gamma);

struct ComponentStats {
  std::int32_t rep = 0;
  std::int64_t size = 0;
  std::int64_t degree_sum = 0;
  std::int64_t edge_count = 0;  // with multiplicity; loops count once
  std::int32_t diameter = 0;
  std::int64_t surplus = 0;
  bool is_tree = false;
  bool big = false;
  std::int64_t max_branch_degree_sum = 0;  // big components only
};

struct BigStarStats {
  std::int32_t k = 0;          // vertex index <= K_gamma
  std::int64_t degree = 0;
  std::int64_t leaf_count = 0;  // neighbours of degree 1
};

struct StructureReport {
  std::int64_t n = 0;
  double gamma = 0;
  double k_gamma = 0;
  std::vector<std::int32_t> big_vertices;  // union of big components, sorted
  std::vector<ComponentStats> components;
  std::vector<BigStarStats> stars;
};

StructureReport structure_report(const Graph& g, const GraphSpec& spec);

std::string structure_report_json(const StructureReport& r);
std::string structure_report_csv(const StructureReport& r);

// Connected pieces left after deleting the minimal vertex of a component.
std::vector<std::vector<std::int32_t>> branches(
    const Graph& g, const std::vector<std::int32_t>& comp);

double empirical_moment(const Graph& g, const std::vector<std::int32_t>& comp,
                        double eta);

struct DoubleStarWitness {
  enum class Kind { simple, long_path };
  Kind kind = Kind::simple;
  std::int32_t hub_a = 0;
  std::int32_t hub_b = 0;
  std::vector<std::int32_t> path;
  std::int64_t hub_degree_a = 0;
  std::int64_t hub_degree_b = 0;
};

// Lexicographically first adjacent pair inside the index window
// [N^{(1-2g)/(2-2g)}, K_gamma] whose component is a tree.
std::optional<DoubleStarWitness> find_simple_double_star(const Graph& g,
                                                         const GraphSpec& spec);

// Lexicographically first path (v1,v2,v3,v4) with d(v2)=d(v3)=2 and
// v1, v4 <= K_gamma.
std::optional<DoubleStarWitness> find_long_double_star(const Graph& g,
                                                       const GraphSpec& spec);

}  // namespace voternet
