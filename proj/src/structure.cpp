#include "voternet/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace voternet {

using nlohmann::json;

ComponentDecomposition components(const Graph& g) {
  ComponentDecomposition out;
  const std::int64_t n = g.n();
  out.component_id.assign(n + 1, -1);
  std::vector<std::int32_t> queue;
  for (std::int32_t v = 1; v <= n; ++v) {
    if (out.component_id[v] >= 0) continue;
    const auto id = static_cast<std::int32_t>(out.components.size());
    out.rep.push_back(v);  // scanning order makes v the minimum of its component
    std::vector<std::int32_t> members;
    queue.clear();
    queue.push_back(v);
    out.component_id[v] = id;
    while (!queue.empty()) {
      const std::int32_t x = queue.back();
      queue.pop_back();
      members.push_back(x);
      for (std::int32_t y : g.neighbors(x)) {
        if (out.component_id[y] < 0) {
          out.component_id[y] = id;
          queue.push_back(y);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.components.push_back(std::move(members));
  }
  return out;
}

double k_gamma(std::int64_t n, double gamma) {
  if (n < 2) throw std::invalid_argument("k_gamma: n must be at least 2");
  if (!(gamma > 0) || gamma >= 0.5)
    throw std::invalid_argument("k_gamma: gamma must lie in (0, 1/2)");
  return std::pow(double(n), (1 - 2 * gamma) / (2 - 2 * gamma)) *
         std::log(double(n));
}

namespace {

// Exact eccentricity sweep; components here stay polylogarithmic in size.
std::int32_t component_diameter(const Graph& g,
                                const std::vector<std::int32_t>& comp) {
  if (comp.size() <= 1) return 0;
  std::int32_t best = 0;
  std::vector<std::int32_t> dist(comp.size(), -1);
  // local index lookup via binary search in the sorted member list
  auto local = [&comp](std::int32_t v) {
    return static_cast<std::int32_t>(
        std::lower_bound(comp.begin(), comp.end(), v) - comp.begin());
  };
  std::deque<std::int32_t> queue;
  for (std::size_t s = 0; s < comp.size(); ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.clear();
    queue.push_back(static_cast<std::int32_t>(s));
    while (!queue.empty()) {
      const std::int32_t x = queue.front();
      queue.pop_front();
      best = std::max(best, dist[x]);
      for (std::int32_t y : g.neighbors(comp[x])) {
        const std::int32_t ly = local(y);
        if (dist[ly] < 0) {
          dist[ly] = dist[x] + 1;
          queue.push_back(ly);
        }
      }
    }
  }
  return best;
}

}  // namespace

StructureReport structure_report(const Graph& g, const GraphSpec& spec) {
  StructureReport report;
  report.n = g.n();
  report.gamma = spec.gamma;
  report.k_gamma = k_gamma(g.n(), spec.gamma);
  const auto kcap = static_cast<std::int64_t>(std::floor(report.k_gamma));

  const auto decomp = components(g);
  std::vector<char> comp_big(decomp.components.size(), 0);
  for (std::int64_t k = 1; k <= std::min<std::int64_t>(kcap, g.n()); ++k)
    comp_big[decomp.component_id[k]] = 1;

  for (std::size_t c = 0; c < decomp.components.size(); ++c) {
    const auto& comp = decomp.components[c];
    ComponentStats st;
    st.rep = decomp.rep[c];
    st.size = static_cast<std::int64_t>(comp.size());
    st.big = comp_big[c] != 0;
    for (std::int32_t v : comp) {
      st.degree_sum += g.degree(v);
      st.edge_count += g.loop_count(v);
    }
    st.diameter = component_diameter(g, comp);
    report.components.push_back(st);
  }
  // edge counts per component in one pass
  for (const auto& e : g.edges()) {
    report.components[decomp.component_id[e.u]].edge_count += e.mult;
  }
  for (auto& st : report.components) {
    st.surplus = st.edge_count - st.size + 1;
    st.is_tree = st.surplus == 0;
    if (st.big) {
      const auto& comp = decomp.components[decomp.component_id[st.rep]];
      for (const auto& branch : branches(g, comp)) {
        std::int64_t dsum = 0;
        for (std::int32_t v : branch) dsum += g.degree(v);
        st.max_branch_degree_sum = std::max(st.max_branch_degree_sum, dsum);
      }
    }
  }

  for (std::size_t c = 0; c < decomp.components.size(); ++c) {
    if (!comp_big[c]) continue;
    for (std::int32_t v : decomp.components[c]) report.big_vertices.push_back(v);
  }
  std::sort(report.big_vertices.begin(), report.big_vertices.end());

  for (std::int64_t k = 1; k <= std::min<std::int64_t>(kcap, g.n()); ++k) {
    BigStarStats star;
    star.k = static_cast<std::int32_t>(k);
    star.degree = g.degree(static_cast<std::int32_t>(k));
    for (std::int32_t y : g.neighbors(static_cast<std::int32_t>(k)))
      if (g.degree(y) == 1) ++star.leaf_count;
    report.stars.push_back(star);
  }
  return report;
}

std::vector<std::vector<std::int32_t>> branches(
    const Graph& g, const std::vector<std::int32_t>& comp) {
  if (comp.empty()) return {};
  const std::int32_t root = *std::min_element(comp.begin(), comp.end());
  std::vector<std::vector<std::int32_t>> out;
  std::vector<char> seen(comp.size(), 0);
  auto local = [&comp](std::int32_t v) {
    return static_cast<std::int32_t>(
        std::lower_bound(comp.begin(), comp.end(), v) - comp.begin());
  };
  seen[local(root)] = 1;
  std::vector<std::int32_t> stack;
  for (std::int32_t s : comp) {
    if (seen[local(s)]) continue;
    std::vector<std::int32_t> branch;
    stack.clear();
    stack.push_back(s);
    seen[local(s)] = 1;
    while (!stack.empty()) {
      const std::int32_t x = stack.back();
      stack.pop_back();
      branch.push_back(x);
      for (std::int32_t y : g.neighbors(x)) {
        if (y == root) continue;
        const std::int32_t ly = local(y);
        if (!seen[ly]) {
          seen[ly] = 1;
          stack.push_back(y);
        }
      }
    }
    std::sort(branch.begin(), branch.end());
    out.push_back(std::move(branch));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

double empirical_moment(const Graph& g, const std::vector<std::int32_t>& comp,
                        double eta) {
  if (eta < 1) throw std::invalid_argument("empirical_moment: eta must be >= 1");
  double sum = 0;
  for (std::int32_t v : comp) sum += std::pow(double(g.degree(v)), eta);
  return sum;
}

std::optional<DoubleStarWitness> find_simple_double_star(const Graph& g,
                                                         const GraphSpec& spec) {
  const double hi = k_gamma(g.n(), spec.gamma);
  const double lo =
      std::pow(double(g.n()), (1 - 2 * spec.gamma) / (2 - 2 * spec.gamma));
  const auto lo_v = static_cast<std::int32_t>(std::ceil(lo));
  const auto hi_v = static_cast<std::int32_t>(
      std::min<double>(std::floor(hi), double(g.n())));
  if (lo_v > hi_v) return std::nullopt;

  const auto decomp = components(g);
  std::vector<signed char> tree_cache(decomp.components.size(), -1);
  auto component_is_tree = [&](std::int32_t v) {
    const auto id = decomp.component_id[v];
    if (tree_cache[id] < 0) {
      const auto& comp = decomp.components[id];
      std::int64_t edge_count = 0;   // loops once, undirected edges once
      std::int64_t endpoints = 0;
      for (std::int32_t x : comp) {
        edge_count += g.loop_count(x);
        const auto nb = g.neighbors(x);
        for (std::size_t k = 0; k < nb.size(); ++k)
          endpoints += nb.mult_first[k];
      }
      edge_count += endpoints / 2;
      tree_cache[id] =
          edge_count + 1 == static_cast<std::int64_t>(comp.size()) ? 1 : 0;
    }
    return tree_cache[id] == 1;
  };

  for (std::int32_t x = lo_v; x <= hi_v; ++x) {
    for (std::int32_t y : g.neighbors(x)) {
      if (y <= x || y > hi_v) continue;
      if (!component_is_tree(x)) break;
      DoubleStarWitness w;
      w.kind = DoubleStarWitness::Kind::simple;
      w.hub_a = x;
      w.hub_b = y;
      w.path = {x, y};
      w.hub_degree_a = g.degree(x);
      w.hub_degree_b = g.degree(y);
      return w;
    }
  }
  return std::nullopt;
}

std::optional<DoubleStarWitness> find_long_double_star(const Graph& g,
                                                       const GraphSpec& spec) {
  const auto kcap = static_cast<std::int32_t>(
      std::min<double>(std::floor(k_gamma(g.n(), spec.gamma)), double(g.n())));
  for (std::int32_t a = 1; a <= g.n(); ++a) {
    if (g.degree(a) != 2) continue;
    for (std::int32_t b : g.neighbors(a)) {
      if (b <= a || g.degree(b) != 2) continue;
      // a and b are the interior of the path; find the outer neighbours
      std::int32_t v1 = 0, v4 = 0;
      for (std::int32_t y : g.neighbors(a))
        if (y != b) v1 = y;
      for (std::int32_t y : g.neighbors(b))
        if (y != a) v4 = y;
      if (v1 == 0 || v4 == 0) continue;
      if (v1 > kcap || v4 > kcap) continue;
      if (v1 == v4 || v1 == b || v4 == a) continue;
      DoubleStarWitness w;
      w.kind = DoubleStarWitness::Kind::long_path;
      w.hub_a = v1;
      w.hub_b = v4;
      w.path = {v1, a, b, v4};
      w.hub_degree_a = g.degree(v1);
      w.hub_degree_b = g.degree(v4);
      return w;
    }
  }
  return std::nullopt;
}

std::string structure_report_json(const StructureReport& r) {
  json j;
  j["n"] = r.n;
  j["gamma"] = r.gamma;
  j["k_gamma"] = r.k_gamma;
  j["big_vertex_count"] = r.big_vertices.size();
  j["big_vertices"] = r.big_vertices;
  j["components"] = json::array();
  for (const auto& c : r.components) {
    j["components"].push_back({{"rep", c.rep},
                               {"size", c.size},
                               {"degree_sum", c.degree_sum},
                               {"edge_count", c.edge_count},
                               {"diameter", c.diameter},
                               {"surplus", c.surplus},
                               {"is_tree", c.is_tree},
                               {"big", c.big},
                               {"max_branch_degree_sum", c.max_branch_degree_sum}});
  }
  j["stars"] = json::array();
  for (const auto& s : r.stars) {
    j["stars"].push_back(
        {{"k", s.k}, {"degree", s.degree}, {"leaf_count", s.leaf_count}});
  }
  return j.dump(2);
}

std::string structure_report_csv(const StructureReport& r) {
  std::ostringstream os;
  os << "rep,size,degree_sum,edge_count,diameter,surplus,is_tree,big,"
        "max_branch_degree_sum\n";
  for (const auto& c : r.components) {
    os << c.rep << ',' << c.size << ',' << c.degree_sum << ',' << c.edge_count
       << ',' << c.diameter << ',' << c.surplus << ',' << (c.is_tree ? 1 : 0)
       << ',' << (c.big ? 1 : 0) << ',' << c.max_branch_degree_sum << '\n';
  }
  return os.str();
}

}  // namespace voternet
