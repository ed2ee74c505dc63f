#include "voternet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace voternet {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::CL: return "cl";
    case Variant::SNR: return "snr";
    case Variant::GRG: return "grg";
    case Variant::MNR: return "mnr";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "cl") return Variant::CL;
  if (s == "snr") return Variant::SNR;
  if (s == "grg") return Variant::GRG;
  if (s == "mnr") return Variant::MNR;
  return std::nullopt;
}

void GraphSpec::validate() const {
  if (n < 2) throw std::invalid_argument("GraphSpec: n must be at least 2");
  if (!(beta > 0)) throw std::invalid_argument("GraphSpec: beta must be positive");
  if (!(gamma > 0)) throw std::invalid_argument("GraphSpec: gamma must be positive");
  if (beta + 2 * gamma >= 1 && !allow_nonsubcritical) {
    throw std::invalid_argument(
        "GraphSpec: not subcritical (beta + 2*gamma >= 1); "
        "set allow_nonsubcritical to override");
  }
}

Graph::Graph(std::int64_t n, std::vector<Edge> edges,
             std::vector<std::int32_t> loops)
    : n_(n), edges_(std::move(edges)), loops_(std::move(loops)) {
  if (n_ < 0) throw std::invalid_argument("Graph: negative vertex count");
  if (!loops_.empty() && static_cast<std::int64_t>(loops_.size()) != n_ + 1)
    throw std::invalid_argument("Graph: loops vector must have size n+1");

  for (auto& e : edges_) {
    if (e.u == e.v) throw std::invalid_argument("Graph: loop passed as edge");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 1 || e.v > n_) throw std::invalid_argument("Graph: vertex out of range");
    if (e.mult < 1) throw std::invalid_argument("Graph: multiplicity must be >= 1");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
      throw std::invalid_argument("Graph: duplicate edge entry");
  }

  deg_.assign(n_ + 1, 0);
  adj_off_.assign(n_ + 2, 0);
  bool any_mult = false;
  for (const auto& e : edges_) {
    deg_[e.u] += e.mult;
    deg_[e.v] += e.mult;
    adj_off_[e.u + 1]++;
    adj_off_[e.v + 1]++;
    any_mult |= e.mult > 1;
    endpoint_count_ += e.mult;
  }
  bool any_loop = false;
  if (!loops_.empty()) {
    for (std::int64_t v = 1; v <= n_; ++v) {
      if (loops_[v] < 0) throw std::invalid_argument("Graph: negative loop count");
      deg_[v] += 2L * loops_[v];
      endpoint_count_ += loops_[v];
      any_loop |= loops_[v] > 0;
    }
  }
  simple_ = !any_mult && !any_loop;

  for (std::int64_t v = 1; v <= n_; ++v) adj_off_[v + 1] += adj_off_[v];
  adj_.resize(adj_off_[n_ + 1]);
  adj_mult_.resize(adj_off_[n_ + 1]);
  std::vector<std::int64_t> cursor(adj_off_.begin(), adj_off_.end() - 1);
  for (const auto& e : edges_) {
    adj_[cursor[e.u]] = e.v;
    adj_mult_[cursor[e.u]++] = e.mult;
    adj_[cursor[e.v]] = e.u;
    adj_mult_[cursor[e.v]++] = e.mult;
  }
  // neighbour lists are sorted because edges are sorted and inserted twice
  // in increasing order of the opposite endpoint only for the u side; fix
  // the v side by sorting each list.
  for (std::int64_t v = 1; v <= n_; ++v) {
    auto first = adj_off_[v], last = adj_off_[v + 1];
    std::vector<std::pair<std::int32_t, std::int32_t>> tmp;
    tmp.reserve(last - first);
    for (auto k = first; k < last; ++k) tmp.emplace_back(adj_[k], adj_mult_[k]);
    std::sort(tmp.begin(), tmp.end());
    for (auto k = first; k < last; ++k) {
      adj_[k] = tmp[k - first].first;
      adj_mult_[k] = tmp[k - first].second;
    }
  }
}

bool Graph::adjacent(std::int32_t u, std::int32_t v) const {
  auto r = neighbors(u);
  return std::binary_search(r.begin(), r.end(), v);
}

EdgeProb edge_prob(std::int64_t i, std::int64_t j, const GraphSpec& spec) {
  spec.validate();
  if (i > j) std::swap(i, j);
  if (i < 1 || j > spec.n)
    throw std::invalid_argument("edge_prob: vertex out of range");
  if (i == j && spec.variant != Variant::MNR)
    throw std::invalid_argument("edge_prob: identical endpoints in a simple variant");

  const double raw = spec.beta * std::pow(double(spec.n), 2 * spec.gamma - 1) *
                     std::pow(double(i), -spec.gamma) *
                     std::pow(double(j), -spec.gamma);
  switch (spec.variant) {
    case Variant::CL: return {std::min(raw, 1.0), true};
    case Variant::SNR: return {-std::expm1(-std::min(raw, 1.0)), true};
    case Variant::GRG: {
      const double p = std::min(raw, 1.0);
      return {p / (1 + p), true};
    }
    case Variant::MNR: return {raw, false};
  }
  throw std::logic_error("edge_prob: unknown variant");
}

WeightTable::WeightTable(const GraphSpec& spec) {
  spec.validate();
  prefactor_ = spec.beta * std::pow(double(spec.n), 2 * spec.gamma - 1);
  inv_pow_.resize(spec.n + 1);
  inv_pow_[0] = 0;
  power_sum_ = 0;
  for (std::int64_t i = 1; i <= spec.n; ++i) {
    inv_pow_[i] = std::pow(double(i), -spec.gamma);
    power_sum_ += inv_pow_[i];
  }
  total_ = prefactor_ * power_sum_ * power_sum_;
}

double WeightTable::weight(std::int64_t i) const {
  if (i < 1 || i >= static_cast<std::int64_t>(inv_pow_.size()))
    throw std::invalid_argument("WeightTable::weight: vertex out of range");
  return prefactor_ * inv_pow_[i] * power_sum_;
}

double WeightTable::pair_mean(std::int64_t i, std::int64_t j) const {
  if (i < 1 || j < 1 || i >= static_cast<std::int64_t>(inv_pow_.size()) ||
      j >= static_cast<std::int64_t>(inv_pow_.size()))
    throw std::invalid_argument("WeightTable::pair_mean: vertex out of range");
  return prefactor_ * inv_pow_[i] * inv_pow_[j];
}

double weight(std::int64_t i, const GraphSpec& spec) {
  return WeightTable(spec).weight(i);
}

double total_weight(const GraphSpec& spec) { return WeightTable(spec).total(); }

namespace {

// Poisson count for one pair of the multigraph sampler, fed by the pair's
// private substream. First uniform decides the (overwhelmingly common)
// zero case without evaluating exp.
std::uint64_t pair_poisson(RngStream s, double mean) {
  double u = s.u01();
  if (u <= 1.0 - mean) return 0;  // 1 - mean <= exp(-mean)
  const double limit = std::exp(-mean);
  if (u <= limit) return 0;
  std::uint64_t k = 0;
  double prod = u;
  while (prod > limit) {
    ++k;
    prod *= s.u01();
  }
  return k;
}

}  // namespace

Graph sample_graph(const GraphSpec& spec, const RngStream& rng,
                   const SampleOptions& opts) {
  spec.validate();
  const std::int64_t n = spec.n;
  const double gamma = spec.gamma;
  const double prefactor = spec.beta * std::pow(double(n), 2 * gamma - 1);

  std::vector<double> inv_pow(n + 1);
  for (std::int64_t j = 1; j <= n; ++j) inv_pow[j] = std::pow(double(j), -gamma);

  std::vector<Edge> edges;
  const RngStream pairs = rng.substream("pairs");

  if (spec.variant == Variant::MNR) {
    std::vector<std::int32_t> loops(n + 1, 0);
    const RngStream loop_stream = rng.substream("loops");
    for (std::int64_t i = 1; i <= n; ++i) {
      const double row = prefactor * inv_pow[i];
      for (std::int64_t j = i + 1; j <= n; ++j) {
        const double mean = row * inv_pow[j];
        const std::uint64_t idx = static_cast<std::uint64_t>(i - 1) * n + (j - 1);
        const std::uint64_t m = pair_poisson(pairs.substream(idx), mean);
        if (m > 0)
          edges.push_back({static_cast<std::int32_t>(i),
                           static_cast<std::int32_t>(j),
                           static_cast<std::int32_t>(m)});
      }
      const double loop_mean = row * inv_pow[i];
      loops[i] = static_cast<std::int32_t>(
          pair_poisson(loop_stream.substream(static_cast<std::uint64_t>(i)),
                       loop_mean));
    }
    return Graph(n, std::move(edges), std::move(loops));
  }

  const double skip_threshold = opts.fast ? 1e-12 / (double(n) * double(n)) : 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double row = prefactor * inv_pow[i];
    std::int64_t jmax = n;
    if (opts.fast) {
      if (i + 1 > n || row * inv_pow[i + 1] < skip_threshold) continue;
      // row probabilities decrease in j: binary search the last kept pair
      std::int64_t lo = i + 1, hi = n;
      while (lo < hi) {
        std::int64_t mid = (lo + hi + 1) / 2;
        if (row * inv_pow[mid] >= skip_threshold) lo = mid; else hi = mid - 1;
      }
      jmax = lo;
    }
    for (std::int64_t j = i + 1; j <= jmax; ++j) {
      const double raw = row * inv_pow[j];
      const std::uint64_t idx = static_cast<std::uint64_t>(i - 1) * n + (j - 1);
      const double u = RngStream::to_u01(pairs.at(idx));
      // raw >= q for every simple variant, so most pairs exit here
      if (u >= raw) continue;
      bool present;
      switch (spec.variant) {
        case Variant::CL: present = true; break;  // u < raw and q = min(raw,1)
        case Variant::SNR: present = u < -std::expm1(-std::min(raw, 1.0)); break;
        case Variant::GRG: {
          const double p = std::min(raw, 1.0);
          present = u < p / (1 + p);
          break;
        }
        default: present = false;
      }
      if (present)
        edges.push_back({static_cast<std::int32_t>(i),
                         static_cast<std::int32_t>(j), 1});
    }
  }
  return Graph(n, std::move(edges));
}

Graph collapse(const Graph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, 1});
  return Graph(g.n(), std::move(edges));
}

void write_graph(std::ostream& os, const Graph& g, double beta, double gamma,
                 const std::string& variant) {
  os << g.n() << ' ' << beta << ' ' << gamma << ' ' << variant << '\n';
  for (const auto& e : g.edges()) {
    os << e.u << ' ' << e.v;
    if (e.mult != 1) os << ' ' << e.mult;
    os << '\n';
  }
  for (std::int64_t v = 1; v <= g.n(); ++v) {
    if (g.loop_count(static_cast<std::int32_t>(v)) > 0)
      os << v << ' ' << v << ' ' << g.loop_count(static_cast<std::int32_t>(v))
         << '\n';
  }
}

GraphFile read_graph(std::istream& is) {
  GraphFile out;
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("read_graph: empty input");
  {
    std::istringstream header(line);
    if (!(header >> out.n >> out.beta >> out.gamma >> out.variant))
      throw std::runtime_error("read_graph: malformed header");
  }
  std::vector<Edge> edges;
  std::vector<std::int32_t> loops(out.n + 1, 0);
  bool any_loop = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::int64_t i, j;
    std::int64_t m = 1;
    if (!(row >> i >> j)) throw std::runtime_error("read_graph: malformed edge line");
    row >> m;
    if (i == j) {
      if (i < 1 || i > out.n) throw std::runtime_error("read_graph: loop out of range");
      loops[i] += static_cast<std::int32_t>(m);
      any_loop = true;
    } else {
      edges.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                       static_cast<std::int32_t>(m)});
    }
  }
  out.graph = any_loop ? Graph(out.n, std::move(edges), std::move(loops))
                       : Graph(out.n, std::move(edges));
  return out;
}

GraphFile read_graph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open graph file: " + path);
  return read_graph(is);
}

void write_graph_file(const std::string& path, const Graph& g, double beta,
                      double gamma, const std::string& variant) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write graph file: " + path);
  write_graph(os, g, beta, gamma, variant);
}

}  // namespace voternet
