#include "voternet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace voternet {

using nlohmann::json;

void VoterConfig::validate() const {
  if (init == Init::bernoulli && !(u > 0 && u < 1))
    throw std::invalid_argument("VoterConfig: u must lie in (0,1)");
  if (horizon && !(*horizon > 0))
    throw std::invalid_argument("VoterConfig: horizon must be positive");
  if (active_edge && reference_pair_clocks)
    throw std::invalid_argument("VoterConfig: pick one scheduler");
}

namespace {

struct ComponentView {
  const Graph& g;
  const std::vector<std::int32_t>& verts;  // sorted graph vertices
  std::vector<std::int32_t> local;         // graph vertex -> local id (shared scratch)

  std::int64_t size() const { return static_cast<std::int64_t>(verts.size()); }
};

// Fenwick tree over edge weights for the discordant-interaction scheduler.
class Fenwick {
 public:
  explicit Fenwick(std::int64_t n) : tree_(n + 1, 0.0) {}
  void add(std::int64_t i, double delta) {
    for (++i; i < static_cast<std::int64_t>(tree_.size()); i += i & -i)
      tree_[i] += delta;
  }
  double total() const {
    double acc = 0;
    for (std::int64_t i = tree_.size() - 1; i > 0; i -= i & -i) acc += tree_[i];
    return acc;
  }
  // smallest index with prefix sum > target
  std::int64_t find(double target) const {
    std::int64_t pos = 0;
    std::int64_t mask = 1;
    while (2 * mask < static_cast<std::int64_t>(tree_.size())) mask *= 2;
    for (; mask > 0; mask /= 2) {
      const std::int64_t next = pos + mask;
      if (next < static_cast<std::int64_t>(tree_.size()) &&
          tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return pos;  // 0-based element index
  }

 private:
  std::vector<double> tree_;
};

struct ComponentRun {
  double tau = 0;
  bool censored = false;
  std::uint64_t events = 0;
};

// One component of the voter model under the plain activation scheduler:
// vertex v activates at rate d(v)^theta and interacts with a uniform
// neighbour. No-op updates are consumed as events.
ComponentRun run_voter_activation(const ComponentView& cv, const VoterConfig& cfg,
                                  RngStream& rng,
                                  std::vector<std::int32_t>& opinion,
                                  std::vector<std::int64_t>& opinion_count) {
  ComponentRun out;
  const auto m = cv.size();
  if (m == 1) return out;

  // initial opinions, drawn in vertex order
  std::int64_t distinct = 0;
  for (std::int64_t a = 0; a < m; ++a) {
    const std::int32_t v = cv.verts[a];
    opinion[v] = cfg.init == VoterConfig::Init::unique
                     ? static_cast<std::int32_t>(a)
                     : (rng.bernoulli(cfg.u) ? 1 : 0);
  }
  if (cfg.init == VoterConfig::Init::unique) {
    distinct = m;
    for (std::int64_t a = 0; a < m; ++a) opinion_count[a] = 1;
  } else {
    std::int64_t ones = 0;
    for (std::int64_t a = 0; a < m; ++a) ones += opinion[cv.verts[a]];
    opinion_count[0] = m - ones;
    opinion_count[1] = ones;
    distinct = (ones > 0) + (ones < m);
  }
  if (distinct <= 1) return out;

  std::vector<double> cum(m);
  double total_rate = 0;
  for (std::int64_t a = 0; a < m; ++a) {
    total_rate += std::pow(double(cv.g.degree(cv.verts[a])), cfg.theta);
    cum[a] = total_rate;
  }

  auto change_opinion = [&](std::int32_t v, std::int32_t to) {
    const std::int32_t from = opinion[v];
    if (from == to) return;
    opinion[v] = to;
    if (--opinion_count[from] == 0) --distinct;
    if (++opinion_count[to] == 1) ++distinct;
  };

  double t = 0;
  while (distinct > 1) {
    const double dt = rng.exponential(total_rate);
    if (cfg.horizon && t + dt > *cfg.horizon) {
      out.tau = *cfg.horizon;
      out.censored = true;
      return out;
    }
    t += dt;
    ++out.events;
    const double target = rng.u01() * total_rate;
    const auto a = static_cast<std::int64_t>(
        std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
    const std::int32_t v = cv.verts[std::min(a, m - 1)];
    const auto nb = cv.g.neighbors(v);
    const std::int32_t j =
        nb.nb_first[rng.below(static_cast<std::uint64_t>(nb.size()))];
    if (cfg.dynamics == Dynamics::classical) {
      change_opinion(v, opinion[j]);
    } else {
      const bool keep_v = rng.bernoulli(0.5);
      if (keep_v)
        change_opinion(j, opinion[v]);
      else
        change_opinion(v, opinion[j]);
    }
  }
  out.tau = t;
  return out;
}

// Discordant-edge scheduler: only edges whose endpoints disagree are armed,
// with weight d(a)^{theta-1} + d(b)^{theta-1}.
ComponentRun run_voter_active_edge(const ComponentView& cv, const VoterConfig& cfg,
                                   RngStream& rng,
                                   std::vector<std::int32_t>& opinion,
                                   std::vector<std::int64_t>& opinion_count) {
  ComponentRun out;
  const auto m = cv.size();
  if (m == 1) return out;

  std::int64_t distinct = 0;
  for (std::int64_t a = 0; a < m; ++a) {
    const std::int32_t v = cv.verts[a];
    opinion[v] = cfg.init == VoterConfig::Init::unique
                     ? static_cast<std::int32_t>(a)
                     : (rng.bernoulli(cfg.u) ? 1 : 0);
  }
  if (cfg.init == VoterConfig::Init::unique) {
    distinct = m;
    for (std::int64_t a = 0; a < m; ++a) opinion_count[a] = 1;
  } else {
    std::int64_t ones = 0;
    for (std::int64_t a = 0; a < m; ++a) ones += opinion[cv.verts[a]];
    opinion_count[0] = m - ones;
    opinion_count[1] = ones;
    distinct = (ones > 0) + (ones < m);
  }
  if (distinct <= 1) return out;

  // component edge list and per-vertex incidence
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  std::vector<std::vector<std::int64_t>> incident(m);
  for (std::int64_t a = 0; a < m; ++a) {
    const std::int32_t v = cv.verts[a];
    for (std::int32_t w : cv.g.neighbors(v)) {
      if (w <= v) continue;
      const auto e = static_cast<std::int64_t>(edges.size());
      edges.emplace_back(v, w);
      incident[a].push_back(e);
      incident[cv.local[w]].push_back(e);
    }
  }
  std::vector<double> weight(edges.size());
  auto rate_pow = [&](std::int32_t v) {
    return std::pow(double(cv.g.degree(v)), cfg.theta - 1);
  };
  Fenwick fen(static_cast<std::int64_t>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    weight[e] = rate_pow(edges[e].first) + rate_pow(edges[e].second);
    if (opinion[edges[e].first] != opinion[edges[e].second]) fen.add(e, weight[e]);
  }

  auto change_opinion = [&](std::int32_t v, std::int32_t to) {
    const std::int32_t from = opinion[v];
    if (from == to) return;
    // rearm edges at v
    for (std::int64_t e : incident[cv.local[v]]) {
      const std::int32_t other =
          edges[e].first == v ? edges[e].second : edges[e].first;
      const bool was = from != opinion[other];
      const bool now = to != opinion[other];
      if (was != now) fen.add(e, now ? weight[e] : -weight[e]);
    }
    opinion[v] = to;
    if (--opinion_count[from] == 0) --distinct;
    if (++opinion_count[to] == 1) ++distinct;
  };

  double t = 0;
  while (distinct > 1) {
    const double total = fen.total();
    const double dt = rng.exponential(total);
    if (cfg.horizon && t + dt > *cfg.horizon) {
      out.tau = *cfg.horizon;
      out.censored = true;
      return out;
    }
    t += dt;
    ++out.events;
    const std::int64_t e = fen.find(rng.u01() * total);
    const auto [a, b] = edges[e];
    if (cfg.dynamics == Dynamics::classical) {
      // a adopts b's opinion with probability d(a)^{theta-1} / weight
      const bool flip_a = rng.u01() * weight[e] < rate_pow(a);
      if (flip_a)
        change_opinion(a, opinion[b]);
      else
        change_opinion(b, opinion[a]);
    } else {
      const bool keep_a = rng.bernoulli(0.5);
      if (keep_a)
        change_opinion(b, opinion[a]);
      else
        change_opinion(a, opinion[b]);
    }
  }
  out.tau = t;
  return out;
}

// Reference scheduler: one exponential clock per ordered adjacent pair,
// regenerated when it fires.
ComponentRun run_voter_pair_clocks(const ComponentView& cv, const VoterConfig& cfg,
                                   RngStream& rng,
                                   std::vector<std::int32_t>& opinion,
                                   std::vector<std::int64_t>& opinion_count) {
  ComponentRun out;
  const auto m = cv.size();
  if (m == 1) return out;

  std::int64_t distinct = 0;
  for (std::int64_t a = 0; a < m; ++a) {
    const std::int32_t v = cv.verts[a];
    opinion[v] = cfg.init == VoterConfig::Init::unique
                     ? static_cast<std::int32_t>(a)
                     : (rng.bernoulli(cfg.u) ? 1 : 0);
  }
  if (cfg.init == VoterConfig::Init::unique) {
    distinct = m;
    for (std::int64_t a = 0; a < m; ++a) opinion_count[a] = 1;
  } else {
    std::int64_t ones = 0;
    for (std::int64_t a = 0; a < m; ++a) ones += opinion[cv.verts[a]];
    opinion_count[0] = m - ones;
    opinion_count[1] = ones;
    distinct = (ones > 0) + (ones < m);
  }
  if (distinct <= 1) return out;

  struct Clock {
    double t;
    std::int32_t i, j;
    bool operator>(const Clock& o) const { return t > o.t; }
  };
  auto pair_rate = [&](std::int32_t i, std::int32_t j) {
    const double di = std::pow(double(cv.g.degree(i)), cfg.theta - 1);
    if (cfg.dynamics == Dynamics::classical) return di;
    const double dj = std::pow(double(cv.g.degree(j)), cfg.theta - 1);
    return 0.5 * (di + dj);
  };
  std::priority_queue<Clock, std::vector<Clock>, std::greater<>> heap;
  for (std::int64_t a = 0; a < m; ++a) {
    const std::int32_t i = cv.verts[a];
    for (std::int32_t j : cv.g.neighbors(i))
      heap.push({rng.exponential(pair_rate(i, j)), i, j});
  }

  auto change_opinion = [&](std::int32_t v, std::int32_t to) {
    const std::int32_t from = opinion[v];
    if (from == to) return;
    opinion[v] = to;
    if (--opinion_count[from] == 0) --distinct;
    if (++opinion_count[to] == 1) ++distinct;
  };

  double t = 0;
  while (distinct > 1) {
    const Clock c = heap.top();
    heap.pop();
    if (cfg.horizon && c.t > *cfg.horizon) {
      out.tau = *cfg.horizon;
      out.censored = true;
      return out;
    }
    t = c.t;
    ++out.events;
    // fire i <- j: voter i copies voter j
    change_opinion(c.i, opinion[c.j]);
    heap.push({t + rng.exponential(pair_rate(c.i, c.j)), c.i, c.j});
  }
  out.tau = t;
  return out;
}

}  // namespace

SimOutcome simulate_voter(const Graph& g, const ComponentDecomposition& decomp,
                          const VoterConfig& cfg, const RngStream& rng) {
  cfg.validate();
  if (!g.is_simple())
    throw std::invalid_argument("simulate_voter: graph must be simple");

  SimOutcome out;
  std::vector<std::int32_t> local(g.n() + 1, -1);
  std::vector<std::int32_t> opinion(g.n() + 1, 0);
  std::vector<std::int64_t> opinion_count;

  for (std::size_t c = 0; c < decomp.components.size(); ++c) {
    const auto& verts = decomp.components[c];
    for (std::size_t a = 0; a < verts.size(); ++a)
      local[verts[a]] = static_cast<std::int32_t>(a);
    opinion_count.assign(std::max<std::size_t>(verts.size(), 2), 0);

    ComponentView cv{g, verts, local};
    RngStream comp_rng =
        rng.substream(static_cast<std::uint64_t>(decomp.rep[c]));
    ComponentRun run;
    if (cfg.reference_pair_clocks)
      run = run_voter_pair_clocks(cv, cfg, comp_rng, opinion, opinion_count);
    else if (cfg.active_edge)
      run = run_voter_active_edge(cv, cfg, comp_rng, opinion, opinion_count);
    else
      run = run_voter_activation(cv, cfg, comp_rng, opinion, opinion_count);

    out.per_component_tau.emplace_back(decomp.rep[c], run.tau);
    out.tau_cons = std::max(out.tau_cons, run.tau);
    out.censored |= run.censored;
    out.events += run.events;
  }
  return out;
}

SimOutcome simulate_voter(const Graph& g, const VoterConfig& cfg,
                          const RngStream& rng) {
  return simulate_voter(g, components(g), cfg, rng);
}

namespace {

struct CoalClock {
  double t;
  std::int32_t v;
  std::uint32_t version;
  bool operator>(const CoalClock& o) const { return t > o.t; }
};

// Scratch shared across the components of one run; everything is indexed
// by graph vertex and reset only where a component touched it.
struct CoalScratch {
  std::vector<char> occupied;
  std::vector<std::uint32_t> version;
  std::vector<double> exit;
  std::vector<std::int64_t> offset;
  std::vector<double> cum;

  explicit CoalScratch(std::int64_t n)
      : occupied(n + 1, 0), version(n + 1, 0), exit(n + 1, 0), offset(n + 1, 0) {}
};

double run_coalescing_component(const Graph& g,
                                const std::vector<std::int32_t>& verts,
                                const std::vector<std::int32_t>& walkers,
                                Dynamics dyn, double theta, RngStream& rng,
                                CoalScratch& scratch, std::uint64_t& jumps) {
  if (walkers.size() <= 1 || verts.size() <= 1) return 0;

  scratch.cum.clear();
  std::int64_t pos = 0;
  for (std::int32_t v : verts) {
    scratch.offset[v] = pos;
    const double dv = std::pow(double(g.degree(v)), theta - 1);
    double acc = 0;
    for (std::int32_t u : g.neighbors(v)) {
      acc += dyn == Dynamics::classical
                 ? dv
                 : 0.5 * (dv + std::pow(double(g.degree(u)), theta - 1));
      scratch.cum.push_back(acc);
      ++pos;
    }
    scratch.exit[v] = acc;
  }

  std::int64_t count = 0;
  for (std::int32_t v : walkers) {
    if (!scratch.occupied[v]) {
      scratch.occupied[v] = 1;
      ++count;
    }
  }
  double t = 0;
  if (count > 1) {
    std::priority_queue<CoalClock, std::vector<CoalClock>, std::greater<>> heap;
    for (std::int32_t v : walkers)
      if (scratch.occupied[v])
        heap.push({rng.exponential(scratch.exit[v]), v, scratch.version[v]});

    while (count > 1) {
      const CoalClock c = heap.top();
      heap.pop();
      if (!scratch.occupied[c.v] || scratch.version[c.v] != c.version)
        continue;  // stale
      t = c.t;
      ++jumps;
      // destination by cumulative weight over the neighbour list
      const auto nb = g.neighbors(c.v);
      const double target = rng.u01() * scratch.exit[c.v];
      const auto base = scratch.offset[c.v];
      std::int64_t lo = 0, hi = static_cast<std::int64_t>(nb.size()) - 1;
      while (lo < hi) {
        const std::int64_t mid = (lo + hi) / 2;
        if (scratch.cum[base + mid] > target) hi = mid; else lo = mid + 1;
      }
      const std::int32_t dest = nb.nb_first[lo];

      scratch.occupied[c.v] = 0;
      ++scratch.version[c.v];
      if (scratch.occupied[dest]) {
        --count;  // merge on arrival
      } else {
        scratch.occupied[dest] = 1;
        heap.push({t + rng.exponential(scratch.exit[dest]), dest,
                   scratch.version[dest]});
      }
    }
  }
  for (std::int32_t v : verts) {  // leave the scratch clean
    scratch.occupied[v] = 0;
    scratch.version[v] = 0;
  }
  return t;
}

}  // namespace

CoalOutcome simulate_coalescing(const Graph& g,
                                const ComponentDecomposition& decomp,
                                Dynamics dynamics, double theta,
                                const CoalStart& start, const RngStream& rng) {
  if (!g.is_simple())
    throw std::invalid_argument("simulate_coalescing: graph must be simple");
  if (start.kind != CoalStart::Kind::all &&
      (start.x < 1 || start.x > g.n() || start.y < 1 || start.y > g.n()))
    throw std::invalid_argument("simulate_coalescing: start vertex out of range");
  CoalOutcome out;
  CoalScratch scratch(g.n());

  if (start.kind == CoalStart::Kind::all) {
    for (std::size_t c = 0; c < decomp.components.size(); ++c) {
      RngStream comp_rng =
          rng.substream(static_cast<std::uint64_t>(decomp.rep[c]));
      const double tau = run_coalescing_component(
          g, decomp.components[c], decomp.components[c], dynamics, theta,
          comp_rng, scratch, out.jumps);
      out.per_component_tau.emplace_back(decomp.rep[c], tau);
      out.tau_coal = std::max(out.tau_coal, tau);
    }
    return out;
  }

  const auto comp_id = decomp.component_id[start.x];
  const auto& verts = decomp.components[comp_id];
  RngStream comp_rng =
      rng.substream(static_cast<std::uint64_t>(decomp.rep[comp_id]));

  std::vector<std::int32_t> walkers;
  if (start.kind == CoalStart::Kind::pair) {
    if (decomp.component_id[start.y] != comp_id)
      throw std::invalid_argument(
          "simulate_coalescing: pair start requires walkers in one component");
    walkers = {start.x, start.y};
  } else {
    // two independent draws from the stationary law of this component
    const auto rm = build_generator(g, verts, dynamics, theta);
    const auto sd = stationary(rm);
    std::vector<double> cum(verts.size());
    double acc = 0;
    for (std::size_t a = 0; a < verts.size(); ++a) {
      acc += sd.pi(static_cast<std::int64_t>(a));
      cum[a] = acc;
    }
    auto draw = [&]() {
      const double u = comp_rng.u01() * acc;
      const auto a = static_cast<std::size_t>(
          std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      return verts[std::min(a, verts.size() - 1)];
    };
    walkers = {draw(), draw()};
  }

  const double tau = run_coalescing_component(g, verts, walkers, dynamics,
                                              theta, comp_rng, scratch, out.jumps);
  out.per_component_tau.emplace_back(decomp.rep[comp_id], tau);
  out.tau_coal = tau;
  return out;
}

CoalOutcome simulate_coalescing(const Graph& g, Dynamics dynamics, double theta,
                                const CoalStart& start, const RngStream& rng) {
  return simulate_coalescing(g, components(g), dynamics, theta, start, rng);
}

std::vector<ReplicateResult> run_replicates(
    std::int64_t reps, int threads,
    const std::function<ReplicateResult(std::int64_t)>& fn) {
  if (reps < 1) throw std::invalid_argument("run_replicates: reps must be >= 1");
  std::vector<ReplicateResult> results(reps);
  auto worker = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) results[i] = fn(i);
  };
  if (threads <= 1) {
    worker(0, reps);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (reps + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const std::int64_t lo = w * chunk;
      const std::int64_t hi = std::min<std::int64_t>(reps, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return results;
}

BatchStats batch(std::int64_t reps, std::uint64_t seed, std::string_view purpose,
                 const std::function<ReplicateResult(std::int64_t, RngStream)>& fn,
                 int threads) {
  return summarize(run_replicates(reps, threads, [&](std::int64_t i) {
    return fn(i, RngStream(seed, purpose, static_cast<std::uint64_t>(i)));
  }));
}

BatchStats summarize(const std::vector<ReplicateResult>& results) {
  BatchStats s;
  s.reps = static_cast<std::int64_t>(results.size());
  std::vector<double> values;
  values.reserve(results.size());
  for (const auto& r : results) {
    if (r.censored)
      ++s.censored;
    else
      values.push_back(r.value);
  }
  if (values.empty()) return s;

  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / double(values.size());
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = values.size() > 1 ? ss / double(values.size() - 1) : 0;
  s.stderr_mean = std::sqrt(s.variance / double(values.size()));

  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double h = p * double(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
  };
  s.q05 = quantile(0.05);
  s.q50 = quantile(0.50);
  s.q95 = quantile(0.95);
  return s;
}

std::string batch_stats_json(const BatchStats& s) {
  json j;
  j["reps"] = s.reps;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["stderr"] = s.stderr_mean;
  j["q05"] = s.q05;
  j["q50"] = s.q50;
  j["q95"] = s.q95;
  j["censored"] = s.censored;
  return j.dump(2);
}

}  // namespace voternet
