#include "voternet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "voternet/structure.hpp"

namespace voternet {

using nlohmann::json;

namespace {

double classical_global(double g, double th) {
  if (th >= 1) return g;
  if (th > 1 / (2 - 2 * g)) return g * th;
  if (th >= 0) return g / (2 - 2 * g);
  return g * (1 - th) / (2 - 2 * g);
}

double discursive_global(double g, double th) {
  if (th >= (3 - 4 * g) / (2 - 2 * g)) return g / (2 - 2 * g);
  if (th > 1) return g * (2 - th);
  if (th >= 2 * g) return g;
  return g * (2 - th) / (2 - 2 * g);
}

double classical_component1(double g, double th) {
  if (th >= 1) return g;
  if (th > g / (1 - g)) return g * th;
  if (th >= 0) return g * g / (1 - g);
  return g * g * (1 - th) / (1 - g);
}

double discursive_component1(double g, double th) {
  if (th >= (2 - 3 * g) / (1 - g)) return g * g / (1 - g);
  if (th > 1) return g * (2 - th);
  if (th >= 3 - 1 / g) return g;
  return g * g * (2 - th) / (1 - g);
}

}  // namespace

double theoretical_exponent(const ExponentQuery& q) {
  if (!(q.gamma > 0) || !(q.gamma < 0.5))
    throw std::invalid_argument("theoretical_exponent: gamma must lie in (0, 1/2)");
  if (q.dynamics == Dynamics::classical)
    return q.scope == ExponentScope::global
               ? classical_global(q.gamma, q.theta)
               : classical_component1(q.gamma, q.theta);
  return q.scope == ExponentScope::global
             ? discursive_global(q.gamma, q.theta)
             : discursive_component1(q.gamma, q.theta);
}

double exponent_in_tau(double tau, double theta, Dynamics dynamics,
                       ExponentScope scope) {
  if (!(tau > 3))
    throw std::invalid_argument("exponent_in_tau: tau must exceed 3");
  return theoretical_exponent({1.0 / (tau - 1), theta, dynamics, scope});
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  // lo:hi:xK, geometric with integer factor K
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos ||
      c2 + 1 >= text.size() || text[c2 + 1] != 'x')
    throw std::invalid_argument("grid syntax is lo:hi:xK");
  const std::int64_t lo = std::stoll(text.substr(0, c1));
  const std::int64_t hi = std::stoll(text.substr(c1 + 1, c2 - c1 - 1));
  const std::int64_t factor = std::stoll(text.substr(c2 + 2));
  if (lo < 2 || hi < lo || factor < 2)
    throw std::invalid_argument("grid must satisfy 2 <= lo <= hi, factor >= 2");
  std::vector<std::int64_t> grid;
  for (std::int64_t n = lo; n <= hi; n *= factor) grid.push_back(n);
  return grid;
}

namespace {

struct Fit {
  double slope = 0;
  double intercept = 0;
};

Fit fit_loglog(const std::vector<std::int64_t>& ns, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(double(ns[i]));
    const double y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / denom, (sy * sxx - sx * sxy) / denom};
}

}  // namespace

ScalingResult scaling_experiment(const GraphSpec& spec_template,
                                 Dynamics dynamics, double theta,
                                 const std::vector<std::int64_t>& grid,
                                 std::int64_t reps, const RngStream& rng,
                                 const ScalingOptions& opts) {
  if (grid.size() < 2)
    throw std::invalid_argument("scaling_experiment: grid needs at least 2 sizes");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw std::invalid_argument("scaling_experiment: grid must be strictly increasing");
  if (reps < 1) throw std::invalid_argument("scaling_experiment: reps must be >= 1");

  ScalingResult result;
  result.tolerance = opts.tolerance;
  result.theory = theoretical_exponent(
      {spec_template.gamma, theta, dynamics, ExponentScope::global});
  result.target = opts.target.value_or(result.theory);

  VoterConfig cfg;
  cfg.dynamics = dynamics;
  cfg.theta = theta;
  cfg.init = opts.init;
  cfg.u = opts.u;
  cfg.horizon = opts.horizon;

  // per-replicate samples kept for the bootstrap
  std::vector<std::vector<double>> samples(grid.size());

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    GraphSpec spec = spec_template;
    spec.n = grid[gi];
    spec.validate();
    const RngStream point_rng = rng.substream(static_cast<std::uint64_t>(spec.n));

    std::optional<Graph> quenched_graph;
    if (opts.quenched)
      quenched_graph = sample_graph(spec, point_rng.substream("quenched-graph"));

    ScalingPoint point;
    point.n = spec.n;
    const auto results = run_replicates(reps, opts.threads, [&](std::int64_t r) {
      const RngStream rep_rng = point_rng.substream(static_cast<std::uint64_t>(r));
      const Graph* graph;
      std::optional<Graph> fresh;
      if (opts.quenched) {
        graph = &*quenched_graph;
      } else {
        fresh = sample_graph(spec, rep_rng.substream("graph"));
        graph = &*fresh;
      }
      const SimOutcome sim =
          simulate_voter(*graph, cfg, rep_rng.substream("voter"));
      return ReplicateResult{sim.tau_cons, sim.censored};
    });
    point.stats = summarize(results);
    result.censored += point.stats.censored;
    samples[gi].reserve(reps);
    for (const auto& rr : results)
      if (!rr.censored) samples[gi].push_back(rr.value);
    result.points.push_back(point);
  }

  std::vector<double> means, medians;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    means.push_back(result.points[gi].stats.mean);
    medians.push_back(result.points[gi].stats.q50);
  }
  result.slope = fit_loglog(grid, means).slope;
  result.median_slope = fit_loglog(grid, medians).slope;

  // bootstrap over replicates within each grid point
  RngStream boot = rng.substream("bootstrap");
  std::vector<double> slopes;
  for (int b = 0; b < opts.bootstrap; ++b) {
    std::vector<double> bmeans(grid.size());
    bool ok = true;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const auto& xs = samples[gi];
      if (xs.empty()) {
        ok = false;
        break;
      }
      double acc = 0;
      for (std::size_t k = 0; k < xs.size(); ++k)
        acc += xs[boot.below(xs.size())];
      bmeans[gi] = acc / double(xs.size());
      if (!(bmeans[gi] > 0)) ok = false;
    }
    if (ok) slopes.push_back(fit_loglog(grid, bmeans).slope);
  }
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    result.ci_low = slopes[static_cast<std::size_t>(0.025 * (slopes.size() - 1))];
    result.ci_high = slopes[static_cast<std::size_t>(
        std::ceil(0.975 * (slopes.size() - 1)))];
  } else {
    result.ci_low = result.ci_high = result.slope;
  }

  result.verdict = std::abs(result.slope - result.target) <= opts.tolerance;
  return result;
}

std::string scaling_result_json(const ScalingResult& r, const std::string& extra) {
  json j;
  j["slope"] = r.slope;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["median_slope"] = r.median_slope;
  j["theory"] = r.theory;
  j["target"] = r.target;
  j["tolerance"] = r.tolerance;
  j["verdict"] = r.verdict ? "pass" : "fail";
  j["censored"] = r.censored;
  j["points"] = json::array();
  for (const auto& p : r.points) {
    j["points"].push_back({{"N", p.n},
                           {"mean", p.stats.mean},
                           {"stderr", p.stats.stderr_mean},
                           {"q05", p.stats.q05},
                           {"q50", p.stats.q50},
                           {"q95", p.stats.q95},
                           {"reps", p.stats.reps},
                           {"censored", p.stats.censored}});
  }
  if (!extra.empty()) j["config"] = json::parse(extra);
  return j.dump(2);
}

std::string scaling_result_csv(const ScalingResult& r) {
  std::ostringstream os;
  os << "N,mean,stderr,reps\n";
  os.precision(17);
  for (const auto& p : r.points)
    os << p.n << ',' << p.stats.mean << ',' << p.stats.stderr_mean << ','
       << p.stats.reps << '\n';
  return os.str();
}

namespace {

BatchStats time_component(const Graph& g, const std::vector<std::int32_t>& comp,
                          Dynamics dynamics, double theta, std::int64_t reps,
                          std::uint64_t seed, std::string_view purpose) {
  // extract the induced subgraph with relabelled vertices so the engine
  // sees a single small component
  std::vector<std::int32_t> relabel(g.n() + 1, 0);
  for (std::size_t a = 0; a < comp.size(); ++a)
    relabel[comp[a]] = static_cast<std::int32_t>(a + 1);
  std::vector<Edge> edges;
  for (std::int32_t v : comp)
    for (std::int32_t u : g.neighbors(v))
      if (v < u) edges.push_back({relabel[v], relabel[u], 1});
  const Graph sub(static_cast<std::int64_t>(comp.size()), std::move(edges));
  const auto decomp = components(sub);

  return batch(reps, seed, purpose, [&](std::int64_t, RngStream s) {
    const CoalOutcome res = simulate_coalescing(
        sub, decomp, dynamics, theta, {CoalStart::Kind::all, 1, 1}, s);
    return ReplicateResult{res.tau_coal, false};
  });
}

}  // namespace

ComponentProbe component_probe(const Graph& g, const GraphSpec& spec,
                               Dynamics dynamics, double theta,
                               std::int64_t reps, std::uint64_t seed) {
  ComponentProbe probe;
  const auto decomp = components(g);
  const auto& comp1 = decomp.component_of(1);
  probe.comp1_size = static_cast<std::int64_t>(comp1.size());
  probe.comp1 = time_component(g, comp1, dynamics, theta, reps, seed,
                               "probe/component1");

  auto witness = find_simple_double_star(g, spec);
  if (!witness) {
    witness = find_long_double_star(g, spec);
  }
  if (witness && decomp.component_id[witness->hub_a] ==
                     decomp.component_id[1]) {
    // the double star sits inside the component of vertex 1; comparison is
    // then meaningless
    witness.reset();
  }
  if (witness) {
    probe.double_star_found = true;
    probe.double_star_kind =
        witness->kind == DoubleStarWitness::Kind::simple ? "simple" : "long";
    probe.double_star_path = witness->path;
    const auto& comp = decomp.component_of(witness->hub_a);
    probe.double_star_size = static_cast<std::int64_t>(comp.size());
    probe.double_star = time_component(g, comp, dynamics, theta, reps, seed,
                                       "probe/double-star");
    probe.dominant = probe.comp1.mean >= probe.double_star.mean
                         ? "component1"
                         : "double_star";
  } else {
    probe.dominant = "unavailable";
  }
  return probe;
}

std::string component_probe_json(const ComponentProbe& p) {
  json j;
  j["component1"] = {{"size", p.comp1_size},
                     {"mean", p.comp1.mean},
                     {"stderr", p.comp1.stderr_mean},
                     {"reps", p.comp1.reps}};
  j["double_star_found"] = p.double_star_found;
  if (p.double_star_found) {
    j["double_star"] = {{"kind", p.double_star_kind},
                        {"path", p.double_star_path},
                        {"size", p.double_star_size},
                        {"mean", p.double_star.mean},
                        {"stderr", p.double_star.stderr_mean},
                        {"reps", p.double_star.reps}};
  }
  j["dominant"] = p.dominant;
  return j.dump(2);
}

AgreementReport model_agreement_probe(std::int64_t n, double beta, double gamma,
                                      std::int64_t reps, std::uint64_t seed,
                                      int threads) {
  AgreementReport report;
  const Variant variants[] = {Variant::CL, Variant::SNR, Variant::GRG};

  struct Samples {
    std::vector<double> edges, maxdeg, largest;
  };
  std::vector<Samples> all(3);

  for (int vi = 0; vi < 3; ++vi) {
    GraphSpec spec{n, beta, gamma, variants[vi]};
    spec.validate();
    Samples& s = all[vi];
    s.edges.resize(reps);
    s.maxdeg.resize(reps);
    s.largest.resize(reps);
    batch(reps, seed, "agreement/" + variant_name(variants[vi]),
          [&](std::int64_t r, RngStream stream) {
            const Graph g = sample_graph(spec, stream);
            s.edges[r] = double(g.edges().size());
            std::int64_t md = 0, big = 0;
            for (std::int32_t v = 1; v <= g.n(); ++v)
              md = std::max<std::int64_t>(md, g.degree(v));
            for (const auto& comp : components(g).components)
              big = std::max<std::int64_t>(big, comp.size());
            s.maxdeg[r] = double(md);
            s.largest[r] = double(big);
            return ReplicateResult{0.0, false};
          },
          threads);
  }

  auto mean_se = [](const std::vector<double>& xs) {
    double m = 0;
    for (double x : xs) m += x;
    m /= double(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double var = xs.size() > 1 ? ss / double(xs.size() - 1) : 0;
    return std::pair<double, double>{m, std::sqrt(var / double(xs.size()))};
  };

  for (int vi = 0; vi < 3; ++vi) {
    VariantSummary vs;
    vs.variant = variant_name(variants[vi]);
    std::tie(vs.edge_count_mean, vs.edge_count_se) = mean_se(all[vi].edges);
    std::tie(vs.max_degree_mean, vs.max_degree_se) = mean_se(all[vi].maxdeg);
    std::tie(vs.largest_component_mean, vs.largest_component_se) =
        mean_se(all[vi].largest);
    report.variants.push_back(vs);
  }

  auto standardized = [](double m1, double se1, double m2, double se2) {
    const double denom = std::sqrt(se1 * se1 + se2 * se2);
    return denom > 0 ? std::abs(m1 - m2) / denom : 0.0;
  };
  const char* metric_names[] = {"edge_count", "max_degree", "largest_component"};
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const auto& va = report.variants[a];
      const auto& vb = report.variants[b];
      const double vals[] = {
          standardized(va.edge_count_mean, va.edge_count_se, vb.edge_count_mean,
                       vb.edge_count_se),
          standardized(va.max_degree_mean, va.max_degree_se, vb.max_degree_mean,
                       vb.max_degree_se),
          standardized(va.largest_component_mean, va.largest_component_se,
                       vb.largest_component_mean, vb.largest_component_se)};
      for (int m = 0; m < 3; ++m) {
        report.standardized_differences.emplace_back(
            va.variant + "-" + vb.variant + ":" + metric_names[m], vals[m]);
      }
    }
  }
  return report;
}

std::string agreement_report_json(const AgreementReport& r) {
  json j;
  j["variants"] = json::array();
  for (const auto& v : r.variants) {
    j["variants"].push_back({{"variant", v.variant},
                             {"edge_count_mean", v.edge_count_mean},
                             {"edge_count_se", v.edge_count_se},
                             {"max_degree_mean", v.max_degree_mean},
                             {"max_degree_se", v.max_degree_se},
                             {"largest_component_mean", v.largest_component_mean},
                             {"largest_component_se", v.largest_component_se}});
  }
  j["standardized_differences"] = json::object();
  for (const auto& [k, v] : r.standardized_differences)
    j["standardized_differences"][k] = v;
  return j.dump(2);
}

}  // namespace voternet
