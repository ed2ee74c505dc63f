#include "voternet/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "voternet/dynamics.hpp"
#include "voternet/experiments.hpp"
#include "voternet/graph.hpp"
#include "voternet/gw.hpp"
#include "voternet/structure.hpp"

namespace voternet {

using nlohmann::json;

namespace {

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["variant"] = c.variant;
  j["allow_nonsubcritical"] = c.allow_nonsubcritical;
  j["fast"] = c.fast;
  j["graph"] = c.graph_path;
  j["dynamics"] = c.dynamics;
  j["theta"] = c.theta;
  j["init"] = c.init;
  j["u"] = c.u;
  j["coalescing"] = c.coalescing;
  j["starts"] = c.starts;
  j["active_edge"] = c.active_edge;
  j["reference_clocks"] = c.reference_clocks;
  if (c.horizon) j["horizon"] = *c.horizon;
  j["censor_threshold"] = c.censor_threshold;
  j["reps"] = c.reps;
  j["grid"] = c.grid;
  j["tolerance"] = c.tolerance;
  if (c.target) j["target"] = *c.target;
  j["quenched"] = c.quenched;
  j["k"] = c.root_k;
  j["samples"] = c.samples;
  if (c.alpha) j["alpha"] = *c.alpha;
  j["truncation"] = c.truncation;
  j["thin"] = c.thin;
  j["component"] = c.component;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["version"] = kVersion;
  return j;
}

std::string resolve_out(const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("VOTERNET_OUTDIR"))
      p = std::filesystem::path(dir) / p;
  }
  return p.string();
}

void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out.empty()) {
    std::cout << content << '\n';
  } else {
    write_artifact(cfg.out, content);
  }
}

GraphSpec spec_from(const RunConfig& cfg) {
  const auto v = parse_variant(cfg.variant);
  if (!v) throw std::invalid_argument("unknown variant: " + cfg.variant);
  return GraphSpec{cfg.n, cfg.beta, cfg.gamma, *v, cfg.allow_nonsubcritical};
}

Dynamics dynamics_from(const RunConfig& cfg) {
  const auto d = parse_dynamics(cfg.dynamics);
  if (!d) throw std::invalid_argument("unknown dynamics: " + cfg.dynamics);
  return *d;
}

struct LoadedGraph {
  Graph graph;
  double beta = 0;
  double gamma = 0;
  std::string variant = "none";
};

LoadedGraph load_or_generate(const RunConfig& cfg) {
  if (!cfg.graph_path.empty()) {
    GraphFile f = read_graph_file(cfg.graph_path);
    return {std::move(f.graph), f.beta, f.gamma, f.variant};
  }
  const GraphSpec spec = spec_from(cfg);
  return {sample_graph(spec, RngStream(cfg.seed, "gen", 0), {cfg.fast}),
          cfg.beta, cfg.gamma, cfg.variant};
}

int cmd_gen(const RunConfig& cfg) {
  const GraphSpec spec = spec_from(cfg);
  const Graph g = sample_graph(spec, RngStream(cfg.seed, "gen", 0), {cfg.fast});
  std::ostringstream os;
  write_graph(os, g, cfg.beta, cfg.gamma, variant_name(spec.variant));
  emit(cfg, os.str());
  return kOk;
}

int cmd_stats(const RunConfig& cfg) {
  const LoadedGraph lg = load_or_generate(cfg);
  GraphSpec spec{lg.graph.n(), lg.beta, lg.gamma,
                 parse_variant(lg.variant).value_or(Variant::CL), true};
  const StructureReport report = structure_report(lg.graph, spec);

  json j = json::parse(structure_report_json(report));
  const auto simple = find_simple_double_star(lg.graph, spec);
  const auto longds = find_long_double_star(lg.graph, spec);
  j["simple_double_star"] = nullptr;
  j["long_double_star"] = nullptr;
  if (simple)
    j["simple_double_star"] = {{"hubs", {simple->hub_a, simple->hub_b}},
                               {"degrees", {simple->hub_degree_a, simple->hub_degree_b}}};
  if (longds)
    j["long_double_star"] = {{"path", longds->path},
                             {"degrees", {longds->hub_degree_a, longds->hub_degree_b}}};
  j["config"] = config_json(cfg);
  emit(cfg, j.dump(2));
  if (!cfg.csv.empty()) write_artifact(cfg.csv, structure_report_csv(report));
  return kOk;
}

int cmd_exact(const RunConfig& cfg, bool audit) {
  const LoadedGraph lg = load_or_generate(cfg);
  if (!lg.graph.is_simple())
    throw std::invalid_argument("exact solves need a simple graph; collapse first");
  const Dynamics dyn = dynamics_from(cfg);
  const auto decomp = components(lg.graph);
  if (cfg.component < 0 || cfg.component > lg.graph.n())
    throw std::invalid_argument("component anchor out of range");

  json out = json::array();
  for (std::size_t c = 0; c < decomp.components.size(); ++c) {
    if (cfg.component > 0 &&
        decomp.component_id[cfg.component] != static_cast<std::int32_t>(c))
      continue;
    const auto& comp = decomp.components[c];
    if (comp.size() < 2 && decomp.components.size() > 1 && cfg.component == 0)
      continue;  // skip isolated vertices in whole-graph reports
    const RateMatrix rm = build_generator(lg.graph, comp, dyn, cfg.theta);
    const StationaryDist sd = stationary(rm);
    if (audit) {
      // observation set: the best star inside the component, if any
      std::vector<std::vector<std::int32_t>> extras;
      std::int32_t best_k = -1;
      std::int64_t best_leaves = 0;
      for (std::size_t a = 0; a < comp.size(); ++a) {
        std::int64_t leaves = 0;
        for (std::int32_t y : lg.graph.neighbors(comp[a]))
          if (lg.graph.degree(y) == 1) ++leaves;
        if (leaves > best_leaves) {
          best_leaves = leaves;
          best_k = static_cast<std::int32_t>(a);
        }
      }
      if (best_k >= 0) {
        std::vector<std::int32_t> subset{best_k};
        for (std::size_t a = 0; a < comp.size(); ++a)
          if (lg.graph.degree(comp[a]) == 1 &&
              lg.graph.adjacent(comp[a], comp[best_k]))
            subset.push_back(static_cast<std::int32_t>(a));
        if (subset.size() > 1) extras.push_back(subset);
      }
      const AuditReport report = bound_audit(rm, sd, extras, cfg.caps);
      json jr = json::parse(audit_report_json(report));
      jr["component_rep"] = decomp.rep[c];
      out.push_back(jr);
    } else {
      const ChainQuantities q = chain_quantities(rm, sd, cfg.caps);
      json jq = json::parse(chain_quantities_json(q));
      jq["component_rep"] = decomp.rep[c];
      out.push_back(jq);
    }
  }
  json j;
  j["components"] = out;
  j["config"] = config_json(cfg);
  emit(cfg, j.dump(2));
  return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const Dynamics dyn = dynamics_from(cfg);
  std::optional<LoadedGraph> fixed;
  std::optional<GraphSpec> spec;
  if (!cfg.graph_path.empty()) {
    fixed = load_or_generate(cfg);
  } else {
    spec = spec_from(cfg);
  }

  BatchStats stats;
  if (cfg.coalescing) {
    CoalStart start;
    if (cfg.starts == "all") {
      start.kind = CoalStart::Kind::all;
    } else if (cfg.starts == "stationary") {
      start.kind = CoalStart::Kind::stationary_pair;
      start.x = 1;
    } else if (cfg.starts.rfind("pair:", 0) == 0) {
      start.kind = CoalStart::Kind::pair;
      const auto comma = cfg.starts.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("starts=pair:x,y");
      start.x = std::stoi(cfg.starts.substr(5, comma - 5));
      start.y = std::stoi(cfg.starts.substr(comma + 1));
    } else {
      throw std::invalid_argument("unknown starts: " + cfg.starts);
    }
    stats = batch(
        cfg.reps, cfg.seed, "simulate/coalescing",
        [&](std::int64_t, RngStream s) {
          if (fixed) {
            const CoalOutcome res =
                simulate_coalescing(fixed->graph, dyn, cfg.theta, start,
                                    s.substream("walk"));
            return ReplicateResult{res.tau_coal, false};
          }
          const Graph g = sample_graph(*spec, s.substream("graph"));
          const CoalOutcome res =
              simulate_coalescing(g, dyn, cfg.theta, start, s.substream("walk"));
          return ReplicateResult{res.tau_coal, false};
        },
        cfg.threads);
  } else {
    VoterConfig vc;
    vc.dynamics = dyn;
    vc.theta = cfg.theta;
    vc.init = cfg.init == "unique" ? VoterConfig::Init::unique
                                   : VoterConfig::Init::bernoulli;
    if (cfg.init.rfind("bernoulli:", 0) == 0)
      vc.u = std::stod(cfg.init.substr(10));
    else
      vc.u = cfg.u;
    vc.horizon = cfg.horizon;
    vc.active_edge = cfg.active_edge;
    vc.reference_pair_clocks = cfg.reference_clocks;
    vc.validate();
    stats = batch(
        cfg.reps, cfg.seed, "simulate/voter",
        [&](std::int64_t, RngStream s) {
          if (fixed) {
            const SimOutcome res =
                simulate_voter(fixed->graph, vc, s.substream("voter"));
            return ReplicateResult{res.tau_cons, res.censored};
          }
          const Graph g = sample_graph(*spec, s.substream("graph"));
          const SimOutcome res = simulate_voter(g, vc, s.substream("voter"));
          return ReplicateResult{res.tau_cons, res.censored};
        },
        cfg.threads);
  }

  json j = json::parse(batch_stats_json(stats));
  j["N"] = fixed ? fixed->graph.n() : cfg.n;
  j["beta"] = cfg.beta;
  j["gamma"] = cfg.gamma;
  j["variant"] = cfg.variant;
  j["dynamics"] = cfg.dynamics;
  j["theta"] = cfg.theta;
  j["init"] = cfg.init;
  j["seed"] = cfg.seed;
  j["config"] = config_json(cfg);
  emit(cfg, j.dump(2));

  const double censored_fraction =
      stats.reps > 0 ? double(stats.censored) / double(stats.reps) : 0;
  return censored_fraction > cfg.censor_threshold ? kCensored : kOk;
}

int cmd_scaling(const RunConfig& cfg) {
  const GraphSpec tmpl{2, cfg.beta, cfg.gamma,
                       parse_variant(cfg.variant).value_or(Variant::CL),
                       cfg.allow_nonsubcritical};
  const auto grid = parse_grid(cfg.grid);

  ScalingOptions opts;
  opts.init = cfg.init == "unique" ? VoterConfig::Init::unique
                                   : VoterConfig::Init::bernoulli;
  if (cfg.init.rfind("bernoulli:", 0) == 0)
    opts.u = std::stod(cfg.init.substr(10));
  opts.tolerance = cfg.tolerance;
  opts.target = cfg.target;
  opts.horizon = cfg.horizon;
  opts.quenched = cfg.quenched;
  opts.threads = cfg.threads;

  const ScalingResult result = scaling_experiment(
      tmpl, dynamics_from(cfg), cfg.theta, grid, cfg.reps,
      RngStream(cfg.seed, "scaling", 0), opts);

  const std::string base = cfg.out.empty() ? std::string("scaling") : cfg.out;
  write_artifact(base + ".json",
                 scaling_result_json(result, config_json(cfg).dump()));
  write_artifact(base + ".csv", scaling_result_csv(result));
  std::cout << "scaling: " << (result.verdict ? "pass" : "fail")
            << " slope=" << result.slope << " target=" << result.target
            << " theory=" << result.theory << '\n';
  return kOk;
}

int cmd_gw(const RunConfig& cfg) {
  const GraphSpec spec = spec_from(cfg);
  if (cfg.alpha) {
    const TailReport report = gw_tail_statistics(
        spec, *cfg.alpha, cfg.samples, RngStream(cfg.seed, "gw-tail", 0));
    json j = json::parse(tail_report_json(report));
    j["config"] = config_json(cfg);
    emit(cfg, j.dump(2));
    return kOk;
  }

  TreeSampleOptions topts;
  topts.truncation_z = cfg.truncation;
  const BatchStats stats = batch(
      cfg.samples, cfg.seed, cfg.thin ? "gw-thin" : "gw-tree",
      [&](std::int64_t, RngStream s) {
        MarkedTree t = sample_tree(cfg.root_k, spec, s, topts);
        if (!cfg.thin) return ReplicateResult{double(t.size()), false};
        std::span<MarkedTree> one(&t, 1);
        const ThinResult thin = thin_forest(one, spec.n);
        return ReplicateResult{double(thin.unthinned_marks.size()), false};
      },
      cfg.threads);
  if (!cfg.dump_tree.empty()) {
    MarkedTree t =
        sample_tree(cfg.root_k, spec, RngStream(cfg.seed, "gw-tree", 0), topts);
    std::span<MarkedTree> one(&t, 1);
    thin_forest(one, spec.n);
    std::ostringstream os;
    write_tree(os, t);
    write_artifact(cfg.dump_tree, os.str());
  }
  json j = json::parse(batch_stats_json(stats));
  j["k"] = cfg.root_k;
  j["mode"] = cfg.thin ? "thinned-cluster-size" : "tree-size";
  j["config"] = config_json(cfg);
  emit(cfg, j.dump(2));
  return kOk;
}

int cmd_probe(const RunConfig& cfg) {
  if (cfg.agreement) {
    const AgreementReport report = model_agreement_probe(
        cfg.n, cfg.beta, cfg.gamma, cfg.reps, cfg.seed, cfg.threads);
    json j = json::parse(agreement_report_json(report));
    j["config"] = config_json(cfg);
    emit(cfg, j.dump(2));
    return kOk;
  }
  const GraphSpec spec = spec_from(cfg);
  const Graph g = sample_graph(spec, RngStream(cfg.seed, "gen", 0));
  const ComponentProbe probe = component_probe(g, spec, dynamics_from(cfg),
                                               cfg.theta, cfg.reps, cfg.seed);
  json j = json::parse(component_probe_json(probe));
  j["config"] = config_json(cfg);
  emit(cfg, j.dump(2));
  return kOk;
}

int cmd_validate(const RunConfig& cfg) {
  const auto diagnostics = validate_config(cfg);
  json j;
  j["diagnostics"] = diagnostics;
  j["valid"] = diagnostics.empty();
  j["config"] = config_json(cfg);
  emit(cfg, j.dump(2));
  return kOk;
}

}  // namespace

void write_artifact(const std::string& path, const std::string& content) {
  const std::string resolved = resolve_out(path);
  const std::string tmp = resolved + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
    os << content;
    if (!content.empty() && content.back() != '\n') os << '\n';
  }
  std::filesystem::rename(tmp, resolved);
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.n > 0 || cfg.beta != 0 || cfg.gamma != 0) {
    if (cfg.n < 2) out.push_back("n must be at least 2");
    if (!(cfg.beta > 0)) out.push_back("beta must be positive");
    if (!(cfg.gamma > 0)) out.push_back("gamma must be positive");
    if (cfg.beta > 0 && cfg.gamma > 0 && cfg.beta + 2 * cfg.gamma >= 1 &&
        !cfg.allow_nonsubcritical)
      out.push_back("not subcritical: beta + 2*gamma >= 1");
    if (cfg.gamma >= 0.5)
      out.push_back("K_gamma undefined: gamma must lie in (0, 1/2)");
  }
  if (!parse_variant(cfg.variant)) out.push_back("unknown variant: " + cfg.variant);
  if (!parse_dynamics(cfg.dynamics))
    out.push_back("unknown dynamics: " + cfg.dynamics);
  if (cfg.init.rfind("bernoulli", 0) == 0) {
    double u = cfg.u;
    if (cfg.init.rfind("bernoulli:", 0) == 0) {
      try {
        u = std::stod(cfg.init.substr(10));
      } catch (...) {
        out.push_back("malformed init: " + cfg.init);
      }
    }
    if (!(u > 0 && u < 1)) out.push_back("u must lie in (0,1)");
  } else if (cfg.init != "unique") {
    out.push_back("unknown init: " + cfg.init);
  }
  if (cfg.reps < 1) out.push_back("reps must be >= 1");
  if (!cfg.grid.empty()) {
    try {
      const auto grid = parse_grid(cfg.grid);
      if (grid.size() < 2) out.push_back("grid must contain at least 2 sizes");
    } catch (const std::exception& e) {
      out.push_back(e.what());
    }
  }
  if (cfg.horizon && !(*cfg.horizon > 0)) out.push_back("horizon must be positive");
  if (cfg.threads < 1) out.push_back("threads must be >= 1");
  return out;
}

int run(const RunConfig& cfg) {
  try {
    if (cfg.command == "gen") return cmd_gen(cfg);
    if (cfg.command == "stats") return cmd_stats(cfg);
    if (cfg.command == "exact") return cmd_exact(cfg, false);
    if (cfg.command == "audit") return cmd_exact(cfg, true);
    if (cfg.command == "simulate") return cmd_simulate(cfg);
    if (cfg.command == "scaling") return cmd_scaling(cfg);
    if (cfg.command == "gw") return cmd_gw(cfg);
    if (cfg.command == "probe") return cmd_probe(cfg);
    if (cfg.command == "validate") return cmd_validate(cfg);
    std::cerr << json{{"error", "unknown command: " + cfg.command}}.dump() << '\n';
    return kInvalidParams;
  } catch (const CapExceeded& e) {
    std::cerr << json{{"error", e.what()}, {"code", kCapExceeded}}.dump() << '\n';
    return kCapExceeded;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", e.what()}, {"code", kInvalidParams}}.dump() << '\n';
    return kInvalidParams;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"code", 1}}.dump() << '\n';
    return 1;
  }
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"consensus dynamics on subcritical scale-free random graphs"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;

  auto add_graph_opts = [&](CLI::App* sub, bool with_file) {
    sub->add_option("--n", cfg.n, "vertex count");
    sub->add_option("--beta", cfg.beta, "edge density parameter");
    sub->add_option("--gamma", cfg.gamma, "power-law strength");
    sub->add_option("--variant", cfg.variant, "cl | snr | grg | mnr");
    sub->add_flag("--allow-nonsubcritical", cfg.allow_nonsubcritical,
                  "accept beta + 2*gamma >= 1");
    sub->add_flag("--fast", cfg.fast, "skip vanishing-probability pairs");
    if (with_file) sub->add_option("--graph", cfg.graph_path, "graph file to load");
  };
  auto add_dyn_opts = [&](CLI::App* sub) {
    sub->add_option("--dynamics", cfg.dynamics, "classical | discursive");
    sub->add_option("--theta", cfg.theta, "temperature exponent");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "stream seed");
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("-o,--out", cfg.out, "output path (or prefix for scaling)");
  };

  auto* gen = app.add_subcommand("gen", "sample one graph to a file");
  add_graph_opts(gen, false);
  add_common(gen);

  auto* stats = app.add_subcommand("stats", "structural report");
  add_graph_opts(stats, true);
  stats->add_option("--csv", cfg.csv, "per-component CSV path");
  add_common(stats);

  auto* exact = app.add_subcommand("exact", "exact chain quantities");
  add_graph_opts(exact, true);
  add_dyn_opts(exact);
  exact->add_option("--component", cfg.component,
                    "restrict to the component containing this vertex");
  exact->add_option("--cap-hitting", cfg.caps.hitting, "hitting solve cap");
  exact->add_option("--cap-product", cfg.caps.product, "pair chain cap");
  exact->add_option("--cap-coalescence", cfg.caps.coalescence,
                    "occupied-set cap");
  exact->add_option("--cap-voter", cfg.caps.voter_states, "opinion-space cap");
  add_common(exact);

  auto* audit = app.add_subcommand("audit", "inequality audit");
  add_graph_opts(audit, true);
  add_dyn_opts(audit);
  audit->add_option("--component", cfg.component,
                    "restrict to the component containing this vertex");
  add_common(audit);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs");
  add_graph_opts(simulate, true);
  add_dyn_opts(simulate);
  simulate->add_option("--init", cfg.init, "bernoulli[:u] | unique");
  simulate->add_option("--u", cfg.u, "Bernoulli opinion probability");
  simulate->add_flag("--coalescing", cfg.coalescing, "simulate the dual walkers");
  simulate->add_option("--starts", cfg.starts, "all | pair:x,y | stationary");
  simulate->add_flag("--active-edge", cfg.active_edge,
                     "discordant-interaction scheduler");
  simulate->add_flag("--reference-clocks", cfg.reference_clocks,
                     "per-pair clock reference scheduler");
  simulate->add_option("--horizon", [&cfg](const std::vector<std::string>& v) {
    try { cfg.horizon = std::stod(v.at(0)); } catch (...) { return false; }
    return true;
  }, "censoring time cap");
  simulate->add_option("--censor-threshold", cfg.censor_threshold,
                       "censored fraction triggering exit 4");
  simulate->add_option("--reps", cfg.reps, "replicates");
  add_common(simulate);

  auto* scaling = app.add_subcommand("scaling", "slope of log mean consensus time");
  add_graph_opts(scaling, false);
  add_dyn_opts(scaling);
  scaling->add_option("--grid", cfg.grid, "lo:hi:xK geometric size grid")
      ->required();
  scaling->add_option("--reps", cfg.reps, "replicates per size");
  scaling->add_option("--init", cfg.init, "bernoulli[:u] | unique");
  scaling->add_option("--tolerance", cfg.tolerance, "verdict tolerance");
  scaling->add_option("--target", [&cfg](const std::vector<std::string>& v) {
    try { cfg.target = std::stod(v.at(0)); } catch (...) { return false; }
    return true;
  }, "slope target override (defaults to theory)");
  scaling->add_option("--horizon", [&cfg](const std::vector<std::string>& v) {
    try { cfg.horizon = std::stod(v.at(0)); } catch (...) { return false; }
    return true;
  }, "censoring time cap");
  scaling->add_flag("--quenched", cfg.quenched, "one graph per grid point");
  add_common(scaling);

  auto* gw = app.add_subcommand("gw", "branching-process sampling");
  add_graph_opts(gw, false);
  gw->add_option("--k", cfg.root_k, "root vertex");
  gw->add_option("--samples", cfg.samples, "tree samples");
  gw->add_option("--alpha", [&cfg](const std::vector<std::string>& v) {
    try { cfg.alpha = std::stod(v.at(0)); } catch (...) { return false; }
    return true;
  }, "tail mode: offspring inflation factor");
  gw->add_option("--truncation", cfg.truncation, "mark truncation level");
  gw->add_flag("--thin", cfg.thin, "report thinned cluster sizes");
  gw->add_option("--dump-tree", cfg.dump_tree, "write one sampled tree");
  add_common(gw);

  auto* probe = app.add_subcommand("probe", "component timing / variant agreement");
  add_graph_opts(probe, false);
  add_dyn_opts(probe);
  probe->add_option("--reps", cfg.reps, "replicates");
  probe->add_flag("--agreement", cfg.agreement, "compare CL/SNR/GRG summaries");
  add_common(probe);

  auto* validate = app.add_subcommand("validate", "diagnose a configuration");
  add_graph_opts(validate, true);
  add_dyn_opts(validate);
  validate->add_option("--init", cfg.init, "bernoulli[:u] | unique");
  validate->add_option("--grid", cfg.grid, "lo:hi:xK");
  validate->add_option("--reps", cfg.reps, "replicates");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalidParams;
  }

  for (auto* sub : {gen, stats, exact, audit, simulate, scaling, gw, probe, validate})
    if (sub->parsed()) cfg.command = sub->get_name();

  if (cfg.command != "validate") {
    // refuse obviously broken inputs before touching any module
    RunConfig probe_cfg = cfg;
    if (!cfg.graph_path.empty()) {
      probe_cfg.n = 0;
      probe_cfg.beta = 0;
      probe_cfg.gamma = 0;
    }
    if (cfg.command == "scaling") probe_cfg.n = 2;  // sizes come from the grid
    const auto diagnostics = validate_config(probe_cfg);
    if (!diagnostics.empty() && cfg.graph_path.empty() &&
        (cfg.command == "gen" || cfg.command == "scaling" ||
         cfg.command == "gw" || cfg.command == "probe" ||
         cfg.command == "simulate" || cfg.command == "stats" ||
         cfg.command == "exact" || cfg.command == "audit")) {
      json j;
      j["error"] = "invalid configuration";
      j["diagnostics"] = diagnostics;
      std::cerr << j.dump() << '\n';
      return kInvalidParams;
    }
  }
  return run(cfg);
}

}  // namespace voternet
