#include <doctest.h>

#include <cmath>
#include <sstream>

#include "voternet/graph.hpp"
#include "voternet/structure.hpp"

using namespace voternet;

namespace {

GraphSpec cl_spec(std::int64_t n, double beta, double gamma,
                  Variant v = Variant::CL) {
  return GraphSpec{n, beta, gamma, v};
}

}  // namespace

TEST_CASE("subcritical gate") {
  CHECK_THROWS_AS(cl_spec(10, 0.2, 0.45).validate(), std::invalid_argument);
  CHECK_NOTHROW(cl_spec(10, 0.19, 0.4).validate());
  GraphSpec relaxed{10, 0.2, 0.45, Variant::CL, true};
  CHECK_NOTHROW(relaxed.validate());
  CHECK_THROWS_AS(cl_spec(1, 0.1, 0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(cl_spec(10, -0.1, 0.1).validate(), std::invalid_argument);
}

TEST_CASE("edge_prob closed form") {
  // 0.05 * 100^{-0.1} * 2^{-0.45}, evaluated independently to 30 digits
  const auto p = edge_prob(1, 2, cl_spec(100, 0.05, 0.45));
  CHECK(p.is_probability);
  CHECK(p.value == doctest::Approx(0.023094390570132186).epsilon(1e-12));

  // truncation branch of the min
  GraphSpec hot{10, 50.0, 0.45, Variant::CL, true};
  CHECK(edge_prob(1, 2, hot).value == 1.0);

  // first-order agreement of the exponential variant at tiny probabilities
  const GraphSpec tiny = cl_spec(100, 1e-8, 0.2);
  const double cl = edge_prob(1, 2, tiny).value;
  GraphSpec snr = tiny;
  snr.variant = Variant::SNR;
  const double qs = edge_prob(1, 2, snr).value;
  CHECK(cl < 2e-8);
  CHECK(std::abs(qs / cl - 1.0) < 1e-8);

  GraphSpec grg = tiny;
  grg.variant = Variant::GRG;
  CHECK(edge_prob(1, 2, grg).value == doctest::Approx(cl / (1 + cl)));

  CHECK_THROWS_AS(edge_prob(3, 3, cl_spec(10, 0.1, 0.3)), std::invalid_argument);
  GraphSpec mnr = cl_spec(10, 0.1, 0.3, Variant::MNR);
  const auto loop_mean = edge_prob(3, 3, mnr);
  CHECK_FALSE(loop_mean.is_probability);
  CHECK(loop_mean.value ==
        doctest::Approx(0.1 * std::pow(10.0, -0.4) * std::pow(3.0, -0.6)));
}

TEST_CASE("weights") {
  // 0.1 * 2^{-0.6} * (1 + 2^{-0.2}), evaluated independently to 30 digits
  CHECK(weight(1, cl_spec(2, 0.1, 0.2)) ==
        doctest::Approx(0.12341031328849646).epsilon(1e-12));

  // asymptotic shape (beta/(1-gamma)) (N/i)^gamma at large N
  const GraphSpec big = cl_spec(1000000, 0.1, 0.3);
  const WeightTable table(big);
  const double predicted = 0.1 / 0.7 * std::pow(1e6, 0.3);
  CHECK(table.weight(1) / predicted == doctest::Approx(1.0).epsilon(1e-3));

  // strictly decreasing in the vertex index
  const WeightTable small(cl_spec(50, 0.1, 0.3));
  for (int i = 1; i < 50; ++i) CHECK(small.weight(i) > small.weight(i + 1));

  // pair mean times total weight factorises through the weights
  CHECK(small.pair_mean(3, 7) * small.total() ==
        doctest::Approx(small.weight(3) * small.weight(7)));
}

TEST_CASE("two-vertex graph is a single Bernoulli draw") {
  const GraphSpec spec = cl_spec(2, 0.1, 0.2);
  const double p = edge_prob(1, 2, spec).value;
  const int reps = 100000;
  int edges = 0;
  for (int r = 0; r < reps; ++r) {
    const Graph g = sample_graph(spec, RngStream(11, "k2", r));
    REQUIRE(g.n() == 2);
    edges += static_cast<int>(g.edges().size());
  }
  const double freq = double(edges) / reps;
  const double se = std::sqrt(p * (1 - p) / reps);
  CHECK(std::abs(freq - p) < 3 * se);
}

TEST_CASE("per-pair marginals match edge_prob") {
  const int reps = 100000;
  for (const Variant v : {Variant::CL, Variant::GRG}) {
    const GraphSpec spec = cl_spec(20, 0.1, 0.35, v);
    // a spread of pairs across the index range
    const std::pair<int, int> pairs[] = {{1, 2},  {1, 5},  {1, 20}, {2, 3},
                                         {2, 10}, {3, 7},  {4, 12}, {5, 6},
                                         {5, 19}, {6, 13}, {7, 8},  {8, 16},
                                         {9, 10}, {10, 20}, {11, 12}, {12, 18},
                                         {13, 14}, {15, 16}, {17, 18}, {19, 20}};
    int counts[20] = {0};
    for (int r = 0; r < reps; ++r) {
      const Graph g = sample_graph(spec, RngStream(23, "marginal", r));
      for (int k = 0; k < 20; ++k)
        if (g.adjacent(pairs[k].first, pairs[k].second)) counts[k]++;
    }
    for (int k = 0; k < 20; ++k) {
      const double p = edge_prob(pairs[k].first, pairs[k].second, spec).value;
      const double se = std::sqrt(p * (1 - p) / reps);
      CHECK(std::abs(double(counts[k]) / reps - p) < 3 * se);
    }
  }
}

TEST_CASE("sampled simple graphs are simple and symmetric") {
  const GraphSpec spec = cl_spec(200, 0.1, 0.35, Variant::SNR);
  const Graph g = sample_graph(spec, RngStream(5, "simple", 0));
  CHECK(g.is_simple());
  for (const auto& e : g.edges()) {
    CHECK(e.u < e.v);
    CHECK(e.mult == 1);
    CHECK(g.adjacent(e.u, e.v));
    CHECK(g.adjacent(e.v, e.u));
  }
  for (std::int32_t v = 1; v <= g.n(); ++v) CHECK(g.loop_count(v) == 0);
}

TEST_CASE("multigraph degree of vertex 1 concentrates on its weight") {
  const GraphSpec spec = cl_spec(100, 0.05, 0.3, Variant::MNR);
  const double w1 = weight(1, spec);
  const int reps = 10000;
  double sum = 0, sumsq = 0;
  for (int r = 0; r < reps; ++r) {
    const Graph g = sample_graph(spec, RngStream(31, "mnr-degree", r));
    const double d = double(g.degree(1));
    sum += d;
    sumsq += d * d;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sumsq / reps - mean * mean);
  CHECK(std::abs(mean - w1) < 3 * sd / std::sqrt(double(reps)));
}

TEST_CASE("collapsed multigraph has the exponential-variant marginals") {
  const GraphSpec mnr = cl_spec(50, 0.1, 0.3, Variant::MNR);
  GraphSpec snr = mnr;
  snr.variant = Variant::SNR;
  const std::pair<int, int> pairs[] = {{1, 2}, {1, 3}, {2, 3}, {1, 50}, {25, 26}};
  const int reps = 30000;
  int counts[5] = {0};
  for (int r = 0; r < reps; ++r) {
    const Graph g = collapse(sample_graph(mnr, RngStream(7, "collapse", r)));
    for (int k = 0; k < 5; ++k)
      if (g.adjacent(pairs[k].first, pairs[k].second)) counts[k]++;
  }
  for (int k = 0; k < 5; ++k) {
    const double p = edge_prob(pairs[k].first, pairs[k].second, snr).value;
    const double se = std::sqrt(p * (1 - p) / reps);
    CHECK(std::abs(double(counts[k]) / reps - p) < 3 * se);
  }
}

TEST_CASE("collapse flattens and is idempotent") {
  std::vector<std::int32_t> loops(5, 0);
  loops[1] = 2;
  const Graph g(4, {{1, 2, 3}, {3, 4, 1}}, loops);
  CHECK_FALSE(g.is_simple());
  CHECK(g.degree(1) == 7);  // 3 parallel endpoints + 2 loops twice

  const Graph c = collapse(g);
  CHECK(c.is_simple());
  CHECK(c.edges().size() == 2);
  CHECK(c.degree(1) == 1);
  CHECK(c.loop_count(1) == 0);

  const Graph cc = collapse(c);
  CHECK(cc.edges().size() == c.edges().size());
}

TEST_CASE("collapse preserves the component partition") {
  const GraphSpec spec = cl_spec(50, 0.1, 0.3, Variant::MNR);
  for (int r = 0; r < 100; ++r) {
    const Graph g = sample_graph(spec, RngStream(13, "partition", r));
    const auto before = components(g);
    const auto after = components(collapse(g));
    REQUIRE(before.components.size() == after.components.size());
    for (std::size_t c = 0; c < before.components.size(); ++c)
      CHECK(before.components[c] == after.components[c]);
  }
}

TEST_CASE("sampling is reproducible and purpose-keyed") {
  const GraphSpec spec = cl_spec(100, 0.1, 0.3, Variant::SNR);
  const Graph a = sample_graph(spec, RngStream(99, "repro", 4));
  const Graph b = sample_graph(spec, RngStream(99, "repro", 4));
  REQUIRE(a.edges().size() == b.edges().size());
  for (std::size_t k = 0; k < a.edges().size(); ++k) {
    CHECK(a.edges()[k].u == b.edges()[k].u);
    CHECK(a.edges()[k].v == b.edges()[k].v);
  }
  const Graph c = sample_graph(spec, RngStream(99, "other-purpose", 4));
  bool differs = c.edges().size() != a.edges().size();
  if (!differs) {
    for (std::size_t k = 0; k < a.edges().size(); ++k)
      differs |= a.edges()[k].u != c.edges()[k].u || a.edges()[k].v != c.edges()[k].v;
  }
  CHECK(differs);
}

TEST_CASE("fast sampling skips only vanishing pairs") {
  GraphSpec spec = cl_spec(5000, 0.1, 0.3);
  const Graph exact = sample_graph(spec, RngStream(3, "fast", 0));
  const Graph fast = sample_graph(spec, RngStream(3, "fast", 0), {true});
  // all CL probabilities here are far above the cutoff, so the graphs agree
  REQUIRE(exact.edges().size() == fast.edges().size());
  for (std::size_t k = 0; k < exact.edges().size(); ++k) {
    CHECK(exact.edges()[k].u == fast.edges()[k].u);
    CHECK(exact.edges()[k].v == fast.edges()[k].v);
  }
}

TEST_CASE("graph file round trip") {
  std::vector<std::int32_t> loops(6, 0);
  loops[2] = 1;
  const Graph g(5, {{1, 2, 1}, {2, 3, 4}, {4, 5, 1}}, loops);
  std::ostringstream os;
  write_graph(os, g, 0.1, 0.4, "mnr");
  std::istringstream is(os.str());
  const GraphFile f = read_graph(is);
  CHECK(f.n == 5);
  CHECK(f.beta == doctest::Approx(0.1));
  CHECK(f.gamma == doctest::Approx(0.4));
  CHECK(f.variant == "mnr");
  REQUIRE(f.graph.edges().size() == 3);
  CHECK(f.graph.edges()[1].mult == 4);
  CHECK(f.graph.loop_count(2) == 1);
  CHECK(f.graph.degree(2) == 7);
}
