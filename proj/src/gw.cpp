#include "voternet/gw.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace voternet {

using nlohmann::json;

MarkLaw::MarkLaw(const GraphSpec& spec, std::int64_t truncation_z)
    : n_(spec.n), truncation_z_(truncation_z) {
  spec.validate();
  if (truncation_z_ < 0 || truncation_z_ > n_)
    throw std::invalid_argument("MarkLaw: truncation level out of range");
  cum_.resize(n_ + 1);
  cum_[0] = 0;
  for (std::int64_t m = 1; m <= n_; ++m)
    cum_[m] = cum_[m - 1] + std::pow(double(m), -spec.gamma);
}

std::int64_t MarkLaw::sample(RngStream& rng) const {
  const double target = rng.u01() * cum_[n_];
  const auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), target);
  auto m = static_cast<std::int64_t>(it - cum_.begin());
  if (m > n_) m = n_;  // guard against u01 rounding at the top end
  return m <= truncation_z_ ? kDagger : m;
}

double MarkLaw::prob(std::int64_t m) const {
  if (m < 1 || m > n_) return 0;
  return (cum_[m] - cum_[m - 1]) / cum_[n_];
}

std::string MarkedTree::ulam_label(std::int64_t i) const {
  if (i == 0) return "()";
  std::vector<std::int32_t> ranks;
  for (std::int64_t v = i; v > 0; v = nodes[v].parent)
    ranks.push_back(nodes[v].child_rank);
  std::string label;
  for (auto it = ranks.rbegin(); it != ranks.rend(); ++it) {
    if (!label.empty()) label += '.';
    label += std::to_string(*it);
  }
  return label;
}

MarkedTree sample_tree(std::int64_t k, const GraphSpec& spec, RngStream rng,
                       const TreeSampleOptions& opts) {
  spec.validate();
  if (k < 1 || k > spec.n) throw std::invalid_argument("sample_tree: root out of range");
  const WeightTable weights(spec);
  const MarkLaw marks(spec, opts.truncation_z);

  MarkedTree tree;
  tree.root_mark = k;
  TreeNode root;
  root.mark = k;
  root.offspring = static_cast<std::int64_t>(rng.poisson(weights.weight(k)));
  tree.nodes.push_back(root);

  // breadth-first generation: children of nodes[i] are appended in order
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(tree.nodes.size()); ++i) {
    const std::int64_t kids = tree.nodes[i].offspring;
    for (std::int64_t c = 1; c <= kids; ++c) {
      if (static_cast<std::int64_t>(tree.nodes.size()) >= opts.node_guard)
        throw std::overflow_error(
            "sample_tree: node guard exceeded; parameters too close to "
            "criticality");
      TreeNode node;
      node.parent = i;
      node.child_rank = static_cast<std::int32_t>(c);
      node.mark = marks.sample(rng);
      node.offspring =
          node.mark == kDagger
              ? 0
              : static_cast<std::int64_t>(rng.poisson(weights.weight(node.mark)));
      tree.nodes.push_back(node);
    }
  }
  return tree;
}

ThinResult thin_forest(std::span<MarkedTree> trees, std::int64_t n) {
  // registry: mark -> global order of the unthinned node carrying it
  std::vector<std::int64_t> holder(n + 1, -1);
  std::int64_t order = 0;

  for (auto& tree : trees) {
    for (auto& node : tree.nodes) {
      bool thinned = false;
      if (node.mark == kDagger) {
        thinned = true;
      } else if (node.parent >= 0 && tree.nodes[node.parent].thinned) {
        thinned = true;
      } else if (holder[node.mark] >= 0) {
        thinned = true;
      }
      node.thinned = thinned;
      if (!thinned) holder[node.mark] = order;
      ++order;
    }
  }

  // second pass: edges from offspring-mark counts of the earlier node
  std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> mult;
  std::vector<std::int32_t> loops(n + 1, 0);
  std::vector<std::int64_t> marks_seen;
  order = 0;
  for (auto& tree : trees) {
    const auto tree_base = order;
    std::int64_t child = 1;  // children appear consecutively, parents nondecreasing
    for (std::int64_t i = 0; i < tree.size(); ++i, ++order) {
      const auto& node = tree.nodes[i];
      std::map<std::int64_t, std::int32_t> kid_marks;
      while (child < tree.size() && tree.nodes[child].parent == i) {
        if (!node.thinned && tree.nodes[child].mark != kDagger)
          kid_marks[tree.nodes[child].mark]++;
        ++child;
      }
      if (node.thinned) continue;
      marks_seen.push_back(node.mark);
      for (const auto& [mark, count] : kid_marks) {
        if (mark == node.mark) {
          loops[mark] += count;
          continue;
        }
        const std::int64_t other = holder[mark];
        if (other < 0) continue;  // unreachable for unthinned parents
        if (other > tree_base + i) {
          const auto a = static_cast<std::int32_t>(std::min(node.mark, mark));
          const auto b = static_cast<std::int32_t>(std::max(node.mark, mark));
          mult[{a, b}] += count;
        }
      }
    }
  }

  std::vector<Edge> edges;
  edges.reserve(mult.size());
  for (const auto& [key, m] : mult) edges.push_back({key.first, key.second, m});
  std::sort(marks_seen.begin(), marks_seen.end());
  ThinResult out{Graph(n, std::move(edges), std::move(loops)),
                 std::move(marks_seen)};
  return out;
}

void write_tree(std::ostream& os, const MarkedTree& t) {
  for (std::int64_t i = 0; i < t.size(); ++i) {
    const auto& node = t.nodes[i];
    os << t.ulam_label(i) << ' ' << node.mark << ' ' << node.offspring << ' '
       << (node.thinned ? 1 : 0) << '\n';
  }
}

double sample_limit_weight(const LimitWeight& lw, RngStream& rng) {
  if (!(lw.beta > 0) || !(lw.gamma > 0) || lw.gamma >= 0.5)
    throw std::invalid_argument("sample_limit_weight: need beta > 0, gamma in (0,1/2)");
  const double floor_x = lw.beta / (1 - lw.gamma);
  const double u = 1.0 - rng.u01();  // in (0,1]
  return floor_x * std::pow(u, -lw.gamma / (1 - lw.gamma));
}

namespace {

struct SlopeFit {
  double slope;
  double intercept;
};

SlopeFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / denom, (sy * sxx - sx * sxy) / denom};
}

// log-log CCDF slope over geometrically spaced thresholds, keeping only
// thresholds with enough tail mass for a stable point; shorter tails fall
// back to a smaller starting threshold
double ccdf_slope(const std::vector<std::int64_t>& sorted_sizes,
                  std::vector<std::int64_t>* thresholds_out,
                  std::vector<double>* ccdf_out) {
  const auto n = static_cast<std::int64_t>(sorted_sizes.size());
  for (const double start : {8.0, 3.0}) {
    std::vector<double> lx, ly;
    std::vector<std::int64_t> ks;
    std::vector<double> cs;
    std::int64_t prev = 0;
    for (double t = start; t <= double(sorted_sizes.back()); t *= 1.5) {
      const auto k = static_cast<std::int64_t>(std::llround(t));
      if (k == prev) continue;
      prev = k;
      const auto tail = n - (std::lower_bound(sorted_sizes.begin(),
                                              sorted_sizes.end(), k) -
                             sorted_sizes.begin());
      if (tail < 30) break;
      lx.push_back(std::log(double(k)));
      ly.push_back(std::log(double(tail) / double(n)));
      ks.push_back(k);
      cs.push_back(double(tail) / double(n));
    }
    if (lx.size() < 3) continue;
    if (thresholds_out) *thresholds_out = std::move(ks);
    if (ccdf_out) *ccdf_out = std::move(cs);
    return least_squares(lx, ly).slope;
  }
  throw std::runtime_error("gw_tail_statistics: tail too thin to fit");
}

}  // namespace

TailReport gw_tail_statistics(const GraphSpec& spec, double alpha,
                              std::int64_t samples, RngStream rng) {
  spec.validate();
  const double alpha_max = (1 - 2 * spec.gamma) / spec.beta;
  if (!(alpha > 1) || !(alpha < alpha_max))
    throw std::invalid_argument(
        "gw_tail_statistics: alpha must lie in (1, (1-2*gamma)/beta)");
  if (samples < 100)
    throw std::invalid_argument("gw_tail_statistics: need at least 100 samples");

  const LimitWeight lw{spec.beta, spec.gamma};
  constexpr std::int64_t kGuard = 50'000'000;

  std::vector<std::int64_t> sizes(samples);
  double mean = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    RngStream tree_rng = rng.substream(static_cast<std::uint64_t>(s));
    std::int64_t pending = 1, size = 0;
    while (pending > 0) {
      ++size;
      if (size > kGuard)
        throw std::overflow_error("gw_tail_statistics: tree guard exceeded");
      const double mu = alpha * sample_limit_weight(lw, tree_rng);
      pending += static_cast<std::int64_t>(tree_rng.poisson(mu)) - 1;
    }
    sizes[s] = size;
    mean += double(size);
  }
  mean /= double(samples);

  std::vector<std::int64_t> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());

  TailReport report;
  report.samples = samples;
  report.mean_size = mean;
  report.slope = ccdf_slope(sorted, &report.thresholds, &report.ccdf);

  // bootstrap percentile interval over resampled size lists
  constexpr int kBoot = 100;
  RngStream boot = rng.substream("bootstrap");
  std::vector<double> slopes;
  slopes.reserve(kBoot);
  std::vector<std::int64_t> resampled(samples);
  for (int b = 0; b < kBoot; ++b) {
    for (std::int64_t s = 0; s < samples; ++s)
      resampled[s] = sizes[boot.below(static_cast<std::uint64_t>(samples))];
    std::sort(resampled.begin(), resampled.end());
    try {
      slopes.push_back(ccdf_slope(resampled, nullptr, nullptr));
    } catch (const std::runtime_error&) {
      // thin resample; skip
    }
  }
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    const auto lo = static_cast<std::size_t>(0.025 * double(slopes.size() - 1));
    const auto hi = static_cast<std::size_t>(
        std::ceil(0.975 * double(slopes.size() - 1)));
    report.ci_low = slopes[lo];
    report.ci_high = slopes[hi];
  } else {
    report.ci_low = report.ci_high = report.slope;
  }
  return report;
}

std::string tail_report_json(const TailReport& r) {
  json j;
  j["slope"] = r.slope;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["mean_size"] = r.mean_size;
  j["samples"] = r.samples;
  j["thresholds"] = r.thresholds;
  j["ccdf"] = r.ccdf;
  return j.dump(2);
}

}  // namespace voternet
