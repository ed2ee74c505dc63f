#include "voternet/chains.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "voternet/rng.hpp"

namespace voternet {

using nlohmann::json;

std::string dynamics_name(Dynamics d) {
  return d == Dynamics::classical ? "classical" : "discursive";
}

std::optional<Dynamics> parse_dynamics(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "classical") return Dynamics::classical;
  if (s == "discursive") return Dynamics::discursive;
  return std::nullopt;
}

namespace {

[[noreturn]] void cap_error(const char* what, std::int64_t size, std::int64_t cap) {
  throw CapExceeded(std::string(what) + ": component size " +
                    std::to_string(size) + " exceeds exact cap " +
                    std::to_string(cap));
}

}  // namespace

Eigen::VectorXd solve_gated(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd x = lu.solve(b);
  const double resid = (A * x - b).lpNorm<Eigen::Infinity>();
  const double scale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
  if (!x.allFinite() || resid >= 1e-9 * scale) {
    throw std::runtime_error(std::string(what) +
                             ": linear solve failed residual gate (residual " +
                             std::to_string(resid) + ")");
  }
  return x;
}

RateMatrix build_generator(const Graph& g, const std::vector<std::int32_t>& comp,
                           Dynamics dynamics, double theta) {
  if (!g.is_simple())
    throw std::invalid_argument("build_generator: graph must be simple");
  if (comp.empty()) throw std::invalid_argument("build_generator: empty component");

  RateMatrix rm;
  rm.states = comp;
  std::sort(rm.states.begin(), rm.states.end());
  rm.dynamics = dynamics;
  rm.theta = theta;
  const auto n = static_cast<std::int64_t>(rm.states.size());
  rm.degree.resize(n);
  std::vector<std::int32_t> local(g.n() + 1, -1);
  for (std::int64_t a = 0; a < n; ++a) {
    local[rm.states[a]] = static_cast<std::int32_t>(a);
    rm.degree[a] = g.degree(rm.states[a]);
    if (rm.degree[a] == 0 && n > 1)
      throw std::invalid_argument("build_generator: isolated vertex in component");
  }

  rm.Q = Eigen::MatrixXd::Zero(n, n);
  for (std::int64_t a = 0; a < n; ++a) {
    const double da = std::pow(double(rm.degree[a]), theta - 1);
    for (std::int32_t y : g.neighbors(rm.states[a])) {
      const std::int32_t b = local[y];
      if (b < 0)
        throw std::invalid_argument("build_generator: neighbour outside component");
      const double rate =
          dynamics == Dynamics::classical
              ? da
              : 0.5 * (da + std::pow(double(g.degree(y)), theta - 1));
      rm.Q(a, b) = rate;
    }
  }
  rm.exit = rm.Q.rowwise().sum();
  for (std::int64_t a = 0; a < n; ++a) rm.Q(a, a) = -rm.exit(a);
  return rm;
}

StationaryDist stationary(const RateMatrix& rm) {
  const auto n = rm.size();
  StationaryDist sd;
  sd.pi.resize(n);
  if (rm.dynamics == Dynamics::classical) {
    for (std::int64_t a = 0; a < n; ++a)
      sd.pi(a) = std::pow(double(rm.degree[a]), 1 - rm.theta);
  } else {
    sd.pi.setOnes();
  }
  sd.pi /= sd.pi.sum();

  const double resid = (sd.pi.transpose() * rm.Q).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, rm.Q.lpNorm<Eigen::Infinity>());
  if (resid > 1e-12 * scale)
    throw std::runtime_error("stationary: pi Q = 0 residual exceeds 1e-12");
  return sd;
}

double detailed_balance_residual(const RateMatrix& rm, const StationaryDist& sd) {
  double worst = 0;
  for (std::int64_t a = 0; a < rm.size(); ++a)
    for (std::int64_t b = 0; b < rm.size(); ++b)
      if (a != b)
        worst = std::max(worst, std::abs(sd.pi(a) * rm.Q(a, b) -
                                         sd.pi(b) * rm.Q(b, a)));
  return worst;
}

HittingTimes hitting_times(const RateMatrix& rm, const ExactCaps& caps) {
  const auto n = rm.size();
  if (n > caps.hitting) cap_error("hitting_times", n, caps.hitting);

  HittingTimes out;
  out.expected = Eigen::MatrixXd::Zero(n, n);
  out.worst_to = Eigen::VectorXd::Zero(n);
  if (n == 1) return out;

  for (std::int64_t target = 0; target < n; ++target) {
    Eigen::MatrixXd A(n - 1, n - 1);
    for (std::int64_t r = 0, ri = 0; r < n; ++r) {
      if (r == target) continue;
      for (std::int64_t c = 0, ci = 0; c < n; ++c) {
        if (c == target) continue;
        A(ri, ci) = rm.Q(r, c);
        ++ci;
      }
      ++ri;
    }
    const Eigen::VectorXd h =
        solve_gated(A, Eigen::VectorXd::Constant(n - 1, -1.0), "hitting_times");
    for (std::int64_t r = 0, ri = 0; r < n; ++r) {
      if (r == target) continue;
      out.expected(r, target) = h(ri++);
    }
  }
  out.worst = out.expected.maxCoeff();
  for (std::int64_t s = 0; s < n; ++s)
    out.worst_to(s) = out.expected.col(s).maxCoeff();
  return out;
}

namespace {

// unordered pair index over 0 <= a < b < n
inline std::int64_t pair_index(std::int64_t a, std::int64_t b, std::int64_t n) {
  return a * (2 * n - a - 1) / 2 + (b - a - 1);
}

}  // namespace

MeetingTimes meeting_times(const RateMatrix& rm, const StationaryDist& sd,
                           const ExactCaps& caps) {
  const auto n = rm.size();
  if (n > caps.product) cap_error("meeting_times", n, caps.product);

  MeetingTimes out;
  out.expected = Eigen::MatrixXd::Zero(n, n);
  if (n == 1) return out;

  const std::int64_t pairs = n * (n - 1) / 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(pairs, pairs);
  for (std::int64_t x = 0; x < n; ++x) {
    for (std::int64_t y = x + 1; y < n; ++y) {
      const std::int64_t p = pair_index(x, y, n);
      A(p, p) -= rm.exit(x) + rm.exit(y);
      for (std::int64_t z = 0; z < n; ++z) {
        if (rm.Q(x, z) > 0 && z != x && z != y)
          A(p, pair_index(std::min(z, y), std::max(z, y), n)) += rm.Q(x, z);
        if (rm.Q(y, z) > 0 && z != y && z != x)
          A(p, pair_index(std::min(x, z), std::max(x, z), n)) += rm.Q(y, z);
      }
    }
  }
  const Eigen::VectorXd m =
      solve_gated(A, Eigen::VectorXd::Constant(pairs, -1.0), "meeting_times");

  double tpi = 0;
  for (std::int64_t x = 0; x < n; ++x) {
    for (std::int64_t y = x + 1; y < n; ++y) {
      const double v = m(pair_index(x, y, n));
      out.expected(x, y) = v;
      out.expected(y, x) = v;
      tpi += 2 * sd.pi(x) * sd.pi(y) * v;
    }
  }
  out.worst = m.maxCoeff();
  out.stationary = tpi;
  return out;
}

ObservedMeeting observed_meeting(const RateMatrix& rm, const StationaryDist& sd,
                                 const std::vector<std::int32_t>& subset_local,
                                 const ExactCaps& caps) {
  const auto n = rm.size();
  if (n > caps.product) cap_error("observed_meeting", n, caps.product);
  if (subset_local.empty())
    throw std::invalid_argument("observed_meeting: subset must be nonempty");

  std::vector<char> in_a(n, 0);
  std::vector<std::int32_t> subset = subset_local;
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  for (auto s : subset) {
    if (s < 0 || s >= n)
      throw std::invalid_argument("observed_meeting: subset index out of range");
    in_a[s] = 1;
  }

  // pair states over x <= y; the diagonal inside A is absorbing
  const std::int64_t all_pairs = n * (n + 1) / 2;
  auto full_index = [n](std::int64_t x, std::int64_t y) {
    return x * (2 * n - x + 1) / 2 + (y - x);  // x <= y
  };
  std::vector<std::int64_t> row_of(all_pairs, -1);
  std::vector<std::pair<std::int64_t, std::int64_t>> states;
  for (std::int64_t x = 0; x < n; ++x) {
    for (std::int64_t y = x; y < n; ++y) {
      if (x == y && in_a[x]) continue;  // absorbing
      row_of[full_index(x, y)] = static_cast<std::int64_t>(states.size());
      states.emplace_back(x, y);
    }
  }

  const auto t = static_cast<std::int64_t>(states.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(t, t);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(t);
  for (std::int64_t r = 0; r < t; ++r) {
    const auto [x, y] = states[r];
    rhs(r) = (in_a[x] && in_a[y]) ? -1.0 : 0.0;
    auto add_move = [&](std::int64_t from, std::int64_t other, double scale) {
      for (std::int64_t z = 0; z < n; ++z) {
        const double rate = rm.Q(from, z) * scale;
        if (rate <= 0 || z == from) continue;
        A(r, r) -= rate;
        const std::int64_t a = std::min(z, other), b = std::max(z, other);
        const std::int64_t rr = row_of[full_index(a, b)];
        if (rr >= 0) A(r, rr) += rate;  // else absorbed
      }
    };
    if (x == y) {
      add_move(x, x, 2.0);  // either of the two coincident walkers moves
    } else {
      add_move(x, y, 1.0);
      add_move(y, x, 1.0);
    }
  }

  Eigen::VectorXd m;
  try {
    m = solve_gated(A, rhs, "observed_meeting");
  } catch (const std::runtime_error&) {
    throw std::runtime_error(
        "observed_meeting: censored pair chain is not solvable "
        "(A x A disconnected under censoring)");
  }

  ObservedMeeting out;
  out.subset = std::move(subset);
  const auto k = static_cast<std::int64_t>(out.subset.size());
  out.expected = Eigen::MatrixXd::Zero(k, k);
  double pi_a = 0;
  for (auto s : out.subset) pi_a += sd.pi(s);
  double tpi = 0;
  for (std::int64_t i = 0; i < k; ++i) {
    for (std::int64_t j = i + 1; j < k; ++j) {
      const std::int64_t x = out.subset[i], y = out.subset[j];
      const double v = m(row_of[full_index(x, y)]);
      out.expected(i, j) = v;
      out.expected(j, i) = v;
      tpi += 2 * (sd.pi(x) / pi_a) * (sd.pi(y) / pi_a) * v;
    }
  }
  out.stationary = tpi;
  return out;
}

double coalescence_time(const RateMatrix& rm, const ExactCaps& caps) {
  const auto n = rm.size();
  if (n > caps.coalescence) cap_error("coalescence_time", n, caps.coalescence);
  if (n > 20) cap_error("coalescence_time (occupied-set space)", n, 20);
  if (n == 1) return 0;

  const std::uint32_t full = (1u << n) - 1;
  std::vector<std::int64_t> row_of(full + 1, -1);
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) >= 2) {
      row_of[mask] = static_cast<std::int64_t>(masks.size());
      masks.push_back(mask);
    }
  }
  const auto t = static_cast<std::int64_t>(masks.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(t, t);
  for (std::int64_t r = 0; r < t; ++r) {
    const std::uint32_t mask = masks[r];
    for (std::int64_t v = 0; v < n; ++v) {
      if (!(mask & (1u << v))) continue;
      for (std::int64_t u = 0; u < n; ++u) {
        const double rate = rm.Q(v, u);
        if (rate <= 0 || u == v) continue;
        const std::uint32_t next = (mask & ~(1u << v)) | (1u << u);
        A(r, r) -= rate;
        const std::int64_t rr = row_of[next];
        if (rr >= 0) A(r, rr) += rate;  // singletons are absorbing
      }
    }
  }
  const Eigen::VectorXd m =
      solve_gated(A, Eigen::VectorXd::Constant(t, -1.0), "coalescence_time");
  return m(row_of[full]);
}

namespace {

// canonical restricted-growth relabelling (blocks numbered by first occurrence)
std::vector<std::uint8_t> canonical_partition(std::vector<std::uint8_t> a) {
  std::vector<int> remap(a.size(), -1);
  std::uint8_t next = 0;
  for (auto& x : a) {
    if (remap[x] < 0) remap[x] = next++;
    x = static_cast<std::uint8_t>(remap[x]);
  }
  return a;
}

void enumerate_partitions(std::int64_t n,
                          std::vector<std::vector<std::uint8_t>>& out) {
  std::vector<std::uint8_t> a(n, 0);
  auto max_prefix = [&](std::int64_t upto) {
    std::uint8_t m = 0;
    for (std::int64_t i = 0; i < upto; ++i) m = std::max(m, a[i]);
    return m;
  };
  out.push_back(a);
  if (n <= 1) return;
  for (;;) {
    // advance like an odometer respecting a[i] <= max(a[0..i-1]) + 1
    std::int64_t i = n - 1;
    while (i >= 1 && a[i] == max_prefix(i) + 1) {
      a[i] = 0;
      --i;
    }
    if (i < 1) break;
    ++a[i];
    out.push_back(a);
  }
}

double consensus_unique(const RateMatrix& rm, const ExactCaps& caps) {
  const auto n = rm.size();
  if (n > caps.coalescence) cap_error("consensus_time(unique)", n, caps.coalescence);
  if (n > 12) cap_error("consensus_time(unique) (partition space)", n, 12);
  if (n == 1) return 0;

  std::vector<std::vector<std::uint8_t>> parts;
  enumerate_partitions(n, parts);
  std::map<std::vector<std::uint8_t>, std::int64_t> row_of;
  std::vector<std::int64_t> transient_rows;
  std::int64_t trows = 0;
  for (const auto& p : parts) {
    const bool single_block =
        std::all_of(p.begin(), p.end(), [](std::uint8_t x) { return x == 0; });
    if (single_block) {
      row_of[p] = -1;
    } else {
      row_of[p] = trows++;
    }
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(trows, trows);
  for (const auto& p : parts) {
    const std::int64_t r = row_of[p];
    if (r < 0) continue;
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) {
        const double rate = rm.Q(i, j);
        if (rate <= 0 || i == j) continue;
        if (p[i] == p[j]) continue;  // copying an equal opinion is a no-op
        auto next = p;
        next[i] = next[j];
        next = canonical_partition(std::move(next));
        A(r, r) -= rate;
        const std::int64_t rr = row_of.at(next);
        if (rr >= 0) A(r, rr) += rate;
      }
    }
  }
  const Eigen::VectorXd m = solve_gated(
      A, Eigen::VectorXd::Constant(trows, -1.0), "consensus_time(unique)");

  std::vector<std::uint8_t> distinct(n);
  for (std::int64_t i = 0; i < n; ++i) distinct[i] = static_cast<std::uint8_t>(i);
  return m(row_of.at(distinct));
}

double consensus_bernoulli(const RateMatrix& rm, double u, const ExactCaps& caps) {
  if (!(u > 0) || !(u < 1))
    throw std::invalid_argument("consensus_time: u must lie in (0,1)");
  const auto n = rm.size();
  if (n > caps.voter_states) cap_error("consensus_time(bernoulli)", n, caps.voter_states);
  if (n > 20) cap_error("consensus_time(bernoulli) (opinion space)", n, 20);
  if (n == 1) return 0;

  const std::uint32_t full = (1u << n) - 1;
  // transient opinion configurations: everything except 0 and full
  std::vector<std::int64_t> row_of(full + 1, -1);
  std::int64_t trows = 0;
  for (std::uint32_t s = 1; s < full; ++s) row_of[s] = trows++;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(trows, trows);
  for (std::uint32_t s = 1; s < full; ++s) {
    const std::int64_t r = row_of[s];
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) {
        const double rate = rm.Q(i, j);
        if (rate <= 0 || i == j) continue;
        const bool bi = (s >> i) & 1u, bj = (s >> j) & 1u;
        if (bi == bj) continue;
        const std::uint32_t next = bj ? (s | (1u << i)) : (s & ~(1u << i));
        A(r, r) -= rate;
        if (next != 0 && next != full) A(r, row_of[next]) += rate;
      }
    }
  }
  const Eigen::VectorXd m = solve_gated(
      A, Eigen::VectorXd::Constant(trows, -1.0), "consensus_time(bernoulli)");

  double total = 0;
  for (std::uint32_t s = 1; s < full; ++s) {
    const int ones = std::popcount(s);
    total += std::pow(u, ones) * std::pow(1 - u, double(n - ones)) * m(row_of[s]);
  }
  return total;
}

}  // namespace

double consensus_time(const RateMatrix& rm, const ConsensusInit& init,
                      const ExactCaps& caps) {
  return init.kind == ConsensusInit::Kind::unique
             ? consensus_unique(rm, caps)
             : consensus_bernoulli(rm, init.u, caps);
}

namespace {

// spectral propagator of a reversible generator: exp(tQ) through the
// pi-symmetrised eigenproblem
struct Propagator {
  Eigen::VectorXd sqrt_pi;
  Eigen::MatrixXd V;
  Eigen::VectorXd lambda;  // eigenvalues of Q, ascending (<= 0)

  Propagator(const RateMatrix& rm, const StationaryDist& sd) {
    const auto n = rm.size();
    sqrt_pi = sd.pi.cwiseSqrt();
    Eigen::MatrixXd S(n, n);
    for (std::int64_t a = 0; a < n; ++a)
      for (std::int64_t b = 0; b < n; ++b)
        S(a, b) = sqrt_pi(a) * rm.Q(a, b) / sqrt_pi(b);
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("spectral: eigen decomposition failed");
    V = es.eigenvectors();
    lambda = es.eigenvalues();
  }

  Eigen::MatrixXd at(double t) const {
    const Eigen::VectorXd e = (lambda.array() * t).exp().matrix();
    Eigen::MatrixXd P = V * e.asDiagonal() * V.transpose();
    for (std::int64_t a = 0; a < V.rows(); ++a)
      for (std::int64_t b = 0; b < V.rows(); ++b)
        P(a, b) *= sqrt_pi(b) / sqrt_pi(a);
    return P;
  }

  double tv(const StationaryDist& sd, double t) const {
    const Eigen::MatrixXd P = at(t);
    double worst = 0;
    for (std::int64_t a = 0; a < P.rows(); ++a) {
      double acc = 0;
      for (std::int64_t b = 0; b < P.cols(); ++b)
        acc += std::abs(P(a, b) - sd.pi(b));
      worst = std::max(worst, 0.5 * acc);
    }
    return worst;
  }

  double tv_from(const StationaryDist& sd, std::int64_t x, double t) const {
    const Eigen::VectorXd e = (lambda.array() * t).exp().matrix();
    double acc = 0;
    for (std::int64_t b = 0; b < V.rows(); ++b) {
      double p = 0;
      for (std::int64_t k = 0; k < V.cols(); ++k)
        p += V(x, k) * e(k) * V(b, k);
      p *= sqrt_pi(b) / sqrt_pi(x);
      acc += std::abs(p - sd.pi(b));
    }
    return 0.5 * acc;
  }
};

double crossing_time(const std::function<double(double)>& f, double scale) {
  // first t with f(t) <= 1/4, located by doubling then bisection
  if (f(0.0) <= 0.25) return 0;
  double hi = std::max(scale, 1e-12);
  while (f(hi) > 0.25) hi *= 2;
  double probe = hi / 2;
  while (probe > 1e-300 && f(probe) <= 0.25) {
    hi = probe;
    probe /= 2;
  }
  double lo = probe;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= 0.25) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace

SpectralInfo spectral(const RateMatrix& rm, const StationaryDist& sd,
                      const ExactCaps& caps) {
  const auto n = rm.size();
  if (n > caps.hitting) cap_error("spectral", n, caps.hitting);

  SpectralInfo out;
  if (n == 1) {
    out.eigenvalues = Eigen::VectorXd::Zero(1);
    return out;
  }
  const Propagator prop(rm, sd);
  out.eigenvalues = (-prop.lambda.reverse()).eval();  // of -Q, ascending
  const double gap = out.eigenvalues(1);
  if (!(gap > 0)) throw std::runtime_error("spectral: nonpositive spectral gap");
  out.t_rel = 1.0 / gap;
  out.t_mix = crossing_time(
      [&](double t) { return prop.tv(sd, t); }, out.t_rel);

  const double pivot = std::max({out.t_mix, out.t_rel, 1e-9});
  const double lo = pivot / 100, hi = pivot * 10;
  constexpr int kGrid = 48;
  for (int i = 0; i < kGrid; ++i) {
    const double t = lo * std::pow(hi / lo, double(i) / (kGrid - 1));
    out.grid_times.push_back(t);
    out.grid_tv.push_back(prop.tv(sd, t));
  }
  return out;
}

double tv_distance(const RateMatrix& rm, const StationaryDist& sd, double t) {
  return Propagator(rm, sd).tv(sd, t);
}

double tv_distance_from(const RateMatrix& rm, const StationaryDist& sd,
                        std::int64_t x, double t) {
  return Propagator(rm, sd).tv_from(sd, x, t);
}

double mixing_time_from(const RateMatrix& rm, const StationaryDist& sd,
                        std::int64_t x) {
  const Propagator prop(rm, sd);
  const double gap = -prop.lambda(prop.lambda.size() - 2);
  return crossing_time(
      [&](double t) { return prop.tv_from(sd, x, t); },
      gap > 0 ? 1.0 / gap : 1.0);
}

double conductance(const RateMatrix& rm, const StationaryDist& sd,
                   std::int64_t i, std::int64_t j) {
  return sd.pi(i) * rm.Q(i, j);
}

BottleneckCut bottleneck(const RateMatrix& rm, const StationaryDist& sd,
                         std::int64_t exhaustive_limit,
                         std::int64_t sample_count) {
  const auto n = rm.size();
  BottleneckCut best;
  if (n < 2) return best;

  auto evaluate = [&](std::uint64_t mask) {
    double pa = 0, flow = 0;
    for (std::int64_t a = 0; a < n; ++a) {
      if (!((mask >> a) & 1)) continue;
      pa += sd.pi(a);
      for (std::int64_t b = 0; b < n; ++b)
        if (!((mask >> b) & 1) && rm.Q(a, b) > 0)
          flow += sd.pi(a) * rm.Q(a, b);
    }
    if (flow <= 0) return;  // disconnected cut cannot occur on a component
    const double ratio = pa * (1 - pa) / flow;
    if (ratio > best.ratio) {
      best.ratio = ratio;
      best.cut.clear();
      for (std::int64_t a = 0; a < n; ++a)
        if ((mask >> a) & 1) best.cut.push_back(static_cast<std::int32_t>(a));
    }
  };

  if (n <= exhaustive_limit) {
    // fix state 0 inside A to halve the enumeration
    const std::uint64_t half = 1ull << (n - 1);
    for (std::uint64_t m = 0; m < half; ++m) {
      const std::uint64_t mask = (m << 1) | 1ull;
      if (mask == (1ull << n) - 1) continue;
      evaluate(mask);
    }
    best.exhaustive = true;
  } else {
    best.exhaustive = false;
    RngStream rng(0x626F746Eull, "bottleneck-sample", static_cast<std::uint64_t>(n));
    for (std::int64_t s = 0; s < sample_count; ++s) {
      std::uint64_t mask = 0;
      for (std::int64_t a = 0; a < n; ++a)
        if (rng.bernoulli(0.5)) mask |= 1ull << a;
      if (mask == 0 || mask == (1ull << n) - 1) continue;
      evaluate(mask);
    }
  }
  return best;
}

namespace {

// cheapest path by summed edge resistance 1/c(e); used to audit the
// commute-time bound with its tightest path
double min_resistance_path(const RateMatrix& rm, const StationaryDist& sd,
                           std::int64_t from, std::int64_t to) {
  const auto n = rm.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::priority_queue<std::pair<double, std::int64_t>,
                      std::vector<std::pair<double, std::int64_t>>,
                      std::greater<>> heap;
  dist[from] = 0;
  heap.push({0, from});
  while (!heap.empty()) {
    const auto [d, x] = heap.top();
    heap.pop();
    if (d > dist[x]) continue;
    if (x == to) break;
    for (std::int64_t y = 0; y < n; ++y) {
      if (rm.Q(x, y) <= 0 || y == x) continue;
      const double w = 1.0 / (sd.pi(x) * rm.Q(x, y));
      if (dist[x] + w < dist[y]) {
        dist[y] = dist[x] + w;
        heap.push({dist[y], y});
      }
    }
  }
  return dist[to];
}

BoundCheck make_check(std::string name, double lhs, double rhs,
                      std::string detail = {}) {
  BoundCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = rhs - lhs;
  c.pass = lhs <= rhs * (1 + 1e-9) + 1e-12;
  c.equality = std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(lhs), std::abs(rhs));
  c.detail = std::move(detail);
  return c;
}

}  // namespace

AuditReport bound_audit(const RateMatrix& rm, const StationaryDist& sd,
                        const std::vector<std::vector<std::int32_t>>& extra_subsets,
                        const ExactCaps& caps) {
  const auto n = rm.size();
  AuditReport report;
  if (n < 2) {
    report.all_pass = true;
    return report;
  }

  const HittingTimes hit = hitting_times(rm, caps);
  const MeetingTimes meet = meeting_times(rm, sd, caps);
  const SpectralInfo spec = spectral(rm, sd, caps);
  Eigen::VectorXd hit_from_pi(n);
  for (std::int64_t s = 0; s < n; ++s)
    hit_from_pi(s) = sd.pi.dot(hit.expected.col(s));

  // coalescence only when the occupied-set space fits the cap
  std::optional<double> coal;
  if (n <= caps.coalescence) coal = coalescence_time(rm, caps);

  if (coal) {
    report.checks.push_back(make_check("meet_le_coal", meet.worst, *coal));
    report.checks.push_back(make_check(
        "coal_le_elogn_meet", *coal,
        std::exp(1.0) * (std::log(double(n)) + 2.0) * meet.worst));
  }
  report.checks.push_back(make_check("meet_le_hit", meet.worst, hit.worst));

  {
    double worst_lhs = 0, worst_rhs = 0, min_slack = std::numeric_limits<double>::infinity();
    std::string detail;
    for (std::int64_t x = 0; x < n; ++x) {
      for (std::int64_t y = x + 1; y < n; ++y) {
        const double commute = hit.expected(x, y) + hit.expected(y, x);
        const double bound = min_resistance_path(rm, sd, x, y);
        const double slack = bound - commute;
        // ties (every pair of a tree) resolve to the largest commute
        const bool tighter = slack < min_slack - 1e-12 ||
                             (slack <= min_slack + 1e-12 && commute > worst_lhs);
        if (tighter) {
          min_slack = slack;
          worst_lhs = commute;
          worst_rhs = bound;
          detail = "pair (" + std::to_string(rm.states[x]) + "," +
                   std::to_string(rm.states[y]) + ")";
        }
      }
    }
    report.checks.push_back(
        make_check("commute_le_path_resistance", worst_lhs, worst_rhs, detail));
  }

  {
    double pi2 = 0, qpi2 = 0;
    for (std::int64_t a = 0; a < n; ++a) {
      pi2 += sd.pi(a) * sd.pi(a);
      qpi2 += rm.exit(a) * sd.pi(a) * sd.pi(a);
    }
    const double lower = (1 - pi2) * (1 - pi2) / (4 * qpi2);
    report.checks.push_back(make_check("pi_meet_lower", lower, meet.stationary));
  }

  const BottleneckCut cut = bottleneck(rm, sd);
  report.bottleneck_exhaustive = cut.exhaustive;
  report.checks.push_back(make_check("bottleneck_le_trel", cut.ratio, spec.t_rel,
                                     cut.exhaustive ? "exhaustive cuts"
                                                    : "sampled cuts"));

  {
    double worst_lhs = 0, worst_rhs = 0, min_slack = std::numeric_limits<double>::infinity();
    std::string detail;
    for (std::int64_t i = 0; i < n; ++i) {
      const double lhs = mixing_time_from(rm, sd, i);
      const double rhs = 2 * hit_from_pi(i);
      if (rhs - lhs < min_slack) {
        min_slack = rhs - lhs;
        worst_lhs = lhs;
        worst_rhs = rhs;
        detail = "state " + std::to_string(rm.states[i]);
      }
    }
    report.checks.push_back(
        make_check("tmix_i_le_2pi_hit", worst_lhs, worst_rhs, detail));
  }

  {
    std::int64_t s_best = 0;
    for (std::int64_t s = 1; s < n; ++s)
      if (hit.worst_to(s) < hit.worst_to(s_best)) s_best = s;
    report.checks.push_back(make_check(
        "tmix_le_16_hit", spec.t_mix, 16 * hit.worst_to(s_best),
        "s = " + std::to_string(rm.states[s_best])));

    double best_ratio = std::numeric_limits<double>::infinity();
    std::int64_t arg = 0;
    for (std::int64_t s = 0; s < n; ++s) {
      const double r = hit.worst_to(s) / sd.pi(s);
      if (r < best_ratio) {
        best_ratio = r;
        arg = s;
      }
    }
    report.checks.push_back(make_check("meet_le_189_hit_over_pi", meet.worst,
                                       189 * best_ratio,
                                       "s = " + std::to_string(rm.states[arg])));

    // partial-meeting bound for the full set and any supplied subsets
    std::vector<std::vector<std::int32_t>> subsets;
    std::vector<std::int32_t> full_set(n);
    for (std::int64_t a = 0; a < n; ++a) full_set[a] = static_cast<std::int32_t>(a);
    subsets.push_back(full_set);
    for (const auto& s : extra_subsets) subsets.push_back(s);
    for (const auto& subset : subsets) {
      const ObservedMeeting obs = observed_meeting(rm, sd, subset, caps);
      double pi_a = 0;
      for (auto v : obs.subset) pi_a += sd.pi(v);
      const double h = hit.worst_to(s_best);
      const double rhs = 188 * h + 2 * obs.stationary / (pi_a * pi_a) +
                         1568 * h / std::pow(pi_a, 4);
      report.checks.push_back(make_check(
          "partial_meeting", meet.worst, rhs,
          "|A| = " + std::to_string(obs.subset.size())));
    }
  }

  report.checks.push_back(make_check("trel_le_cmix_mix",
                                     spec.t_rel / (1 + 1 / std::log(2.0)),
                                     spec.t_mix));

  report.conductance_ratio = cut.ratio > 0 ? meet.worst / cut.ratio : 0;
  report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const BoundCheck& c) { return c.pass; });
  return report;
}

ChainQuantities chain_quantities(const RateMatrix& rm, const StationaryDist& sd,
                                 const ExactCaps& caps) {
  ChainQuantities q;
  q.states = rm.states;
  const auto n = rm.size();

  const HittingTimes hit = hitting_times(rm, caps);
  q.t_hit = hit.worst;
  for (std::int64_t s = 0; s < n; ++s) q.t_hit_to[rm.states[s]] = hit.worst_to(s);

  if (n <= caps.product) {
    const MeetingTimes meet = meeting_times(rm, sd, caps);
    q.t_meet = meet.worst;
    q.t_pi_meet = meet.stationary;
  }
  if (n <= caps.coalescence) {
    q.t_coal = coalescence_time(rm, caps);
    q.t_cons["unique"] = consensus_time(rm, {ConsensusInit::Kind::unique, 0}, caps);
  }
  if (n <= caps.voter_states) {
    q.t_cons["bernoulli:0.5"] =
        consensus_time(rm, {ConsensusInit::Kind::bernoulli, 0.5}, caps);
  }
  const SpectralInfo spec = spectral(rm, sd, caps);
  q.t_rel = spec.t_rel;
  q.t_mix = spec.t_mix;
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = a + 1; b < n; ++b)
      if (rm.Q(a, b) > 0)
        q.conductances.push_back({{rm.states[a], rm.states[b]},
                                  sd.pi(a) * rm.Q(a, b)});
  return q;
}

std::string chain_quantities_json(const ChainQuantities& q) {
  json j;
  j["states"] = q.states;
  j["t_hit"] = q.t_hit;
  j["t_hit_to"] = json::object();
  for (const auto& [v, t] : q.t_hit_to) j["t_hit_to"][std::to_string(v)] = t;
  j["t_meet"] = q.t_meet;
  j["t_pi_meet"] = q.t_pi_meet;
  if (q.t_coal) j["t_coal"] = *q.t_coal;
  j["t_cons"] = json::object();
  for (const auto& [k, v] : q.t_cons) j["t_cons"][k] = v;
  j["t_rel"] = q.t_rel;
  j["t_mix"] = q.t_mix;
  j["conductances"] = json::array();
  for (const auto& [edge, c] : q.conductances)
    j["conductances"].push_back({{"i", edge.first}, {"j", edge.second}, {"c", c}});
  return j.dump(2);
}

std::string audit_report_json(const AuditReport& r) {
  json j;
  j["all_pass"] = r.all_pass;
  j["conductance_ratio"] = r.conductance_ratio;
  j["bottleneck_exhaustive"] = r.bottleneck_exhaustive;
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"slack", c.slack},
                           {"pass", c.pass},
                           {"equality", c.equality},
                           {"detail", c.detail}});
  }
  return j.dump(2);
}

}  // namespace voternet
