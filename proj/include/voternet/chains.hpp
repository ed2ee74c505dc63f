#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voternet/graph.hpp"

namespace voternet {

enum class Dynamics { classical, discursive };

std::string dynamics_name(Dynamics d);
std::optional<Dynamics> parse_dynamics(std::string_view name);

struct ExactCaps {
  std::int64_t hitting = 2000;      // component size for hitting solves
  std::int64_t product = 200;       // component size for pair-chain solves
  std::int64_t coalescence = 7;     // component size for occupied-set solves
  std::int64_t voter_states = 12;   // component size for opinion-space solves
};

// Exact solves refuse oversized inputs instead of approximating.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generator of the opinion-tracing walk on one connected component.
// Rows sum to zero; detailed balance holds against the companion
// stationary vector.
struct RateMatrix {
  std::vector<std::int32_t> states;  // component vertices, ascending
  std::vector<std::int64_t> degree;  // graph degree per state
  Eigen::MatrixXd Q;
  Eigen::VectorXd exit;  // q(i) = -Q(i,i)
  Dynamics dynamics = Dynamics::classical;
  double theta = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(states.size()); }
};

struct StationaryDist {
  Eigen::VectorXd pi;
};

RateMatrix build_generator(const Graph& g, const std::vector<std::int32_t>& comp,
                           Dynamics dynamics, double theta);

// Closed form per dynamics, then verified against pi Q = 0 to 1e-12.
StationaryDist stationary(const RateMatrix& rm);

double detailed_balance_residual(const RateMatrix& rm, const StationaryDist& sd);

struct HittingTimes {
  Eigen::MatrixXd expected;  // expected[x][y] = E_x T_y
  double worst = 0;          // max over pairs
  Eigen::VectorXd worst_to;  // per target s: max_x E_x T_s
};

HittingTimes hitting_times(const RateMatrix& rm, const ExactCaps& caps = {});

struct MeetingTimes {
  Eigen::MatrixXd expected;  // symmetric, zero diagonal
  double worst = 0;          // t_meet
  double stationary = 0;     // t^pi_meet
};

MeetingTimes meeting_times(const RateMatrix& rm, const StationaryDist& sd,
                           const ExactCaps& caps = {});

struct ObservedMeeting {
  Eigen::MatrixXd expected;          // indexed by position within A
  std::vector<std::int32_t> subset;  // states of A (indices into rm.states)
  double stationary = 0;             // t^pi_meet(A)
};

// Meeting time of the pair chain observed on A x A: time is counted only
// while both walkers are inside A, absorption on the diagonal of A.
ObservedMeeting observed_meeting(const RateMatrix& rm, const StationaryDist& sd,
                                 const std::vector<std::int32_t>& subset_local,
                                 const ExactCaps& caps = {});

// Expected time until coalescing walkers started from every vertex have
// merged; the state is the set of occupied vertices.
double coalescence_time(const RateMatrix& rm, const ExactCaps& caps = {});

struct ConsensusInit {
  enum class Kind { unique, bernoulli };
  Kind kind = Kind::unique;
  double u = 0.5;
};

// Expected consensus time of the voter chain itself. The unique-opinion
// start is solved on the partition space of which vertices share an
// opinion; the Bernoulli start is solved on {0,1}^n with the product
// initial law.
double consensus_time(const RateMatrix& rm, const ConsensusInit& init,
                      const ExactCaps& caps = {});

struct SpectralInfo {
  double t_rel = 0;
  double t_mix = 0;
  std::vector<double> grid_times;
  std::vector<double> grid_tv;  // d(t) on the grid
  Eigen::VectorXd eigenvalues;  // of -Q, ascending
};

SpectralInfo spectral(const RateMatrix& rm, const StationaryDist& sd,
                      const ExactCaps& caps = {});

// Worst-case total variation to stationarity at time t.
double tv_distance(const RateMatrix& rm, const StationaryDist& sd, double t);
// From one state: (1/2) || p_x.(t) - pi ||_1.
double tv_distance_from(const RateMatrix& rm, const StationaryDist& sd,
                        std::int64_t x, double t);
// min { t : || p_x.(t) - pi ||_1 <= 1/2 }.
double mixing_time_from(const RateMatrix& rm, const StationaryDist& sd,
                        std::int64_t x);

double conductance(const RateMatrix& rm, const StationaryDist& sd,
                   std::int64_t i, std::int64_t j);

struct BottleneckCut {
  double ratio = 0;               // pi(A) pi(A^c) / c(A, A^c)
  std::vector<std::int32_t> cut;  // local state indices of A
  bool exhaustive = true;
};

BottleneckCut bottleneck(const RateMatrix& rm, const StationaryDist& sd,
                         std::int64_t exhaustive_limit = 12,
                         std::int64_t sample_count = 4096);

struct BoundCheck {
  std::string name;
  double lhs = 0;       // checks are oriented lhs <= rhs
  double rhs = 0;
  double slack = 0;     // rhs - lhs
  bool pass = false;
  bool equality = false;
  std::string detail;
};

struct AuditReport {
  std::vector<BoundCheck> checks;
  double conductance_ratio = 0;  // t_meet / bottleneck ratio; no pass flag
  bool bottleneck_exhaustive = true;
  bool all_pass = true;
};

// Evaluates every constant-bearing inequality of the chain toolkit on one
// component. extra_subsets supplies observation sets (local indices) for
// the partial-meeting bound in addition to the full set.
AuditReport bound_audit(const RateMatrix& rm, const StationaryDist& sd,
                        const std::vector<std::vector<std::int32_t>>& extra_subsets = {},
                        const ExactCaps& caps = {});

struct ChainQuantities {
  std::vector<std::int32_t> states;
  double t_hit = 0;
  std::map<std::int32_t, double> t_hit_to;  // by graph vertex
  double t_meet = 0;
  double t_pi_meet = 0;
  std::optional<double> t_coal;
  std::map<std::string, double> t_cons;  // "unique", "bernoulli:<u>"
  double t_rel = 0;
  double t_mix = 0;
  std::vector<std::pair<std::pair<std::int32_t, std::int32_t>, double>> conductances;
};

ChainQuantities chain_quantities(const RateMatrix& rm, const StationaryDist& sd,
                                 const ExactCaps& caps = {});

std::string chain_quantities_json(const ChainQuantities& q);
std::string audit_report_json(const AuditReport& r);

// Dense solve with partial pivoting, gated by an infinity-norm residual
// check at 1e-9 relative; throws on failure.
Eigen::VectorXd solve_gated(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const char* what);

}  // namespace voternet
