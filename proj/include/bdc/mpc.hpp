#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "bdc/cost.hpp"
#include "bdc/estimator.hpp"
#include "bdc/model.hpp"
#include "bdc/qp.hpp"

namespace bdc {

// Open-loop plan over the horizon: N+1 input vectors, the state trajectory
// backing them, and (for dual-control plans) the surrogate score used for
// ranking.
struct ControlPlan {
  std::vector<Vec> inputs;
  std::vector<Vec> predicted_means;
  std::optional<double> surrogate_value;
};

struct DualControlConfig {
  int num_candidates = 1;  // L
  int horizon = 8;         // N
  CostSpec cost;
  double qp_tol = 1e-6;
  int qp_max_iter = 20000;
};

// Certainty-equivalence linear MPC: condensed QP over the stacked inputs with
// box bounds on currents and [0,1] rows on every predicted state. x0 is
// clamped to [0,1] before condensing. Throws QpError when the solver does
// not reach an optimal point.
ControlPlan solve_linear_mpc(const SystemModel& model, const Vec& x0,
                             const DualControlConfig& cfg);

// One LPV candidate: the surrogate cost with covariances frozen at
// `frozen_covs` becomes a convex QP in the inputs -- tracking, effort and the
// mean part of the uniformity cost, with the frozen covariance terms entering
// as additive constants. Returns nothing when the QP is not solved to
// optimality (the candidate is discarded).
std::optional<ControlPlan> lpv_candidate(const SystemModel& model,
                                         const DualControlConfig& cfg,
                                         const Belief& init,
                                         const ControlPlan& nominal,
                                         const std::vector<Mat>& frozen_covs);

struct DualStepReport {
  ControlPlan plan;
  std::vector<double> scores;  // J_i per candidate; NaN where infeasible
  std::vector<bool> feasible;
  int winner = -1;  // 0-based candidate index; -1 when the fallback fired
};

// Randomized dual-control step. Candidate 1 polishes the plain linear MPC
// plan; candidates 2..L re-solve it from initial states sampled with the
// belief covariance and rescore through the exact prediction-only rollout
// from the true belief. Per-candidate rng substreams are derived from `seed`,
// so any `threads` value selects the same winner.
DualStepReport dual_control_step_report(const SystemModel& model,
                                        const DualControlConfig& cfg,
                                        const Belief& belief, std::uint64_t seed,
                                        int threads = 1);

// Serial reference.
ControlPlan dual_control_step(const SystemModel& model,
                              const DualControlConfig& cfg, const Belief& belief,
                              std::uint64_t seed);

ControlPlan dual_control_step_parallel(const SystemModel& model,
                                       const DualControlConfig& cfg,
                                       const Belief& belief, std::uint64_t seed,
                                       int threads);

struct QpError : std::runtime_error {
  explicit QpError(QpStatus s);
  QpStatus status;
};

}  // namespace bdc
