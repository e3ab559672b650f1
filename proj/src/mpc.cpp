#include "bdc/mpc.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bdc {

namespace {

// Condensed form over U = [I_0; ...; I_N]: states are eliminated through
// x_t = x0 + diag(g) * sum_{j<t} I_j, giving a QP with box bounds on inputs
// and 2nN inequality rows keeping every predicted state in [0,1].
struct CondensedQp {
  QpProblem qp;
  double constant = 0.0;  // cost terms independent of U
};

// S_t maps U to x_t - x0; row i has g_i in blocks j < t.
Mat state_map(const Vec& gains, int t, int horizon_len) {
  const int n = static_cast<int>(gains.size());
  Mat s = Mat::Zero(n, n * horizon_len);
  for (int j = 0; j < t; ++j) s.block(0, j * n, n, n) = Mat(gains.asDiagonal());
  return s;
}

CondensedQp build_condensed_qp(const SystemModel& model, const Vec& x0,
                               const CostSpec& cost, int horizon,
                               bool with_uniformity,
                               const std::vector<Mat>* frozen_covs) {
  const int n = model.size();
  const int len = horizon + 1;
  const int m = n * len;
  const Vec& g = model.gains();

  CondensedQp out;
  out.qp.hess = Mat::Zero(m, m);
  out.qp.grad = Vec::Zero(m);

  for (int t = 0; t < len; ++t)
    out.qp.hess.block(t * n, t * n, n, n) += 2.0 * cost.r_weight;

  // Uniformity Laplacian: x'Mx = sum_{i<j} (x_i - x_j)^2.
  Mat unif = n * Mat::Identity(n, n) - Mat::Ones(n, n);

  for (int t = 0; t < len; ++t) {
    Mat s_t = state_map(g, t, len);
    double r_t = cost.reference_at(t);
    if (cost.c > 0.0) {
      Vec a_t = s_t.transpose() * cost.q_cap;
      double e_t = cost.q_cap.dot(x0) - r_t;
      out.qp.hess += 2.0 * cost.c * a_t * a_t.transpose();
      out.qp.grad += 2.0 * cost.c * e_t * a_t;
      out.constant += cost.c * e_t * e_t;
    }
    if (with_uniformity && cost.c0 > 0.0 && n > 1) {
      out.qp.hess += 2.0 * cost.c0 * s_t.transpose() * unif * s_t;
      out.qp.grad += 2.0 * cost.c0 * s_t.transpose() * (unif * x0);
      out.constant += cost.c0 * x0.dot(unif * x0);
    }
    if (frozen_covs) {
      const Mat& cov = (*frozen_covs)[static_cast<std::size_t>(t)];
      out.constant += cost.c * cost.q_cap.dot(cov * cost.q_cap) +
                      cost.c0 * pair_covariance_sum(cov);
    }
  }

  // State rows 0 <= x0 + S_t U <= 1 for t = 1..N.
  const int rows = 2 * n * horizon;
  out.qp.ineq_mat = Mat::Zero(rows, m);
  out.qp.ineq_rhs = Vec::Zero(rows);
  int row = 0;
  for (int t = 1; t < len; ++t) {
    Mat s_t = state_map(g, t, len);
    out.qp.ineq_mat.block(row, 0, n, m) = s_t;
    out.qp.ineq_rhs.segment(row, n) = Vec::Ones(n) - x0;
    row += n;
    out.qp.ineq_mat.block(row, 0, n, m) = -s_t;
    out.qp.ineq_rhs.segment(row, n) = x0;
    row += n;
  }

  out.qp.lower.resize(m);
  out.qp.upper.resize(m);
  for (int t = 0; t < len; ++t) {
    out.qp.lower.segment(t * n, n) = model.input_lower();
    out.qp.upper.segment(t * n, n) = model.input_upper();
  }
  return out;
}

std::vector<Vec> unstack_inputs(const SystemModel& model, const Vec& u, int len) {
  const int n = model.size();
  std::vector<Vec> inputs;
  inputs.reserve(len);
  for (int t = 0; t < len; ++t)
    inputs.push_back(
        clamp_to(u.segment(t * n, n), model.input_lower(), model.input_upper()));
  return inputs;
}

std::vector<Vec> condensed_means(const SystemModel& model, const Vec& x0,
                                 const std::vector<Vec>& inputs) {
  std::vector<Vec> means;
  means.reserve(inputs.size());
  Vec x = x0;
  means.push_back(x);
  for (std::size_t t = 0; t + 1 < inputs.size(); ++t) {
    x += model.gains().cwiseProduct(inputs[t]);
    means.push_back(x);
  }
  return means;
}

Vec stack_inputs(const std::vector<Vec>& inputs) {
  const int n = static_cast<int>(inputs.front().size());
  Vec u(n * static_cast<int>(inputs.size()));
  for (std::size_t t = 0; t < inputs.size(); ++t)
    u.segment(static_cast<int>(t) * n, n) = inputs[t];
  return u;
}

QpSettings qp_settings(const DualControlConfig& cfg) {
  QpSettings s;
  s.tol = cfg.qp_tol;
  s.max_iter = cfg.qp_max_iter;
  return s;
}

struct Candidate {
  bool feasible = false;
  bool have_nominal = false;
  ControlPlan nominal;
  ControlPlan plan;
  double score = std::numeric_limits<double>::quiet_NaN();
};

Candidate evaluate_candidate(const SystemModel& model, const DualControlConfig& cfg,
                             const Belief& belief, const Mat& cov_sqrt,
                             std::uint64_t seed, int index) {
  Candidate cand;
  const int n = model.size();
  const int len = cfg.horizon + 1;

  Vec x0 = belief.mean;
  RngStream rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
  if (index > 0) x0 = belief.mean + cov_sqrt * rng.normal_vec(n);

  try {
    cand.nominal = solve_linear_mpc(model, x0, cfg);
  } catch (const QpError&) {
    return cand;  // discarded
  }
  cand.have_nominal = true;

  std::vector<Mat> frozen;
  Belief lpv_init{x0, belief.cov};
  if (index == 0) {
    frozen = prediction_only_rollout(model, belief, cand.nominal.inputs).covs;
  } else {
    // Per-step input perturbation around the nominal plan, clipped to bounds.
    // The covariance recomputation keeps its slope arguments pinned to the
    // nominal means, so the perturbed inputs cannot displace it; the draws
    // still advance this candidate's stream in a fixed order.
    std::vector<Vec> perturbed(static_cast<std::size_t>(len));
    for (int t = 0; t < len; ++t)
      perturbed[static_cast<std::size_t>(t)] =
          clamp_to(cand.nominal.inputs[static_cast<std::size_t>(t)] +
                       cov_sqrt * rng.normal_vec(n),
                   model.input_lower(), model.input_upper());
    frozen = covariance_rollout(model, belief.cov, cand.nominal.predicted_means);
  }

  auto lpv = lpv_candidate(model, cfg, lpv_init, cand.nominal, frozen);
  if (!lpv) return cand;

  // Exact rescoring: simulate the candidate from the true belief.
  SurrogateRollout rollout = prediction_only_rollout(model, belief, lpv->inputs);
  cand.score = surrogate_cost(cfg.cost, rollout, lpv->inputs);
  cand.plan.inputs = std::move(lpv->inputs);
  cand.plan.predicted_means = std::move(rollout.means);
  cand.plan.surrogate_value = cand.score;
  cand.feasible = true;
  return cand;
}

}  // namespace

QpError::QpError(QpStatus s)
    : std::runtime_error(std::string("qp solve failed: ") + to_string(s)),
      status(s) {}

ControlPlan solve_linear_mpc(const SystemModel& model, const Vec& x0,
                             const DualControlConfig& cfg) {
  Vec x0c = clamp01(x0);
  CondensedQp condensed =
      build_condensed_qp(model, x0c, cfg.cost, cfg.horizon, false, nullptr);
  QpSolver solver;
  QpSolution sol = solver.solve(condensed.qp, qp_settings(cfg));
  if (sol.status != QpStatus::optimal) throw QpError(sol.status);

  ControlPlan plan;
  plan.inputs = unstack_inputs(model, sol.point, cfg.horizon + 1);
  plan.predicted_means = condensed_means(model, x0c, plan.inputs);
  return plan;
}

std::optional<ControlPlan> lpv_candidate(const SystemModel& model,
                                         const DualControlConfig& cfg,
                                         const Belief& init,
                                         const ControlPlan& nominal,
                                         const std::vector<Mat>& frozen_covs) {
  const std::size_t len = static_cast<std::size_t>(cfg.horizon) + 1;
  if (nominal.inputs.size() != len || frozen_covs.size() != len)
    throw std::invalid_argument("lpv_candidate: horizon mismatch");

  Vec x0c = clamp01(init.mean);
  CondensedQp condensed =
      build_condensed_qp(model, x0c, cfg.cost, cfg.horizon, true, &frozen_covs);
  QpSolver solver;
  QpSolution sol =
      solver.solve(condensed.qp, stack_inputs(nominal.inputs), qp_settings(cfg));
  if (sol.status != QpStatus::optimal) return std::nullopt;

  ControlPlan plan;
  plan.inputs = unstack_inputs(model, sol.point, cfg.horizon + 1);
  plan.predicted_means = condensed_means(model, x0c, plan.inputs);
  plan.surrogate_value = sol.objective + condensed.constant;
  return plan;
}

DualStepReport dual_control_step_report(const SystemModel& model,
                                        const DualControlConfig& cfg,
                                        const Belief& belief, std::uint64_t seed,
                                        int threads) {
  if (cfg.num_candidates < 1)
    throw std::invalid_argument("dual control needs at least one candidate");
  const int count = cfg.num_candidates;
  const Mat cov_sqrt = psd_sqrt(belief.cov);

  std::vector<Candidate> candidates(static_cast<std::size_t>(count));
  if (threads > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (int i = 0; i < count; ++i)
      candidates[static_cast<std::size_t>(i)] =
          evaluate_candidate(model, cfg, belief, cov_sqrt, seed, i);
  } else {
    for (int i = 0; i < count; ++i)
      candidates[static_cast<std::size_t>(i)] =
          evaluate_candidate(model, cfg, belief, cov_sqrt, seed, i);
  }

  DualStepReport report;
  report.scores.reserve(candidates.size());
  report.feasible.reserve(candidates.size());
  int winner = -1;
  for (int i = 0; i < count; ++i) {
    const Candidate& cand = candidates[static_cast<std::size_t>(i)];
    report.scores.push_back(cand.score);
    report.feasible.push_back(cand.feasible);
    if (cand.feasible &&
        (winner < 0 ||
         cand.score < candidates[static_cast<std::size_t>(winner)].score))
      winner = i;
  }

  if (winner >= 0) {
    report.winner = winner;
    report.plan = candidates[static_cast<std::size_t>(winner)].plan;
    return report;
  }

  // Every candidate was discarded: fall back to the plain linear MPC plan
  // from the belief mean, inputs clipped to bounds.
  ControlPlan fallback = candidates[0].have_nominal
                             ? candidates[0].nominal
                             : solve_linear_mpc(model, belief.mean, cfg);
  SurrogateRollout rollout = prediction_only_rollout(model, belief, fallback.inputs);
  fallback.surrogate_value = surrogate_cost(cfg.cost, rollout, fallback.inputs);
  fallback.predicted_means = rollout.means;
  report.plan = std::move(fallback);
  report.winner = -1;
  return report;
}

ControlPlan dual_control_step(const SystemModel& model, const DualControlConfig& cfg,
                              const Belief& belief, std::uint64_t seed) {
  return dual_control_step_report(model, cfg, belief, seed, 1).plan;
}

ControlPlan dual_control_step_parallel(const SystemModel& model,
                                       const DualControlConfig& cfg,
                                       const Belief& belief, std::uint64_t seed,
                                       int threads) {
  return dual_control_step_report(model, cfg, belief, seed, threads).plan;
}

}  // namespace bdc
