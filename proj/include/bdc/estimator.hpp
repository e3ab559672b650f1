#pragma once

#include <vector>

#include "bdc/linalg.hpp"
#include "bdc/model.hpp"

namespace bdc {

// Information state: conditional mean and covariance of the SOC vector.
// The mean is a statistic, not a physical state, and is never clamped;
// OCV values/slopes are always evaluated at the clamped mean.
struct Belief {
  Vec mean;
  Mat cov;
};

// Prediction: mean' = mean + diag(g) * input, cov' = cov + Sigma_w.
Belief ekf_time_update(const SystemModel& model, const Belief& belief,
                       const Vec& input);

// Correction with gain Omega = cov H' (H cov H' + Sigma_v)^-1, H the diagonal
// of OCV slopes at the predicted mean. Covariance is symmetrized after the
// (I - Omega H) cov update.
Belief ekf_measurement_update(const SystemModel& model, const Belief& predicted,
                              const Vec& y);

// Horizon-length mean/covariance sequences of the prediction-only filter.
struct SurrogateRollout {
  std::vector<Vec> means;  // x^p_k, k = 0..N
  std::vector<Mat> covs;   // Sigma^p_{k|k}, k = 0..N
};

// Rolls the prediction-only filter from `init` under the given controls:
// means evolve open loop, covariances contract through the anticipated
// measurement geometry, the mean receives no correction. `controls` must
// have N+1 entries; the last one does not influence the returned sequences.
SurrogateRollout prediction_only_rollout(const SystemModel& model,
                                         const Belief& init,
                                         const std::vector<Vec>& controls);

// Covariance-only recursion along a fixed mean trajectory: slope arguments
// are pinned to `means` regardless of what inputs produced them. Returns
// Sigma_{k|k} for k = 0..means.size()-1 starting from init_cov.
std::vector<Mat> covariance_rollout(const SystemModel& model, const Mat& init_cov,
                                    const std::vector<Vec>& means);

}  // namespace bdc
