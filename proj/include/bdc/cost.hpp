#pragma once

#include <vector>

#include "bdc/estimator.hpp"
#include "bdc/linalg.hpp"
#include "bdc/model.hpp"

namespace bdc {

// Weights of the stage cost
//   c (Q'x - r)^2 + I'RI + c0 * sum_{i<j} (x_i - x_j)^2.
struct CostSpec {
  double c;                       // tracking weight, >= 0
  double c0;                      // uniformity weight, >= 0
  Vec q_cap;                      // capacity vector Q, positive elements
  Mat r_weight;                   // control effort matrix R, symmetric PD
  std::vector<double> reference;  // r_k sequence, constant-extended past the end
  int horizon;                    // N, >= 1

  double reference_at(int k) const;
};

// sum_{i<j} (x_i - x_j)^2
double pair_difference_sum(const Vec& x);

// sum_{i<j} (S_ii - 2 S_ij + S_jj)
double pair_covariance_sum(const Mat& s);

// Raw stochastic stage cost evaluated at a state sample.
double stage_cost_sample(const CostSpec& spec, const Vec& x, const Vec& input,
                         double r);

// Exact conditional expectation of the stage cost given (mean, cov):
//   c (Q'mean - r)^2 + c Q'cov Q + I'RI
//   + c0 sum_{i<j} [cov_ii - 2 cov_ij + cov_jj + (mean_i - mean_j)^2].
double conditional_stage_cost(const CostSpec& spec, const Vec& mean,
                              const Mat& cov, const Vec& input, double r);

// Deterministic surrogate: sum of conditional stage costs over a
// prediction-only rollout. Rollout and controls must both span N+1 steps.
double surrogate_cost(const CostSpec& spec, const SurrogateRollout& rollout,
                      const std::vector<Vec>& controls);

// Sample cost of a realized closed-loop trajectory (T+1 stage terms).
double realized_cost(const CostSpec& spec, const std::vector<TrueState>& truth,
                     const std::vector<Vec>& controls);

}  // namespace bdc
