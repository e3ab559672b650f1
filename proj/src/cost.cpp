#include "bdc/cost.hpp"

#include <stdexcept>

namespace bdc {

double CostSpec::reference_at(int k) const {
  if (reference.empty()) throw std::invalid_argument("empty reference sequence");
  if (k < 0) throw std::invalid_argument("negative reference index");
  return k < static_cast<int>(reference.size())
             ? reference[static_cast<std::size_t>(k)]
             : reference.back();
}

double pair_difference_sum(const Vec& x) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = i + 1; j < x.size(); ++j) {
      double d = x[i] - x[j];
      acc += d * d;
    }
  return acc;
}

double pair_covariance_sum(const Mat& s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = i + 1; j < s.cols(); ++j)
      acc += s(i, i) - 2.0 * s(i, j) + s(j, j);
  return acc;
}

double stage_cost_sample(const CostSpec& spec, const Vec& x, const Vec& input,
                         double r) {
  double track = spec.q_cap.dot(x) - r;
  return spec.c * track * track + input.dot(spec.r_weight * input) +
         spec.c0 * pair_difference_sum(x);
}

double conditional_stage_cost(const CostSpec& spec, const Vec& mean,
                              const Mat& cov, const Vec& input, double r) {
  double track = spec.q_cap.dot(mean) - r;
  return spec.c * track * track + spec.c * spec.q_cap.dot(cov * spec.q_cap) +
         input.dot(spec.r_weight * input) +
         spec.c0 * (pair_covariance_sum(cov) + pair_difference_sum(mean));
}

double surrogate_cost(const CostSpec& spec, const SurrogateRollout& rollout,
                      const std::vector<Vec>& controls) {
  const std::size_t len = static_cast<std::size_t>(spec.horizon) + 1;
  if (rollout.means.size() != len || rollout.covs.size() != len ||
      controls.size() != len)
    throw std::invalid_argument("surrogate_cost: rollout/controls length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < len; ++k)
    acc += conditional_stage_cost(spec, rollout.means[k], rollout.covs[k],
                                  controls[k], spec.reference_at(static_cast<int>(k)));
  return acc;
}

double realized_cost(const CostSpec& spec, const std::vector<TrueState>& truth,
                     const std::vector<Vec>& controls) {
  if (truth.size() != controls.size() || truth.empty())
    throw std::invalid_argument("realized_cost: trajectory/controls length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    acc += stage_cost_sample(spec, truth[k].soc, controls[k],
                             spec.reference_at(static_cast<int>(k)));
  return acc;
}

}  // namespace bdc
