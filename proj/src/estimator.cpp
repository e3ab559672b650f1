#include "bdc/estimator.hpp"

#include <stdexcept>

namespace bdc {

namespace {

// Shared correction core. Slopes are evaluated at the clamped mean;
// sigma_v > 0 keeps the innovation covariance invertible.
Mat contract_covariance(const SystemModel& model, const Mat& cov_pred,
                        const Vec& slopes, Mat* gain_out) {
  const int n = model.size();
  Mat innov_cov = slopes.asDiagonal() * cov_pred * slopes.asDiagonal();
  innov_cov += Mat(model.sigma_v_diag().asDiagonal());
  Eigen::LLT<Mat> llt(innov_cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("innovation covariance solve failed");
  // Omega' = S^-1 H cov
  Mat gain = llt.solve(slopes.asDiagonal() * cov_pred).transpose();
  Mat cov = (Mat::Identity(n, n) - gain * Mat(slopes.asDiagonal())) * cov_pred;
  symmetrize(cov);
  if (gain_out) *gain_out = std::move(gain);
  return cov;
}

}  // namespace

Belief ekf_time_update(const SystemModel& model, const Belief& belief,
                       const Vec& input) {
  model.check_input(input);
  Belief out;
  out.mean = belief.mean + model.gains().cwiseProduct(input);
  out.cov = belief.cov + Mat(model.sigma_w_diag().asDiagonal());
  return out;
}

Belief ekf_measurement_update(const SystemModel& model, const Belief& predicted,
                              const Vec& y) {
  Vec slopes = model.ocv_slopes(predicted.mean);
  Mat gain;
  Belief out;
  out.cov = contract_covariance(model, predicted.cov, slopes, &gain);
  out.mean = predicted.mean + gain * (y - model.ocv_values(predicted.mean));
  return out;
}

SurrogateRollout prediction_only_rollout(const SystemModel& model,
                                         const Belief& init,
                                         const std::vector<Vec>& controls) {
  if (controls.empty())
    throw std::invalid_argument("rollout needs at least one control");
  const int n_steps = static_cast<int>(controls.size());  // N+1 entries
  SurrogateRollout out;
  out.means.reserve(n_steps);
  out.covs.reserve(n_steps);
  out.means.push_back(init.mean);
  out.covs.push_back(init.cov);

  const Mat sigma_w = Mat(model.sigma_w_diag().asDiagonal());
  for (int k = 0; k + 1 < n_steps; ++k) {
    model.check_input(controls[k], 1e-6);
    Vec mean = out.means.back() + model.gains().cwiseProduct(controls[k]);
    Mat cov_pred = out.covs.back() + sigma_w;
    Vec slopes = model.ocv_slopes(mean);
    out.means.push_back(std::move(mean));
    out.covs.push_back(contract_covariance(model, cov_pred, slopes, nullptr));
  }
  return out;
}

std::vector<Mat> covariance_rollout(const SystemModel& model, const Mat& init_cov,
                                    const std::vector<Vec>& means) {
  if (means.empty()) throw std::invalid_argument("empty mean trajectory");
  std::vector<Mat> covs;
  covs.reserve(means.size());
  covs.push_back(init_cov);
  const Mat sigma_w = Mat(model.sigma_w_diag().asDiagonal());
  for (std::size_t k = 1; k < means.size(); ++k) {
    Mat cov_pred = covs.back() + sigma_w;
    Vec slopes = model.ocv_slopes(means[k]);
    covs.push_back(contract_covariance(model, cov_pred, slopes, nullptr));
  }
  return covs;
}

}  // namespace bdc
