#include "bdc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bdc {

SystemModel::SystemModel(std::vector<BatteryParams> batteries, double dt,
                         Vec sigma_w_diag, Vec sigma_v_diag)
    : batteries_(std::move(batteries)),
      dt_(dt),
      sigma_w_diag_(std::move(sigma_w_diag)),
      sigma_v_diag_(std::move(sigma_v_diag)) {
  const int n = size();
  if (n < 1) throw std::invalid_argument("model needs at least one battery");
  if (!(dt_ > 0.0)) throw std::invalid_argument("sampling time must be positive");
  if (sigma_w_diag_.size() != n || sigma_v_diag_.size() != n)
    throw std::invalid_argument("noise covariance dimension mismatch");

  gains_.resize(n);
  input_lower_.resize(n);
  input_upper_.resize(n);
  for (int i = 0; i < n; ++i) {
    const BatteryParams& bp = batteries_[i];
    if (!(bp.eta > 0.0 && bp.eta <= 1.0))
      throw std::invalid_argument("battery efficiency must lie in (0,1]");
    if (!(bp.q_nom > 0.0))
      throw std::invalid_argument("nominal capacity must be positive");
    if (!(bp.i_min < bp.i_max))
      throw std::invalid_argument("current bounds must satisfy i_min < i_max");
    double g = bp.eta * dt_ / bp.q_nom;
    if (!std::isfinite(g) || !(g > 0.0))
      throw std::invalid_argument("charge gain must be finite and positive");
    gains_[i] = g;
    input_lower_[i] = bp.i_min;
    input_upper_[i] = bp.i_max;
    if (sigma_w_diag_[i] < 0.0)
      throw std::invalid_argument("process noise variances must be >= 0");
    if (!(sigma_v_diag_[i] > 0.0))
      throw std::invalid_argument("measurement noise variances must be > 0");
  }
}

Vec SystemModel::ocv_values(const Vec& soc) const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out[i] = batteries_[i].ocv.value(clamp01(soc[i]));
  return out;
}

Vec SystemModel::ocv_slopes(const Vec& soc) const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out[i] = batteries_[i].ocv.slope(clamp01(soc[i]));
  return out;
}

void SystemModel::check_input(const Vec& input, double tol) const {
  if (input.size() != size())
    throw std::invalid_argument("input dimension mismatch");
  for (int i = 0; i < size(); ++i) {
    if (input[i] < input_lower_[i] - tol || input[i] > input_upper_[i] + tol)
      throw std::invalid_argument("input " + std::to_string(input[i]) +
                                  " violates bounds of battery " +
                                  std::to_string(i));
  }
}

TrueState step_truth_with(const SystemModel& model, const TrueState& state,
                          const Vec& input, const Vec& w) {
  model.check_input(input);
  TrueState next;
  next.soc = clamp01(state.soc + model.gains().cwiseProduct(input) + w);
  return next;
}

TrueState step_truth(const SystemModel& model, const TrueState& state,
                     const Vec& input, RngStream& rng) {
  return step_truth_with(model, state, input,
                         draw_scaled_noise(rng, model.sigma_w_diag()));
}

Vec observe_with(const SystemModel& model, const TrueState& state, const Vec& v) {
  return model.ocv_values(state.soc) + v;
}

Vec observe(const SystemModel& model, const TrueState& state, RngStream& rng) {
  return observe_with(model, state, draw_scaled_noise(rng, model.sigma_v_diag()));
}

Vec draw_scaled_noise(RngStream& rng, const Vec& variance_diag) {
  Vec out(variance_diag.size());
  for (Eigen::Index i = 0; i < variance_diag.size(); ++i)
    out[i] = rng.normal() * std::sqrt(variance_diag[i]);
  return out;
}

}  // namespace bdc
