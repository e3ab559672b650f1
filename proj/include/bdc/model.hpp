#pragma once

#include <vector>

#include "bdc/linalg.hpp"
#include "bdc/ocv.hpp"
#include "bdc/rng.hpp"

namespace bdc {

struct BatteryParams {
  double eta;    // coulombic efficiency, (0, 1]
  double q_nom;  // nominal capacity, ampere-hours
  double i_min;  // allowable current range, amperes
  double i_max;
  OcvCurve ocv;
};

// n-battery plant: Coulomb-counting SOC dynamics per battery, polynomial
// observation curves, diagonal Gaussian process/measurement noise.
class SystemModel {
 public:
  SystemModel(std::vector<BatteryParams> batteries, double dt, Vec sigma_w_diag,
              Vec sigma_v_diag);

  int size() const { return static_cast<int>(batteries_.size()); }
  double dt() const { return dt_; }
  const std::vector<BatteryParams>& batteries() const { return batteries_; }

  // Per-battery charge gain g_i = eta_i * dt / q_nom_i.
  const Vec& gains() const { return gains_; }
  const Vec& sigma_w_diag() const { return sigma_w_diag_; }
  const Vec& sigma_v_diag() const { return sigma_v_diag_; }
  const Vec& input_lower() const { return input_lower_; }
  const Vec& input_upper() const { return input_upper_; }

  // Elementwise h / h'. Arguments are clamped to [0,1] before evaluating
  // the fitted polynomials; estimator means may sit slightly outside.
  Vec ocv_values(const Vec& soc) const;
  Vec ocv_slopes(const Vec& soc) const;

  // Throws when any element of the input violates its battery's bounds.
  void check_input(const Vec& input, double tol = 1e-9) const;

 private:
  std::vector<BatteryParams> batteries_;
  double dt_;
  Vec sigma_w_diag_;
  Vec sigma_v_diag_;
  Vec gains_;
  Vec input_lower_;
  Vec input_upper_;
};

// Physical SOC vector; every element stays in [0,1].
struct TrueState {
  Vec soc;
};

// x'_i = clamp(x_i + g_i * I_i + w_i, 0, 1) with the process noise supplied
// by the caller (w has variance sigma_w per element when drawn by the rng
// overload).
TrueState step_truth_with(const SystemModel& model, const TrueState& state,
                          const Vec& input, const Vec& w);
TrueState step_truth(const SystemModel& model, const TrueState& state,
                     const Vec& input, RngStream& rng);

// y_i = h_i(x_i) + v_i.
Vec observe_with(const SystemModel& model, const TrueState& state, const Vec& v);
Vec observe(const SystemModel& model, const TrueState& state, RngStream& rng);

// Scaled noise draw: z_i * sqrt(var_i), battery-index order.
Vec draw_scaled_noise(RngStream& rng, const Vec& variance_diag);

}  // namespace bdc
