#pragma once

#include <stdexcept>
#include <string>

#include "bdc/harness.hpp"

namespace bdc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Loads an experiment configuration from a JSON document:
//
// {
//   "model": {
//     "dt": 1.0,
//     "batteries": [
//       {"eta": 1.0, "q_nom": 1.0, "i_min": -1.0, "i_max": 1.0,
//        "ocv_coeffs": [3.0, 0.7, 0.05]}, ...
//     ],
//     "sigma_w_diag": [...], "sigma_v_diag": [...]
//   },
//   "cost": {"c": 1.0, "c0": 1.0, "q_cap": [...], "r_weight_diag": [...],
//            "reference": 1.0 or [...], "horizon": 8},
//   "init": {"mean": [...], "cov_diag": [...]},
//   "steps": 50, "runs": 100, "controller": "both",
//   "candidates": 35, "seed": 42,
//   "qp": {"tol": 1e-6, "max_iter": 20000}   // optional
// }
//
// Non-monotone OCV curves and inconsistent dimensions are rejected here.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

}  // namespace bdc
