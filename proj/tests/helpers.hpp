#pragma once

#include <vector>

#include "bdc/model.hpp"

namespace bdc::testing {

// n batteries with unit gain, shared noise levels, bounds +-bound.
inline SystemModel make_model(std::vector<std::vector<double>> curves,
                              double sigma_w, double sigma_v,
                              double bound = 1.0) {
  std::vector<BatteryParams> batteries;
  for (auto& c : curves)
    batteries.push_back(BatteryParams{1.0, 1.0, -bound, bound, OcvCurve{c}});
  const int n = static_cast<int>(batteries.size());
  return SystemModel(std::move(batteries), 1.0, Vec::Constant(n, sigma_w),
                     Vec::Constant(n, sigma_v));
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Mat mat1(double x) {
  Mat m(1, 1);
  m(0, 0) = x;
  return m;
}

}  // namespace bdc::testing
