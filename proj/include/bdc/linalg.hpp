#pragma once

#include <Eigen/Dense>

namespace bdc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline void symmetrize(Mat& m) { m = (0.5 * (m + m.transpose())).eval(); }

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline Vec clamp01(Vec v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = clamp01(v[i]);
  return v;
}

inline Vec clamp_to(Vec v, const Vec& lo, const Vec& hi) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = v[i] < lo[i] ? lo[i] : (v[i] > hi[i] ? hi[i] : v[i]);
  return v;
}

// Square root of a symmetric PSD matrix. Eigenvalues slightly negative from
// roundoff are clipped to zero.
Mat psd_sqrt(const Mat& m);

double min_eigenvalue(const Mat& m);

}  // namespace bdc
