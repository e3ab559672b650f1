#include "bdc/linalg.hpp"

namespace bdc {

Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  Vec vals = eig.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals[i] = vals[i] > 0.0 ? std::sqrt(vals[i]) : 0.0;
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  return eig.eigenvalues().minCoeff();
}

}  // namespace bdc
