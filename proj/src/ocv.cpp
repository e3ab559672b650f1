#include "bdc/ocv.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bdc {

namespace {

constexpr double kDomainSlack = 1e-12;

void check_domain(double soc) {
  if (soc < -kDomainSlack || soc > 1.0 + kDomainSlack || !std::isfinite(soc))
    throw std::domain_error("OCV curve evaluated at SOC " + std::to_string(soc) +
                            " outside [0,1]");
}

}  // namespace

OcvCurve::OcvCurve(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty())
    throw std::invalid_argument("OCV curve needs at least one coefficient");
  for (double a : coeffs_)
    if (!std::isfinite(a))
      throw std::invalid_argument("OCV coefficients must be finite");
}

double OcvCurve::value(double soc) const {
  check_domain(soc);
  double s = soc < 0.0 ? 0.0 : (soc > 1.0 ? 1.0 : soc);
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double OcvCurve::slope(double soc) const {
  check_domain(soc);
  double s = soc < 0.0 ? 0.0 : (soc > 1.0 ? 1.0 : soc);
  double acc = 0.0;
  for (int j = static_cast<int>(coeffs_.size()) - 1; j >= 1; --j)
    acc = acc * s + j * coeffs_[j];
  return acc;
}

bool OcvCurve::is_monotone(int grid_points, double tolerance) const {
  for (int k = 0; k < grid_points; ++k) {
    double s = static_cast<double>(k) / (grid_points - 1);
    if (slope(s) < -tolerance) return false;
  }
  return true;
}

}  // namespace bdc
