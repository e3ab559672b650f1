#pragma once

#include <vector>

namespace bdc {

// Polynomial OCV-SOC curve, h(s) = sum_j coeffs[j] * s^j in volts.
// Fitted curves are only valid on [0,1]; evaluation outside that range by
// more than a roundoff tolerance signals an upstream clamping bug.
class OcvCurve {
 public:
  explicit OcvCurve(std::vector<double> coeffs);

  // Open-circuit voltage at a state of charge in [0,1].
  double value(double soc) const;

  // Analytic derivative dh/ds in volts per unit SOC. A zero slope means the
  // measurement carries no information about the state at that point.
  double slope(double soc) const;

  // h'(s) >= -tolerance at every point of a uniform grid on [0,1].
  bool is_monotone(int grid_points = 1001, double tolerance = 0.0) const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

}  // namespace bdc
