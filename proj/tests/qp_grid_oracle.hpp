#pragma once

// Test-only oracle for small QPs: exhaustive grid search over the feasible
// box, independent of the solver. Each level scans points x points cells and
// zooms onto the best feasible cell, so the final objective is accurate to
// roughly |grad| * pitch / points^(levels-1).

#include <limits>
#include <random>

#include "bdc/qp.hpp"

namespace bdc::testing {

struct GridResult {
  double objective = std::numeric_limits<double>::infinity();
  Vec point;
};

inline GridResult grid_search_qp(const QpProblem& p, int points = 201,
                                 int levels = 4) {
  GridResult best;
  Vec lo = p.lower, hi = p.upper;

  for (int level = 0; level < levels; ++level) {
    GridResult level_best;
    Vec u(2);
    for (int i = 0; i < points; ++i) {
      u[0] = lo[0] + (hi[0] - lo[0]) * i / (points - 1);
      for (int j = 0; j < points; ++j) {
        u[1] = lo[1] + (hi[1] - lo[1]) * j / (points - 1);
        if (p.num_ineq() > 0 &&
            ((p.ineq_mat * u - p.ineq_rhs).array() > 1e-12).any())
          continue;
        double obj = 0.5 * u.dot(p.hess * u) + p.grad.dot(u);
        if (obj < level_best.objective) {
          level_best.objective = obj;
          level_best.point = u;
        }
      }
    }
    if (!level_best.point.size()) break;  // no feasible cell found
    best = level_best;

    // A constrained optimum can sit several cells from the best feasible
    // grid point along a diagonal boundary, so zoom generously.
    Vec pitch = (hi - lo) / (points - 1);
    for (int d = 0; d < 2; ++d) {
      lo[d] = std::max(p.lower[d], best.point[d] - 6.0 * pitch[d]);
      hi[d] = std::min(p.upper[d], best.point[d] + 6.0 * pitch[d]);
    }
  }
  return best;
}

// Random 2-variable problem: PSD Hessian, box [-1,1], two inequality rows
// placed with a feasibility margin around a random interior point.
inline QpProblem make_random_qp(std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-0.8, 0.8);

  QpProblem p;
  Mat b(2, 2);
  for (int i = 0; i < 4; ++i) b.data()[i] = normal(gen);
  p.hess = b * b.transpose() + 0.05 * Mat::Identity(2, 2);
  p.hess *= 1.0 / std::max(1.0, p.hess.norm());
  p.grad = Vec(2);
  p.grad << normal(gen), normal(gen);
  p.lower = Vec::Constant(2, -1.0);
  p.upper = Vec::Constant(2, 1.0);

  Vec interior(2);
  interior << unif(gen), unif(gen);
  p.ineq_mat = Mat(2, 2);
  for (int i = 0; i < 4; ++i) p.ineq_mat.data()[i] = normal(gen);
  p.ineq_rhs = p.ineq_mat * interior + Vec::Constant(2, 0.1);
  return p;
}

}  // namespace bdc::testing
