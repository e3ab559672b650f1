#pragma once

#include "bdc/linalg.hpp"

namespace bdc {

// Convex QP in the form
//   minimize    1/2 u'Hu + g'u
//   subject to  A u <= b,   lower <= u <= upper.
// Box entries may be +-infinity.
struct QpProblem {
  Mat hess;      // m x m, symmetric PSD
  Vec grad;      // m
  Mat ineq_mat;  // p x m, p may be zero
  Vec ineq_rhs;  // p
  Vec lower;     // m
  Vec upper;     // m

  int num_vars() const { return static_cast<int>(grad.size()); }
  int num_ineq() const { return static_cast<int>(ineq_rhs.size()); }
};

enum class QpStatus { optimal, max_iterations, infeasible };

const char* to_string(QpStatus status);

struct QpSolution {
  Vec point;
  double objective = 0.0;
  QpStatus status = QpStatus::max_iterations;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

struct QpSettings {
  double tol = 1e-6;
  int max_iter = 20000;
  double rho = 1.0;        // initial penalty
  double sigma = 1e-6;     // proximal regularization
  double alpha = 1.6;      // over-relaxation
  int check_interval = 25; // residual / penalty-rescale cadence
  bool polish = true;      // active-set KKT refinement after convergence
};

// Operator-splitting solver with over-relaxation and a penalty that is
// rescaled every check interval when primal and dual residuals drift apart.
// Infeasibility is flagged heuristically from a stalled primal residual.
// Instances hold per-solve workspace; use one per concurrent solve.
class QpSolver {
 public:
  QpSolution solve(const QpProblem& problem, const QpSettings& settings = {});

  // Warm start from a previous point (duals cold).
  QpSolution solve(const QpProblem& problem, const Vec& warm_point,
                   const QpSettings& settings = {});

 private:
  QpSolution run(const QpProblem& problem, const QpSettings& settings,
                 const Vec* warm_point);
  void polish(const QpProblem& problem, const QpSettings& settings,
              QpSolution& sol, const Vec& y, const Mat& cons_mat,
              const Vec& cons_lb, const Vec& cons_ub) const;
};

QpSolution solve_qp(const QpProblem& problem, double tol = 1e-6,
                    int max_iter = 20000);

}  // namespace bdc
