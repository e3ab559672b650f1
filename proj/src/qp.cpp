#include "bdc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bdc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Vec& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

void validate(const QpProblem& p) {
  const int m = p.num_vars();
  if (p.hess.rows() != m || p.hess.cols() != m)
    throw std::invalid_argument("qp: Hessian dimension mismatch");
  if ((p.hess - p.hess.transpose()).lpNorm<Eigen::Infinity>() > 1e-10)
    throw std::invalid_argument("qp: Hessian not symmetric");
  if (p.lower.size() != m || p.upper.size() != m)
    throw std::invalid_argument("qp: bound dimension mismatch");
  for (int i = 0; i < m; ++i)
    if (!(p.lower[i] <= p.upper[i]))
      throw std::invalid_argument("qp: lower bound exceeds upper bound");
  if (p.ineq_mat.rows() != p.ineq_rhs.size() ||
      (p.num_ineq() > 0 && p.ineq_mat.cols() != m))
    throw std::invalid_argument("qp: inequality dimension mismatch");
}

}  // namespace

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::max_iterations: return "max-iterations";
    case QpStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

QpSolution QpSolver::solve(const QpProblem& problem, const QpSettings& settings) {
  return run(problem, settings, nullptr);
}

QpSolution QpSolver::solve(const QpProblem& problem, const Vec& warm_point,
                           const QpSettings& settings) {
  return run(problem, settings, &warm_point);
}

QpSolution QpSolver::run(const QpProblem& problem, const QpSettings& settings,
                         const Vec* warm_point) {
  validate(problem);
  const int m = problem.num_vars();
  const int p = problem.num_ineq();
  const int rows = p + m;

  // Stack general inequalities above the box: l <= Cx <= u.
  Mat cons(rows, m);
  if (p > 0) cons.topRows(p) = problem.ineq_mat;
  cons.bottomRows(m) = Mat::Identity(m, m);
  Vec lb(rows), ub(rows);
  lb.head(p).setConstant(-kInf);
  ub.head(p) = problem.ineq_rhs;
  lb.tail(m) = problem.lower;
  ub.tail(m) = problem.upper;

  const Mat ctc = cons.transpose() * cons;

  double rho = settings.rho;
  auto factor = [&](double r) {
    Mat kkt = problem.hess + settings.sigma * Mat::Identity(m, m) + r * ctc;
    return Eigen::LLT<Mat>(kkt);
  };
  Eigen::LLT<Mat> kkt = factor(rho);
  if (kkt.info() != Eigen::Success)
    throw std::runtime_error("qp: KKT factorization failed");

  Vec x = warm_point ? clamp_to(*warm_point, problem.lower, problem.upper)
                     : clamp_to(Vec::Zero(m), problem.lower, problem.upper);
  Vec z = clamp_to(cons * x, lb, ub);
  Vec y = Vec::Zero(rows);

  QpSolution sol;
  double best_primal = kInf;
  double window_best = kInf;
  int window_start = 0;
  const int stall_window = 40 * settings.check_interval;
  const double stall_level = std::max(1e3 * settings.tol, 1e-7);

  int iter = 0;
  while (iter < settings.max_iter) {
    for (int inner = 0; inner < settings.check_interval && iter < settings.max_iter;
         ++inner, ++iter) {
      Vec rhs = settings.sigma * x - problem.grad + cons.transpose() * (rho * z - y);
      Vec xt = kkt.solve(rhs);
      Vec zt = cons * xt;
      x = settings.alpha * xt + (1.0 - settings.alpha) * x;
      Vec v = settings.alpha * zt + (1.0 - settings.alpha) * z + y / rho;
      Vec z_next = clamp_to(v, lb, ub);
      y = rho * (v - z_next);
      z = std::move(z_next);
    }

    Vec cx = cons * x;
    double r_primal = inf_norm(cx - z);
    double r_dual = inf_norm(problem.hess * x + problem.grad + cons.transpose() * y);

    if (r_primal <= settings.tol && r_dual <= settings.tol) {
      sol.point = x;
      sol.status = QpStatus::optimal;
      sol.primal_residual = r_primal;
      sol.dual_residual = r_dual;
      sol.iterations = iter;
      if (settings.polish) polish(problem, settings, sol, y, cons, lb, ub);
      sol.objective = 0.5 * sol.point.dot(problem.hess * sol.point) +
                      problem.grad.dot(sol.point);
      return sol;
    }

    // Stalled primal residual above threshold for a whole window reads as
    // infeasible: a feasible problem keeps improving between snapshots.
    best_primal = std::min(best_primal, r_primal);
    if (iter - window_start >= stall_window) {
      if (best_primal > stall_level && best_primal > 0.999 * window_best) {
        sol.point = x;
        sol.status = QpStatus::infeasible;
        sol.primal_residual = r_primal;
        sol.dual_residual = r_dual;
        sol.iterations = iter;
        sol.objective = 0.5 * x.dot(problem.hess * x) + problem.grad.dot(x);
        return sol;
      }
      window_best = best_primal;
      window_start = iter;
    }

    // Penalty rebalancing on scaled residuals.
    double p_scale = std::max({inf_norm(cx), inf_norm(z), 1e-6});
    double d_scale = std::max({inf_norm(problem.hess * x), inf_norm(problem.grad),
                               inf_norm(cons.transpose() * y), 1e-6});
    double ratio = std::sqrt((r_primal / p_scale) / std::max(r_dual / d_scale, 1e-16));
    if (ratio > 5.0 || ratio < 0.2) {
      double next = std::clamp(rho * ratio, 1e-6, 1e6);
      if (next > 1.01 * rho || next < rho / 1.01) {
        rho = next;
        kkt = factor(rho);
        if (kkt.info() != Eigen::Success)
          throw std::runtime_error("qp: KKT refactorization failed");
      }
    }
  }

  Vec cx = cons * x;
  sol.point = x;
  sol.status = QpStatus::max_iterations;
  sol.primal_residual = inf_norm(cx - z);
  sol.dual_residual = inf_norm(problem.hess * x + problem.grad + cons.transpose() * y);
  sol.iterations = iter;
  sol.objective = 0.5 * x.dot(problem.hess * x) + problem.grad.dot(x);
  return sol;
}

void QpSolver::polish(const QpProblem& problem, const QpSettings& settings,
                      QpSolution& sol, const Vec& y, const Mat& cons_mat,
                      const Vec& cons_lb, const Vec& cons_ub) const {
  const int m = problem.num_vars();
  const int rows = static_cast<int>(cons_mat.rows());
  const double y_thresh = 1e-9 * std::max(1.0, inf_norm(y));

  std::vector<int> active;
  std::vector<double> bound;
  for (int i = 0; i < rows; ++i) {
    if (y[i] > y_thresh && std::isfinite(cons_ub[i])) {
      active.push_back(i);
      bound.push_back(cons_ub[i]);
    } else if (y[i] < -y_thresh && std::isfinite(cons_lb[i])) {
      active.push_back(i);
      bound.push_back(cons_lb[i]);
    }
  }

  const int k = static_cast<int>(active.size());
  Mat kkt = Mat::Zero(m + k, m + k);
  kkt.topLeftCorner(m, m) = problem.hess + 1e-9 * Mat::Identity(m, m);
  for (int a = 0; a < k; ++a) {
    kkt.block(m + a, 0, 1, m) = cons_mat.row(active[a]);
    kkt.block(0, m + a, m, 1) = cons_mat.row(active[a]).transpose();
    kkt(m + a, m + a) = -1e-9;
  }
  Vec rhs(m + k);
  rhs.head(m) = -problem.grad;
  for (int a = 0; a < k; ++a) rhs[m + a] = bound[a];

  Eigen::PartialPivLU<Mat> lu(kkt);
  Vec sol_vec = lu.solve(rhs);
  sol_vec += lu.solve(rhs - kkt * sol_vec);  // one refinement step

  Vec x_pol = sol_vec.head(m);
  Vec y_pol = Vec::Zero(rows);
  for (int a = 0; a < k; ++a) y_pol[active[a]] = sol_vec[m + a];

  Vec cx = cons_mat * x_pol;
  double r_primal = inf_norm(cx - clamp_to(cx, cons_lb, cons_ub));
  double r_dual =
      inf_norm(problem.hess * x_pol + problem.grad + cons_mat.transpose() * y_pol);

  if (r_primal <= std::max(sol.primal_residual, settings.tol) &&
      r_dual <= std::max(sol.dual_residual, settings.tol)) {
    sol.point = std::move(x_pol);
    sol.primal_residual = r_primal;
    sol.dual_residual = r_dual;
  }
}

QpSolution solve_qp(const QpProblem& problem, double tol, int max_iter) {
  QpSettings settings;
  settings.tol = tol;
  settings.max_iter = max_iter;
  QpSolver solver;
  return solver.solve(problem, settings);
}

}  // namespace bdc
