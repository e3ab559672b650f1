#include <doctest.h>

#include <cmath>

#include "bdc/mpc.hpp"
#include "helpers.hpp"

using namespace bdc;
using testing::make_model;
using testing::mat1;
using testing::vec;

namespace {

DualControlConfig make_cfg(int n, double c, double c0, double r_diag, int horizon,
                           double reference = 1.0, int candidates = 1) {
  DualControlConfig cfg;
  cfg.num_candidates = candidates;
  cfg.horizon = horizon;
  cfg.cost.c = c;
  cfg.cost.c0 = c0;
  cfg.cost.q_cap = Vec::Ones(n);
  cfg.cost.r_weight = r_diag * Mat::Identity(n, n);
  cfg.cost.reference = {reference};
  cfg.cost.horizon = horizon;
  return cfg;
}

double max_input_gap(const ControlPlan& a, const ControlPlan& b) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.inputs.size(); ++k)
    gap = std::max(gap, (a.inputs[k] - b.inputs[k]).lpNorm<Eigen::Infinity>());
  return gap;
}

}  // namespace

TEST_SUITE_BEGIN("mpc");

TEST_CASE("dominant effort weight keeps the inputs at zero") {
  SystemModel model = make_model({{0.0, 1.0}}, 0.0, 0.1);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 1e4, 4, 0.5);
  ControlPlan plan = solve_linear_mpc(model, vec({0.5}), cfg);
  for (const Vec& u : plan.inputs) CHECK(std::abs(u[0]) < 1e-4);
}

TEST_CASE("two-variable plan matches a brute-force scan") {
  // n=1, N=1: J = (x0-1)^2 + (x0+I0-1)^2 + 0.1 (I0^2 + I1^2)
  SystemModel model = make_model({{0.0, 1.0}}, 0.0, 0.1, 10.0);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.1, 1);
  ControlPlan plan = solve_linear_mpc(model, vec({0.05}), cfg);

  double best = 1e300, best_i0 = 0.0, best_i1 = 0.0;
  double lo0 = -2.0, hi0 = 2.0, lo1 = -2.0, hi1 = 2.0;
  for (int level = 0; level < 3; ++level) {
    double cur = best;
    double c0 = best_i0, c1 = best_i1;
    for (int i = 0; i <= 200; ++i)
      for (int j = 0; j <= 200; ++j) {
        double i0 = lo0 + (hi0 - lo0) * i / 200.0;
        double i1 = lo1 + (hi1 - lo1) * j / 200.0;
        double x1 = 0.05 + i0;
        if (x1 < 0.0 || x1 > 1.0) continue;
        double obj = std::pow(0.05 - 1.0, 2) + std::pow(x1 - 1.0, 2) +
                     0.1 * (i0 * i0 + i1 * i1);
        if (obj < cur) {
          cur = obj;
          c0 = i0;
          c1 = i1;
        }
      }
    best = cur;
    double p0 = (hi0 - lo0) / 200.0, p1 = (hi1 - lo1) / 200.0;
    lo0 = c0 - 2 * p0; hi0 = c0 + 2 * p0;
    lo1 = c1 - 2 * p1; hi1 = c1 + 2 * p1;
    best_i0 = c0; best_i1 = c1;
  }

  CHECK(plan.inputs[0][0] == doctest::Approx(best_i0).epsilon(1e-3));
  CHECK(plan.inputs[1][0] == doctest::Approx(best_i1).epsilon(1e-3));
  CHECK(plan.inputs[0][0] == doctest::Approx(1.9 / 2.2).epsilon(1e-4));
}

TEST_CASE("unreachable reference saturates the state rows") {
  SystemModel model = make_model({{0.0, 1.0}}, 0.0, 0.1);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.01, 3, 2.0);
  ControlPlan plan = solve_linear_mpc(model, vec({0.3}), cfg);
  CHECK(plan.predicted_means.back()[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("infeasible input window propagates as QpError") {
  // charging-only bounds force the state past 1 within two steps
  std::vector<BatteryParams> batteries{
      {1.0, 1.0, 0.5, 1.0, OcvCurve{{0.0, 1.0}}}};
  SystemModel model(batteries, 1.0, vec({0.0}), vec({0.1}));
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.1, 3, 0.5);
  CHECK_THROWS_AS(solve_linear_mpc(model, vec({0.5}), cfg), QpError);

  ControlPlan nominal;
  nominal.inputs.assign(4, vec({0.5}));
  nominal.predicted_means.assign(4, vec({0.5}));
  std::vector<Mat> frozen(4, mat1(0.0));
  Belief init{vec({0.5}), mat1(0.0)};
  CHECK_FALSE(lpv_candidate(model, cfg, init, nominal, frozen).has_value());
}

TEST_CASE("zero frozen covariance and zero uniformity reduce to linear MPC") {
  SystemModel model = make_model({{3.0, 0.7, 0.05}}, 0.1, 0.1);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.1, 5);
  Vec x0 = vec({0.2});
  ControlPlan linear = solve_linear_mpc(model, x0, cfg);
  std::vector<Mat> frozen(6, mat1(0.0));
  Belief init{x0, mat1(0.0)};
  auto lpv = lpv_candidate(model, cfg, init, linear, frozen);
  REQUIRE(lpv.has_value());
  CHECK(max_input_gap(*lpv, linear) <= 10.0 * cfg.qp_tol);
}

TEST_CASE("identical batteries from a symmetric state get identical inputs") {
  SystemModel model =
      make_model({{3.088868, 0.8738, -1.89, 1.5}, {3.088868, 0.8738, -1.89, 1.5}},
                 0.1, 0.1);
  DualControlConfig cfg = make_cfg(2, 1.0, 1.0, 0.1, 4);
  Vec x0 = vec({0.2, 0.2});
  ControlPlan nominal = solve_linear_mpc(model, x0, cfg);
  std::vector<Mat> frozen(5, 0.3 * Mat::Identity(2, 2));
  Belief init{x0, 0.3 * Mat::Identity(2, 2)};
  auto lpv = lpv_candidate(model, cfg, init, nominal, frozen);
  REQUIRE(lpv.has_value());
  for (const Vec& u : lpv->inputs) CHECK(std::abs(u[0] - u[1]) < 1e-6);
}

TEST_CASE("shifting the frozen covariances moves the score, not the argmin") {
  SystemModel model = make_model({{3.0, 0.7, 0.05}, {3.088868, 0.8738, -1.89, 1.5}},
                                 0.1, 0.1);
  DualControlConfig cfg = make_cfg(2, 1.0, 1.0, 0.1, 4);
  Vec x0 = vec({0.3, 0.5});
  ControlPlan nominal = solve_linear_mpc(model, x0, cfg);
  Belief init{x0, 0.2 * Mat::Identity(2, 2)};

  std::vector<Mat> base(5, 0.2 * Mat::Identity(2, 2));
  Mat shift(2, 2);
  shift << 0.4, 0.1, 0.1, 0.3;
  std::vector<Mat> shifted;
  for (const Mat& m : base) shifted.push_back(m + shift);

  auto a = lpv_candidate(model, cfg, init, nominal, base);
  auto b = lpv_candidate(model, cfg, init, nominal, shifted);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());

  CHECK(max_input_gap(*a, *b) <= 10.0 * cfg.qp_tol);
  double expected_shift =
      5.0 * (cfg.cost.c * cfg.cost.q_cap.dot(shift * cfg.cost.q_cap) +
             cfg.cost.c0 * pair_covariance_sum(shift));
  CHECK(*b->surrogate_value - *a->surrogate_value ==
        doctest::Approx(expected_shift).epsilon(1e-6));
}

TEST_CASE("zero belief covariance collapses every candidate to the nominal") {
  SystemModel model = make_model({{3.088868, 0.8738, -1.89, 1.5}}, 0.1, 0.1);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.1, 5);
  Belief belief{vec({0.2}), mat1(0.0)};

  cfg.num_candidates = 1;
  ControlPlan one = dual_control_step(model, cfg, belief, 77);
  cfg.num_candidates = 9;
  ControlPlan many = dual_control_step(model, cfg, belief, 77);
  CHECK(max_input_gap(one, many) == 0.0);

  // with no uniformity term this is the linear MPC plan
  ControlPlan linear = solve_linear_mpc(model, belief.mean, cfg);
  CHECK(max_input_gap(many, linear) <= 10.0 * cfg.qp_tol);
}

TEST_CASE("dual step is deterministic in the seed") {
  SystemModel model = make_model({{3.0, 0.7, 0.05}, {3.088868, 0.8738, -1.89, 1.5}},
                                 0.1, 0.1);
  DualControlConfig cfg = make_cfg(2, 1.0, 1.0, 0.1, 4, 1.0, 12);
  Belief belief{vec({0.1, 0.2}), 0.4 * Mat::Identity(2, 2)};

  DualStepReport a = dual_control_step_report(model, cfg, belief, 123);
  DualStepReport b = dual_control_step_report(model, cfg, belief, 123);
  CHECK(a.winner == b.winner);
  CHECK(a.scores == b.scores);
  CHECK(max_input_gap(a.plan, b.plan) == 0.0);

  DualStepReport c = dual_control_step_report(model, cfg, belief, 124);
  CHECK(a.scores != c.scores);
}

TEST_CASE("reported score is the minimum over feasible candidates") {
  SystemModel model = make_model({{3.088868, 0.8738, -1.89, 1.5}}, 0.1, 0.1);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.1, 6, 0.6, 15);
  Belief belief{vec({0.3}), mat1(0.5)};

  DualStepReport report = dual_control_step_report(model, cfg, belief, 5);
  REQUIRE(report.winner >= 0);
  double best = 1e300;
  for (std::size_t i = 0; i < report.scores.size(); ++i)
    if (report.feasible[i]) best = std::min(best, report.scores[i]);
  CHECK(*report.plan.surrogate_value == best);
  CHECK(report.scores[static_cast<std::size_t>(report.winner)] == best);
}

TEST_CASE("returned inputs respect the bounds exactly") {
  SystemModel model = make_model({{0.0, 1.0}}, 0.1, 0.1, 0.3);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.001, 4, 5.0, 8);
  Belief belief{vec({0.1}), mat1(0.3)};
  DualStepReport report = dual_control_step_report(model, cfg, belief, 9);
  for (const Vec& u : report.plan.inputs) {
    CHECK(u[0] <= 0.3);
    CHECK(u[0] >= -0.3);
  }
  // the reference is unreachable, so the first inputs sit on the bound
  CHECK(report.plan.inputs[0][0] == 0.3);
}

TEST_CASE("probing lowers the terminal covariance on a flat-then-steep curve") {
  // flat below the operating point, steep above it: h' = 0.02 + 2 s^6
  std::vector<double> coeffs{3.0, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0 / 7.0};
  SystemModel model = make_model({coeffs}, 0.05, 0.1);
  DualControlConfig cfg = make_cfg(1, 1.0, 0.0, 0.1, 8, 0.5, 35);
  Belief belief{vec({0.5}), mat1(0.5)};

  ControlPlan linear = solve_linear_mpc(model, belief.mean, cfg);
  double linear_terminal =
      prediction_only_rollout(model, belief, linear.inputs).covs.back().trace();

  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ControlPlan plan = dual_control_step(model, cfg, belief, seed);
    double terminal =
        prediction_only_rollout(model, belief, plan.inputs).covs.back().trace();
    if (terminal <= linear_terminal + 1e-12) ++wins;
  }
  CHECK(wins >= 80);
}

TEST_SUITE_END();
