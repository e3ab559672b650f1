#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bdc/model.hpp"
#include "helpers.hpp"

using namespace bdc;
using testing::make_model;
using testing::vec;

TEST_SUITE_BEGIN("model");

TEST_CASE("deterministic coulomb counting") {
  SystemModel model = make_model({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}, 0.0, 1e-3);
  RngStream rng(1);

  TrueState rest{vec({0.05, 0.05, 0.05})};
  TrueState stepped = step_truth(model, rest, Vec::Zero(3), rng);
  CHECK(stepped.soc.isApprox(rest.soc));

  SystemModel scalar = make_model({{0.0, 1.0}}, 0.0, 1e-3);
  TrueState s0{vec({0.2})};
  CHECK(step_truth(scalar, s0, vec({0.1}), rng).soc[0] == doctest::Approx(0.3));

  TrueState high{vec({0.9})};
  CHECK(step_truth(scalar, high, vec({0.5}), rng).soc[0] == doctest::Approx(1.0));
  TrueState low{vec({0.1})};
  CHECK(step_truth(scalar, low, vec({-0.5}), rng).soc[0] == doctest::Approx(0.0));
}

TEST_CASE("input bound violation is a contract error") {
  SystemModel model = make_model({{0.0, 1.0}}, 0.0, 1e-3);
  RngStream rng(2);
  TrueState s{vec({0.5})};
  CHECK_THROWS_AS(step_truth(model, s, vec({1.5}), rng), std::invalid_argument);
  CHECK_NOTHROW(step_truth(model, s, vec({1.0 + 1e-10}), rng));
}

TEST_CASE("truth always stays in [0,1]") {
  SystemModel model = make_model({{3.0, 0.7, 0.05}, {3.088868, 0.8738, -1.89, 1.5}}, 0.3,
                                 1e-3);
  RngStream rng(3);
  TrueState s{vec({0.5, 0.5})};
  for (int k = 0; k < 500; ++k) {
    Vec input = vec({std::sin(0.1 * k), std::cos(0.2 * k)});
    s = step_truth(model, s, input, rng);
    CHECK(s.soc.minCoeff() >= 0.0);
    CHECK(s.soc.maxCoeff() <= 1.0);
  }
}

TEST_CASE("noiseless observation") {
  SystemModel identity = make_model({{0.0, 1.0}, {0.0, 1.0}}, 0.0, 1e-12);
  RngStream rng(4);
  TrueState s{vec({0.4, 0.6})};
  Vec y = observe_with(identity, s, Vec::Zero(2));
  CHECK(y[0] == doctest::Approx(0.4));
  CHECK(y[1] == doctest::Approx(0.6));
  (void)rng;

  SystemModel poly = make_model({{1.0, 2.0, 3.0}}, 0.0, 1e-12);
  CHECK(observe_with(poly, TrueState{vec({0.5})}, Vec::Zero(1))[0] ==
        doctest::Approx(2.75));
}

TEST_CASE("observation noise has the configured scale") {
  // law of large numbers: the sample mean of 1e5 draws stays within
  // 3*sqrt(var/n) of h(soc)
  const double var = 0.1;
  SystemModel model = make_model({{1.0, 2.0, 3.0}}, 0.0, var);
  TrueState s{vec({0.5})};
  RngStream rng(20240817);
  const int draws = 100000;
  double acc = 0.0;
  for (int k = 0; k < draws; ++k) acc += observe(model, s, rng)[0];
  double mean = acc / draws;
  CHECK(std::abs(mean - 2.75) <= 3.0 * std::sqrt(var / draws));
}

TEST_CASE("deterministic plant repeats exactly") {
  SystemModel model = make_model({{3.0, 0.7, 0.05}}, 0.0, 1e-9);
  RngStream rng_a(5), rng_b(5);
  TrueState s{vec({0.3})};
  Vec input = vec({0.25});
  TrueState a = step_truth(model, s, input, rng_a);
  TrueState b = step_truth(model, s, input, rng_b);
  CHECK(a.soc == b.soc);
  CHECK(observe(model, a, rng_a) == observe(model, b, rng_b));
}

TEST_CASE("model validation") {
  auto curve = std::vector<double>{0.0, 1.0};
  std::vector<BatteryParams> bad_eta{{1.5, 1.0, -1.0, 1.0, OcvCurve{curve}}};
  CHECK_THROWS_AS(SystemModel(bad_eta, 1.0, vec({0.1}), vec({0.1})),
                  std::invalid_argument);
  std::vector<BatteryParams> bad_bounds{{1.0, 1.0, 1.0, -1.0, OcvCurve{curve}}};
  CHECK_THROWS_AS(SystemModel(bad_bounds, 1.0, vec({0.1}), vec({0.1})),
                  std::invalid_argument);
  std::vector<BatteryParams> ok{{1.0, 2.0, -1.0, 1.0, OcvCurve{curve}}};
  CHECK_THROWS_AS(SystemModel(ok, 1.0, vec({-0.1}), vec({0.1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(SystemModel(ok, 1.0, vec({0.1}), vec({0.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(SystemModel(ok, 0.0, vec({0.1}), vec({0.1})),
                  std::invalid_argument);
  SystemModel model(ok, 0.5, vec({0.1}), vec({0.1}));
  CHECK(model.gains()[0] == doctest::Approx(0.25));  // eta*dt/q_nom
}

TEST_SUITE_END();
