// Serial vs OpenMP comparison for the two parallel kernels: candidate
// evaluation inside one dual-control step, and whole Monte Carlo runs.
#include <chrono>
#include <cstdio>
#include <functional>

#include "bdc/config_io.hpp"
#include "bdc/harness.hpp"
#include "bdc/mpc.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  auto t1 = clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path = argc > 1 ? argv[1] : "configs/paper.json";
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif

  try {
    bdc::ExperimentConfig cfg = bdc::load_experiment_config(config_path);
    bdc::Belief belief{cfg.init_mean, cfg.init_cov};

    std::printf("dual-control step: n=%d, N=%d, L=%d\n", cfg.model.size(),
                cfg.dual.horizon, cfg.dual.num_candidates);
    double serial_step = time_ms(
        [&] { bdc::dual_control_step(cfg.model, cfg.dual, belief, 7); }, 5);
    double parallel_step = time_ms(
        [&] {
          bdc::dual_control_step_parallel(cfg.model, cfg.dual, belief, 7, threads);
        },
        5);
    std::printf("  serial     %8.2f ms\n", serial_step);
    std::printf("  %d threads  %8.2f ms  (speedup %.2fx)\n", threads, parallel_step,
                serial_step / parallel_step);

    bdc::ExperimentConfig mc = cfg;
    mc.runs = 4;
    mc.steps = 10;
    mc.mode = bdc::ControllerMode::dual;
    std::printf("monte carlo: %d dual runs x %d steps\n", mc.runs, mc.steps);
    double serial_mc = time_ms([&] { bdc::run_monte_carlo_serial(mc); }, 1);
    double parallel_mc = time_ms([&] { bdc::run_monte_carlo(mc, threads); }, 1);
    std::printf("  serial     %8.2f ms\n", serial_mc);
    std::printf("  %d threads  %8.2f ms  (speedup %.2fx)\n", threads, parallel_mc,
                serial_mc / parallel_mc);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
