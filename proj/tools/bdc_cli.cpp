#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bdc/config_io.hpp"
#include "bdc/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

int default_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void print_arm(const char* name, const bdc::ArmSummary& arm) {
  std::printf("%-10s cost %10.3f (var %10.3f)  est_error %8.4f  cov_trace %8.4f  step %8.2f ms\n",
              name, arm.cost.mean(), arm.cost.variance(), arm.est_error.mean(),
              arm.cov_trace.mean(), arm.step_ms.mean());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Battery SOC dual-control experiments"};

  std::string config_path;
  std::string controller;
  std::string out_dir = "results";
  int runs = -1, horizon = -1, candidates = -1, steps = -1, threads = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;
  bool trace = false;

  app.add_option("--config", config_path, "experiment JSON config")->required();
  app.add_option("--runs", runs, "Monte Carlo runs per arm");
  app.add_option("--controller", controller, "linear-mpc | dual | both");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--horizon", horizon, "prediction horizon N");
  app.add_option("--candidates", candidates, "candidate trajectories L");
  app.add_option("--steps", steps, "closed-loop steps T");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_flag("--trace", trace, "write per-step trace_<run>.csv files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  have_seed = seed_opt->count() > 0;

  std::optional<bdc::ExperimentConfig> cfg_opt;
  try {
    auto c = bdc::load_experiment_config(config_path);
    if (runs > 0) c.runs = runs;
    if (steps > 0) c.steps = steps;
    if (candidates > 0) c.dual.num_candidates = candidates;
    if (horizon > 0) {
      c.cost.horizon = horizon;
      c.dual.horizon = horizon;
      c.dual.cost.horizon = horizon;
    }
    if (have_seed) c.seed = seed;
    if (!controller.empty()) {
      if (controller == "linear-mpc") c.mode = bdc::ControllerMode::linear_mpc;
      else if (controller == "dual") c.mode = bdc::ControllerMode::dual;
      else if (controller == "both") c.mode = bdc::ControllerMode::both;
      else throw bdc::ConfigError("unknown controller: " + controller);
    }
    c.validate();
    cfg_opt.emplace(std::move(c));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
  const bdc::ExperimentConfig& cfg = *cfg_opt;

  try {
    if (threads <= 0) threads = default_threads();

    std::filesystem::create_directories(out_dir);
    bdc::McSummary summary = bdc::run_monte_carlo(cfg, threads);

    std::filesystem::path out(out_dir);
    bdc::write_runs_csv((out / "runs.csv").string(), summary);
    bdc::write_summary_json((out / "summary.json").string(), summary);
    if (trace) {
      for (int r = 0; r < cfg.runs; ++r)
        bdc::write_trace_csv((out / ("trace_" + std::to_string(r) + ".csv")).string(),
                             summary, r);
    }

    std::printf("%d runs, seed %llu -> %s\n", cfg.runs,
                static_cast<unsigned long long>(cfg.seed), out_dir.c_str());
    if (summary.linear) print_arm("linear-mpc", *summary.linear);
    if (summary.dual) print_arm("dual", *summary.dual);
    if (summary.improvements) {
      std::printf("dual vs linear: cost %+.1f%%  est_error %+.1f%%  cov_trace %+.1f%%\n",
                  summary.improvements->cost_pct, summary.improvements->est_error_pct,
                  summary.improvements->cov_trace_pct);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
