#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdc/cost.hpp"
#include "bdc/estimator.hpp"
#include "bdc/model.hpp"
#include "bdc/mpc.hpp"

namespace bdc {

enum class ControllerKind { linear_mpc, dual };

const char* to_string(ControllerKind kind);

enum class ControllerMode { linear_mpc, dual, both };

struct ExperimentConfig {
  SystemModel model;
  CostSpec cost;
  Vec init_mean;  // x_{0|0}
  Mat init_cov;   // Sigma_{0|0}
  int steps = 50;  // T
  int runs = 100;  // M
  ControllerMode mode = ControllerMode::both;
  DualControlConfig dual;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// One closed-loop step as recorded for traces and the paired-noise check.
// Vectors that do not exist at a step (the measurement at k = 0, the noise
// draws at k = T) are NaN-filled.
struct StepLog {
  Vec truth;
  Vec estimate;
  Vec input;
  Vec measurement;
  Vec w_draw;
  Vec v_draw;
  double cov_trace = 0.0;
  double step_ms = 0.0;
};

struct RunRecord {
  double realized_cost = 0.0;
  double mean_est_error = 0.0;  // (1/(T+1)) sum_k |x_k - x_{k|k}|_2
  double mean_cov_trace = 0.0;  // (1/(T+1)) sum_k tr Sigma_{k|k}
  double mean_step_ms = 0.0;
  std::vector<StepLog> steps;
};

// One closed-loop simulation. The plant noise stream depends only on
// (master seed, run index), so the two controller arms of a paired run
// consume identical truth noise; controller randomness is seeded per
// (run, arm, step).
RunRecord run_closed_loop(const ExperimentConfig& cfg, ControllerKind arm,
                          int run_index, int controller_threads = 1);

struct MetricStats {
  std::vector<double> values;  // per run, length M
  double mean() const;
  double variance() const;  // sample variance, M - 1 denominator
};

struct ArmSummary {
  MetricStats cost;
  MetricStats est_error;
  MetricStats cov_trace;
  MetricStats step_ms;
};

struct Improvements {
  double cost_pct = 0.0;  // 100 * (linear - dual) / linear
  double est_error_pct = 0.0;
  double cov_trace_pct = 0.0;
};

struct McSummary {
  int runs = 0;
  std::uint64_t seed = 0;
  std::optional<ArmSummary> linear;
  std::optional<ArmSummary> dual;
  std::optional<Improvements> improvements;
  std::vector<RunRecord> linear_records;  // kept for traces
  std::vector<RunRecord> dual_records;
};

// Paired Monte Carlo over the configured arms. Runs are independent jobs;
// `threads` > 1 schedules them across an OpenMP pool with results gathered
// in run order, so the summary does not depend on the thread count.
McSummary run_monte_carlo(const ExperimentConfig& cfg, int threads = 1);

// Serial reference for the job loop above.
McSummary run_monte_carlo_serial(const ExperimentConfig& cfg);

// Output files. runs.csv columns: run,controller,cost,est_error,cov_trace,step_ms.
void write_runs_csv(const std::string& path, const McSummary& summary);
void write_summary_json(const std::string& path, const McSummary& summary);
void write_trace_csv(const std::string& path, const McSummary& summary,
                     int run_index);

std::string runs_csv_text(const McSummary& summary);

}  // namespace bdc
