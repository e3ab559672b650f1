#include "bdc/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bdc {

namespace {

constexpr std::uint64_t kPlantStream = 0x706c616e74ULL;  // "plant"
constexpr std::uint64_t kCtrlStream = 0x6374726cULL;     // "ctrl"

Vec nan_vec(int n) {
  return Vec::Constant(n, std::numeric_limits<double>::quiet_NaN());
}

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
      .count();
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct Job {
  ControllerKind arm;
  int run;
};

}  // namespace

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::linear_mpc ? "linear-mpc" : "dual";
}

void ExperimentConfig::validate() const {
  const int n = model.size();
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (init_mean.size() != n) throw std::invalid_argument("init mean dimension mismatch");
  if (init_cov.rows() != n || init_cov.cols() != n)
    throw std::invalid_argument("init covariance dimension mismatch");
  if (cost.q_cap.size() != n) throw std::invalid_argument("q_cap dimension mismatch");
  if (cost.r_weight.rows() != n || cost.r_weight.cols() != n)
    throw std::invalid_argument("r_weight dimension mismatch");
  if (cost.c < 0.0 || cost.c0 < 0.0)
    throw std::invalid_argument("cost weights must be >= 0");
  if (cost.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (cost.reference.empty()) throw std::invalid_argument("reference must be non-empty");
  for (int i = 0; i < n; ++i)
    if (!(cost.q_cap[i] > 0.0))
      throw std::invalid_argument("q_cap must have positive elements");
  if (min_eigenvalue(cost.r_weight) <= 0.0)
    throw std::invalid_argument("r_weight must be positive definite");
  if (min_eigenvalue(init_cov) < -1e-10)
    throw std::invalid_argument("init covariance must be PSD");
  if (dual.num_candidates < 1)
    throw std::invalid_argument("candidate count must be >= 1");
  if (dual.horizon != cost.horizon)
    throw std::invalid_argument("dual horizon and cost horizon differ");
  if (!(dual.qp_tol > 0.0)) throw std::invalid_argument("qp tolerance must be > 0");
}

RunRecord run_closed_loop(const ExperimentConfig& cfg, ControllerKind arm,
                          int run_index, int controller_threads) {
  const int n = cfg.model.size();
  const int T = cfg.steps;

  // The plant stream is arm-independent so paired runs share noise draws.
  RngStream plant(mix_seed(cfg.seed, static_cast<std::uint64_t>(run_index),
                           kPlantStream));

  TrueState truth{clamp01(cfg.init_mean + psd_sqrt(cfg.init_cov) * plant.normal_vec(n))};
  Belief belief{cfg.init_mean, cfg.init_cov};

  RunRecord rec;
  rec.steps.resize(static_cast<std::size_t>(T) + 1);

  std::vector<TrueState> truth_traj;
  std::vector<Vec> applied;
  truth_traj.reserve(static_cast<std::size_t>(T) + 1);
  applied.reserve(static_cast<std::size_t>(T) + 1);

  for (int k = 0; k <= T; ++k) {
    StepLog& log = rec.steps[static_cast<std::size_t>(k)];
    log.truth = truth.soc;
    log.estimate = belief.mean;
    log.cov_trace = belief.cov.trace();
    if (k == 0) log.measurement = nan_vec(n);  // no measurement before the first action

    double t0 = now_ms();
    ControlPlan plan;
    if (arm == ControllerKind::linear_mpc) {
      plan = solve_linear_mpc(cfg.model, belief.mean, cfg.dual);
    } else {
      std::uint64_t step_seed =
          mix_seed(cfg.seed, static_cast<std::uint64_t>(run_index),
                   kCtrlStream, static_cast<std::uint64_t>(k));
      plan = dual_control_step_parallel(cfg.model, cfg.dual, belief, step_seed,
                                        controller_threads);
    }
    log.step_ms = now_ms() - t0;
    log.input = plan.inputs.front();

    truth_traj.push_back(truth);
    applied.push_back(log.input);

    rec.mean_est_error += (truth.soc - belief.mean).norm();
    rec.mean_cov_trace += log.cov_trace;
    rec.mean_step_ms += log.step_ms;

    if (k == T) {
      log.w_draw = nan_vec(n);
      log.v_draw = nan_vec(n);
      break;
    }

    // Plant advances, then the measurement arrives before the next action.
    log.w_draw = draw_scaled_noise(plant, cfg.model.sigma_w_diag());
    truth = step_truth_with(cfg.model, truth, log.input, log.w_draw);
    log.v_draw = draw_scaled_noise(plant, cfg.model.sigma_v_diag());
    Vec y = observe_with(cfg.model, truth, log.v_draw);
    rec.steps[static_cast<std::size_t>(k) + 1].measurement = y;

    belief = ekf_measurement_update(
        cfg.model, ekf_time_update(cfg.model, belief, log.input), y);
  }

  rec.realized_cost = realized_cost(cfg.cost, truth_traj, applied);
  rec.mean_est_error /= T + 1;
  rec.mean_cov_trace /= T + 1;
  rec.mean_step_ms /= T + 1;
  return rec;
}

double MetricStats::mean() const {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

double MetricStats::variance() const {
  if (values.size() < 2) return 0.0;
  double m = mean();
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return acc / static_cast<double>(values.size() - 1);
}

namespace {

ArmSummary summarize(const std::vector<RunRecord>& records) {
  ArmSummary arm;
  for (const RunRecord& r : records) {
    arm.cost.values.push_back(r.realized_cost);
    arm.est_error.values.push_back(r.mean_est_error);
    arm.cov_trace.values.push_back(r.mean_cov_trace);
    arm.step_ms.values.push_back(r.mean_step_ms);
  }
  return arm;
}

McSummary gather(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  std::vector<Job> jobs;
  const bool with_linear = cfg.mode != ControllerMode::dual;
  const bool with_dual = cfg.mode != ControllerMode::linear_mpc;
  if (with_linear)
    for (int r = 0; r < cfg.runs; ++r) jobs.push_back({ControllerKind::linear_mpc, r});
  if (with_dual)
    for (int r = 0; r < cfg.runs; ++r) jobs.push_back({ControllerKind::dual, r});

  std::vector<RunRecord> results(jobs.size());
  const int job_count = static_cast<int>(jobs.size());
  if (threads > 1 && job_count > 1) {
    // Runs across the pool, candidate evaluation serial inside each job.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (int j = 0; j < job_count; ++j)
      results[static_cast<std::size_t>(j)] =
          run_closed_loop(cfg, jobs[static_cast<std::size_t>(j)].arm,
                          jobs[static_cast<std::size_t>(j)].run, 1);
  } else {
    for (int j = 0; j < job_count; ++j)
      results[static_cast<std::size_t>(j)] =
          run_closed_loop(cfg, jobs[static_cast<std::size_t>(j)].arm,
                          jobs[static_cast<std::size_t>(j)].run,
                          threads > 0 ? threads : 1);
  }

  McSummary summary;
  summary.runs = cfg.runs;
  summary.seed = cfg.seed;
  std::size_t offset = 0;
  if (with_linear) {
    summary.linear_records.assign(results.begin(),
                                  results.begin() + cfg.runs);
    summary.linear = summarize(summary.linear_records);
    offset += static_cast<std::size_t>(cfg.runs);
  }
  if (with_dual) {
    summary.dual_records.assign(results.begin() + static_cast<long>(offset),
                                results.begin() + static_cast<long>(offset) + cfg.runs);
    summary.dual = summarize(summary.dual_records);
  }
  if (summary.linear && summary.dual) {
    Improvements imp;
    imp.cost_pct = 100.0 * (summary.linear->cost.mean() - summary.dual->cost.mean()) /
                   summary.linear->cost.mean();
    imp.est_error_pct = 100.0 *
                        (summary.linear->est_error.mean() - summary.dual->est_error.mean()) /
                        summary.linear->est_error.mean();
    imp.cov_trace_pct = 100.0 *
                        (summary.linear->cov_trace.mean() - summary.dual->cov_trace.mean()) /
                        summary.linear->cov_trace.mean();
    summary.improvements = imp;
  }
  return summary;
}

}  // namespace

McSummary run_monte_carlo(const ExperimentConfig& cfg, int threads) {
  return gather(cfg, threads);
}

McSummary run_monte_carlo_serial(const ExperimentConfig& cfg) {
  return gather(cfg, 1);
}

std::string runs_csv_text(const McSummary& summary) {
  std::string out = "run,controller,cost,est_error,cov_trace,step_ms\n";
  auto emit = [&out](const std::vector<RunRecord>& records, ControllerKind kind) {
    for (std::size_t r = 0; r < records.size(); ++r) {
      out += std::to_string(r);
      out += ',';
      out += to_string(kind);
      out += ',';
      out += format_double(records[r].realized_cost, "%.17g");
      out += ',';
      out += format_double(records[r].mean_est_error, "%.17g");
      out += ',';
      out += format_double(records[r].mean_cov_trace, "%.17g");
      out += ',';
      out += format_double(records[r].mean_step_ms, "%.3f");
      out += '\n';
    }
  };
  emit(summary.linear_records, ControllerKind::linear_mpc);
  emit(summary.dual_records, ControllerKind::dual);
  return out;
}

void write_runs_csv(const std::string& path, const McSummary& summary) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << runs_csv_text(summary);
}

namespace {

nlohmann::json arm_json(const ArmSummary& arm) {
  auto stat = [](const MetricStats& s) {
    return nlohmann::json{{"mean", s.mean()}, {"var", s.variance()}};
  };
  return nlohmann::json{{"cost", stat(arm.cost)},
                        {"est_error", stat(arm.est_error)},
                        {"cov_trace", stat(arm.cov_trace)},
                        {"step_ms", stat(arm.step_ms)}};
}

}  // namespace

void write_summary_json(const std::string& path, const McSummary& summary) {
  nlohmann::json doc;
  doc["runs"] = summary.runs;
  doc["seed"] = summary.seed;
  if (summary.linear) doc["arms"]["linear-mpc"] = arm_json(*summary.linear);
  if (summary.dual) doc["arms"]["dual"] = arm_json(*summary.dual);
  if (summary.improvements) {
    doc["improvements"] = {{"cost_pct", summary.improvements->cost_pct},
                           {"est_error_pct", summary.improvements->est_error_pct},
                           {"cov_trace_pct", summary.improvements->cov_trace_pct}};
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << doc.dump(2) << '\n';
}

void write_trace_csv(const std::string& path, const McSummary& summary,
                     int run_index) {
  const std::vector<RunRecord>* sources[2] = {&summary.linear_records,
                                              &summary.dual_records};
  const ControllerKind kinds[2] = {ControllerKind::linear_mpc, ControllerKind::dual};

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);

  int n = 0;
  for (const auto* recs : sources)
    if (!recs->empty()) n = static_cast<int>((*recs)[0].steps[0].truth.size());

  f << "controller,step";
  const char* groups[] = {"truth", "est", "input", "meas", "w", "v"};
  for (const char* g : groups)
    for (int i = 0; i < n; ++i) f << ',' << g << '_' << i;
  f << ",cov_trace\n";

  for (int s = 0; s < 2; ++s) {
    const auto& recs = *sources[s];
    if (run_index >= static_cast<int>(recs.size())) continue;
    const RunRecord& rec = recs[static_cast<std::size_t>(run_index)];
    for (std::size_t k = 0; k < rec.steps.size(); ++k) {
      const StepLog& log = rec.steps[k];
      f << to_string(kinds[s]) << ',' << k;
      const Vec* vecs[] = {&log.truth, &log.estimate, &log.input,
                           &log.measurement, &log.w_draw, &log.v_draw};
      for (const Vec* v : vecs)
        for (int i = 0; i < n; ++i) f << ',' << format_double((*v)[i], "%.17g");
      f << ',' << format_double(log.cov_trace, "%.17g") << '\n';
    }
  }
}

}  // namespace bdc
