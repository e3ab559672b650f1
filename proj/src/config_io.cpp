#include "bdc/config_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bdc {

namespace {

using nlohmann::json;

Vec to_vec(const json& arr, const std::string& name) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError(name + " must be a non-empty array");
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ConfigError(name + " must hold numbers");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

const json& require(const json& doc, const std::string& key,
                    const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw ConfigError("missing \"" + key + "\" in " + where);
  return *it;
}

SystemModel parse_model(const json& doc) {
  const json& batteries = require(doc, "batteries", "model");
  if (!batteries.is_array() || batteries.empty())
    throw ConfigError("model.batteries must be a non-empty array");

  std::vector<BatteryParams> params;
  for (std::size_t i = 0; i < batteries.size(); ++i) {
    const json& b = batteries[i];
    const std::string where = "battery " + std::to_string(i);
    std::vector<double> coeffs =
        require(b, "ocv_coeffs", where).get<std::vector<double>>();
    OcvCurve curve{coeffs};
    if (!curve.is_monotone())
      throw ConfigError(where + ": OCV curve is not monotone on [0,1]");
    params.push_back(BatteryParams{require(b, "eta", where).get<double>(),
                                   require(b, "q_nom", where).get<double>(),
                                   require(b, "i_min", where).get<double>(),
                                   require(b, "i_max", where).get<double>(),
                                   std::move(curve)});
  }

  try {
    return SystemModel(std::move(params), require(doc, "dt", "model").get<double>(),
                       to_vec(require(doc, "sigma_w_diag", "model"), "sigma_w_diag"),
                       to_vec(require(doc, "sigma_v_diag", "model"), "sigma_v_diag"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

CostSpec parse_cost(const json& doc, int n) {
  CostSpec cost;
  cost.c = require(doc, "c", "cost").get<double>();
  cost.c0 = require(doc, "c0", "cost").get<double>();
  cost.q_cap = to_vec(require(doc, "q_cap", "cost"), "q_cap");
  Vec r_diag = to_vec(require(doc, "r_weight_diag", "cost"), "r_weight_diag");
  if (r_diag.size() != n) throw ConfigError("r_weight_diag dimension mismatch");
  cost.r_weight = Mat(r_diag.asDiagonal());
  const json& ref = require(doc, "reference", "cost");
  if (ref.is_number())
    cost.reference = {ref.get<double>()};
  else
    cost.reference = ref.get<std::vector<double>>();
  cost.horizon = require(doc, "horizon", "cost").get<int>();
  return cost;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  SystemModel model = parse_model(require(doc, "model", "config"));
  const int n = model.size();
  CostSpec cost = parse_cost(require(doc, "cost", "config"), n);

  const json& init = require(doc, "init", "config");
  Vec init_mean = to_vec(require(init, "mean", "init"), "init.mean");
  Vec cov_diag = to_vec(require(init, "cov_diag", "init"), "init.cov_diag");

  ExperimentConfig cfg{.model = std::move(model),
                       .cost = cost,
                       .init_mean = std::move(init_mean),
                       .init_cov = Mat(cov_diag.asDiagonal()),
                       .steps = 50,
                       .runs = 100,
                       .mode = ControllerMode::both,
                       .dual = DualControlConfig{},
                       .seed = 0};

  cfg.steps = doc.value("steps", 50);
  cfg.runs = doc.value("runs", 100);
  cfg.seed = doc.value("seed", std::uint64_t{0});

  std::string controller = doc.value("controller", std::string("both"));
  if (controller == "linear-mpc")
    cfg.mode = ControllerMode::linear_mpc;
  else if (controller == "dual")
    cfg.mode = ControllerMode::dual;
  else if (controller == "both")
    cfg.mode = ControllerMode::both;
  else
    throw ConfigError("controller must be linear-mpc, dual, or both");

  cfg.dual.num_candidates = doc.value("candidates", 35);
  cfg.dual.horizon = cfg.cost.horizon;
  cfg.dual.cost = cfg.cost;
  if (doc.contains("qp")) {
    cfg.dual.qp_tol = doc["qp"].value("tol", 1e-6);
    cfg.dual.qp_max_iter = doc["qp"].value("max_iter", 20000);
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_experiment_config(buf.str());
}

}  // namespace bdc
