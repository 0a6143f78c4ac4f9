#include "dfpv/bench/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "dfpv/causal/policy.hpp"
#include "dfpv/errors.hpp"

namespace dfpv::bench {

namespace {

const std::set<std::string> kKeys = {
    "dgp",     "dgp_options",  "estimators",   "baseline",   "sizes",         "n_sims",
    "base_seed", "train",      "architecture", "tune",       "tune_dfpv",     "fixed_centers",
    "policies", "ope_truth_mc", "output_dir",  "record_wall_time", "save_models", "threads"};

std::vector<two_stage::LambdaPair> parse_tune(const nlohmann::json& t) {
  if (t.is_boolean()) {
    if (!t.get<bool>()) return {};
    return two_stage::default_lambda_grid();
  }
  std::vector<two_stage::LambdaPair> grid;
  if (t.is_array()) {
    for (const auto& p : t) {
      if (!p.is_array() || p.size() != 2) throw InvalidArgument("config: tune entries must be [lambda1, lambda2]");
      grid.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  } else if (t.is_object()) {
    for (const auto& [k, v] : t.items())
      if (k != "lambda1" && k != "lambda2") throw InvalidArgument("config: unknown key tune." + k);
    const auto l1 = t.at("lambda1").get<std::vector<double>>();
    const auto l2 = t.at("lambda2").get<std::vector<double>>();
    for (double a : l1)
      for (double b : l2) grid.push_back({a, b});
  } else {
    throw InvalidArgument("config: tune must be true, a list of [lambda1, lambda2] pairs or {lambda1, lambda2}");
  }
  return grid;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (estimators.empty()) throw InvalidArgument("config: estimators must name at least one of dfpv, fixed_feature");
  for (auto e : estimators)
    if (e == EstimatorKind::direct_ridge)
      throw InvalidArgument("config: direct_ridge is the built-in baseline; toggle it with 'baseline'");
  if (std::set<EstimatorKind>(estimators.begin(), estimators.end()).size() != estimators.size())
    throw InvalidArgument("config: duplicate estimator");
  if (sizes.empty()) throw InvalidArgument("config: sizes must be nonempty");
  for (auto n : sizes)
    if (n < 2) throw InvalidArgument("config: every size must be >= 2");
  if (n_sims == 0) throw InvalidArgument("config: n_sims must be >= 1");
  if (threads == 0) throw InvalidArgument("config: threads must be >= 1");
  if (fixed_centers == 0) throw InvalidArgument("config: fixed_centers must be >= 1");
  if (output_dir.empty()) throw InvalidArgument("config: output_dir must be nonempty");
  train.validate();
  architecture.validate();
  if (tune) {
    if (tune->empty()) throw InvalidArgument("config: tune grid is empty");
    for (const auto& p : *tune)
      if (!(p.lambda1 >= 0.0) || !(p.lambda2 >= 0.0)) throw InvalidArgument("config: tune lambdas must be >= 0");
  }
  if (!policies.empty()) {
    if (dgp != datagen::DgpKind::demand) throw InvalidArgument("config: policies are defined for the demand design only");
    for (const auto& p : policies) (void)causal::policy_from_name(p);
    if (ope_truth_mc < 10000) throw InvalidArgument("config: ope_truth_mc must be >= 10000");
  }
}

FitSettings ExperimentConfig::fit_settings() const {
  return FitSettings{train, architecture, tune, tune_dfpv, fixed_centers};
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  std::vector<std::string> est;
  for (auto e : c.estimators) est.push_back(to_string(e));
  j = nlohmann::json{{"dgp", datagen::to_string(c.dgp)},
                     {"dgp_options", c.dgp_options},
                     {"estimators", est},
                     {"baseline", c.baseline},
                     {"sizes", c.sizes},
                     {"n_sims", c.n_sims},
                     {"base_seed", c.base_seed},
                     {"train", c.train},
                     {"architecture", c.architecture},
                     {"tune_dfpv", c.tune_dfpv},
                     {"fixed_centers", c.fixed_centers},
                     {"policies", c.policies},
                     {"ope_truth_mc", c.ope_truth_mc},
                     {"output_dir", c.output_dir},
                     {"record_wall_time", c.record_wall_time},
                     {"save_models", c.save_models},
                     {"threads", c.threads}};
  if (c.tune) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& p : *c.tune) grid.push_back({p.lambda1, p.lambda2});
    j["tune"] = grid;
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be a table/object");
  for (const auto& [k, v] : j.items())
    if (!kKeys.count(k)) throw InvalidArgument("config: unknown key '" + k + "'");
  ExperimentConfig c;
  try {
    if (j.contains("dgp")) c.dgp = datagen::dgp_from_string(j.at("dgp").get<std::string>());
    if (j.contains("dgp_options")) c.dgp_options = j.at("dgp_options").get<datagen::DgpOptions>();
    if (j.contains("estimators"))
      for (const auto& e : j.at("estimators")) c.estimators.push_back(estimator_from_string(e.get<std::string>()));
    c.baseline = j.value("baseline", c.baseline);
    if (j.contains("sizes")) {
      const auto& s = j.at("sizes");
      if (s.is_array()) {
        c.sizes = s.get<std::vector<std::size_t>>();
      } else {
        c.sizes = {s.get<std::size_t>()};
      }
    }
    c.n_sims = j.value("n_sims", c.n_sims);
    c.base_seed = j.value("base_seed", c.base_seed);
    if (j.contains("train")) c.train = j.at("train").get<two_stage::TrainConfig>();
    if (j.contains("architecture")) c.architecture = j.at("architecture").get<two_stage::DfpvArchitecture>();
    if (j.contains("tune")) {
      auto grid = parse_tune(j.at("tune"));
      if (!grid.empty()) c.tune = std::move(grid);
    }
    c.tune_dfpv = j.value("tune_dfpv", c.tune_dfpv);
    c.fixed_centers = j.value("fixed_centers", c.fixed_centers);
    if (j.contains("policies")) c.policies = j.at("policies").get<std::vector<std::string>>();
    c.ope_truth_mc = j.value("ope_truth_mc", c.ope_truth_mc);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
    c.save_models = j.value("save_models", c.save_models);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json load_config_document(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InvalidArgument("config file not found: " + path);
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (std::filesystem::path(path).extension() == ".toml") {
    try {
      const toml::table tbl = toml::parse(buf.str(), path);
      std::stringstream js;
      js << toml::json_formatter{tbl};
      return nlohmann::json::parse(js.str());
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << "config: TOML parse error in " << path << ": " << e.description() << " at line "
          << e.source().begin.line;
      throw InvalidArgument(msg.str());
    }
  }
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config: JSON parse error in " + path + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(load_config_document(path)); }

}  // namespace dfpv::bench
