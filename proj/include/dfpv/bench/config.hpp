#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/bench/estimators.hpp"
#include "dfpv/datagen/dgp.hpp"

namespace dfpv::bench {

struct ExperimentConfig {
  datagen::DgpKind dgp = datagen::DgpKind::demand;
  datagen::DgpOptions dgp_options;
  std::vector<EstimatorKind> estimators;  // dfpv and/or fixed_feature
  bool baseline = true;                   // add direct_ridge reference rows
  std::vector<std::size_t> sizes;         // per-stage sample counts
  std::size_t n_sims = 20;
  std::uint64_t base_seed = 0;            // simulation i uses base_seed + i
  two_stage::TrainConfig train;
  two_stage::DfpvArchitecture architecture;
  std::optional<std::vector<two_stage::LambdaPair>> tune;
  bool tune_dfpv = false;
  std::size_t fixed_centers = 100;
  std::vector<std::string> policies;      // OPE study, demand only
  std::size_t ope_truth_mc = 1000000;
  std::string output_dir = "bench_out";
  bool record_wall_time = false;          // otherwise results.csv carries 0 so reruns match byte for byte
  bool save_models = true;
  std::size_t threads = 1;

  void validate() const;
  FitSettings fit_settings() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Strict: unknown keys are rejected so typos do not silently fall back to defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);

// TOML when the extension is .toml, JSON otherwise. Missing file -> InvalidArgument.
ExperimentConfig load_config(const std::string& path);
nlohmann::json load_config_document(const std::string& path);

}  // namespace dfpv::bench
