#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/causal/policy.hpp"
#include "dfpv/two_stage/dfpv.hpp"
#include "dfpv/two_stage/fixed_feature.hpp"
#include "dfpv/two_stage/tuning.hpp"

namespace dfpv::bench {

using datagen::ObservationSet;
using numkit::DenseMatrix;
using numkit::Vector;

// Ridge of Y on RBF features of A alone, ignoring the proxies; confounded by construction.
// Fitted on stage 2, with lambda picked by the outcome loss on stage 1.
struct DirectRidgeModel {
  features::RbfDictionary dict;
  Vector weights;
  double lambda = 0.0;
  double train_loss = 0.0;
  double heldout_loss = 0.0;
};

DirectRidgeModel fit_direct_ridge(const ObservationSet& data, std::size_t max_centers, std::uint64_t seed);

enum class EstimatorKind { dfpv, fixed_feature, direct_ridge };

std::string to_string(EstimatorKind k);
EstimatorKind estimator_from_string(const std::string& s);

using FittedModel = std::variant<two_stage::DfpvModel, two_stage::FixedFeatureModel, DirectRidgeModel>;

struct FitSettings {
  two_stage::TrainConfig train;
  two_stage::DfpvArchitecture arch;
  // When set, the fixed-feature lambdas are chosen on this grid; otherwise train.lambda1/2 are used.
  std::optional<std::vector<two_stage::LambdaPair>> tune_grid;
  bool tune_dfpv = false;
  std::size_t fixed_centers = 100;
};

struct FitOutcome {
  FittedModel model;
  double stage1_loss = 0.0;
  double stage2_loss = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// `seed` drives network initialization, mini-batching and dictionary subsampling.
FitOutcome fit_estimator(EstimatorKind kind, const ObservationSet& data, const FitSettings& settings,
                         std::uint64_t seed);

EstimatorKind kind_of(const FittedModel& model);
Vector predict_structural(const FittedModel& model, const DenseMatrix& grid);
double estimate_policy_value(const FittedModel& model, const causal::Policy& policy, const datagen::Split& s3);

nlohmann::json model_to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& j);

}  // namespace dfpv::bench
