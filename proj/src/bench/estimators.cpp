#include "dfpv/bench/estimators.hpp"

#include <limits>

#include <nlohmann/json.hpp>

#include "dfpv/causal/structural.hpp"
#include "dfpv/errors.hpp"
#include "dfpv/two_stage/ridge.hpp"

namespace dfpv::bench {

namespace {

const double kRidgeGrid[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};

double mean_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace

DirectRidgeModel fit_direct_ridge(const ObservationSet& data, std::size_t max_centers, std::uint64_t seed) {
  data.validate();
  if (!data.stage1.has_y()) throw InvalidArgument("direct ridge: stage-1 outcomes needed to pick lambda");
  auto dict = features::make_rbf_dictionary(data.stage2.a, max_centers, seed);
  const DenseMatrix x = features::rbf_features(data.stage2.a, dict);
  const DenseMatrix x_val = features::rbf_features(data.stage1.a, dict);
  DirectRidgeModel best{dict, {}, 0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (double lam : kRidgeGrid) {
    Vector w = two_stage::fit_stage2_weights(x, data.stage2.y, lam);
    const double held = mean_sq(numkit::matvec(x_val, w), data.stage1.y);
    if (held < best.heldout_loss) {
      best.train_loss = mean_sq(numkit::matvec(x, w), data.stage2.y) + lam * numkit::squared_norm(w);
      best.weights = std::move(w);
      best.lambda = lam;
      best.heldout_loss = held;
    }
  }
  return best;
}

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::dfpv: return "dfpv";
    case EstimatorKind::fixed_feature: return "fixed_feature";
    case EstimatorKind::direct_ridge: return "direct_ridge";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "dfpv") return EstimatorKind::dfpv;
  if (s == "fixed_feature") return EstimatorKind::fixed_feature;
  if (s == "direct_ridge") return EstimatorKind::direct_ridge;
  throw InvalidArgument("unknown estimator '" + s + "' (expected dfpv, fixed_feature or direct_ridge)");
}

FitOutcome fit_estimator(EstimatorKind kind, const ObservationSet& data, const FitSettings& settings,
                         std::uint64_t seed) {
  switch (kind) {
    case EstimatorKind::dfpv: {
      two_stage::TrainConfig cfg = settings.train;
      cfg.seed = seed;
      if (settings.tune_dfpv) {
        const auto grid = settings.tune_grid ? *settings.tune_grid : two_stage::default_lambda_grid();
        const auto best = two_stage::tune_dfpv(data, cfg, settings.arch, grid).best;
        cfg.lambda1 = best.lambda1;
        cfg.lambda2 = best.lambda2;
      }
      auto m = two_stage::train_dfpv(data, cfg, settings.arch);
      const double l1 = m.final_stage1_loss, l2 = m.final_stage2_loss;
      return {std::move(m), l1, l2, cfg.lambda1, cfg.lambda2};
    }
    case EstimatorKind::fixed_feature: {
      const auto dicts = two_stage::make_fixed_dictionaries(data, settings.fixed_centers, seed);
      double l1 = settings.train.lambda1, l2 = settings.train.lambda2;
      if (settings.tune_grid) {
        const auto best = two_stage::tune_fixed_feature(data, dicts, *settings.tune_grid).best;
        l1 = best.lambda1;
        l2 = best.lambda2;
      }
      auto m = two_stage::fit_fixed_feature(data, dicts, l1, l2);
      const double s1 = m.stage1_loss, s2 = m.stage2_loss;
      return {std::move(m), s1, s2, l1, l2};
    }
    case EstimatorKind::direct_ridge: {
      auto m = fit_direct_ridge(data, settings.fixed_centers, seed);
      const double train = m.train_loss, lam = m.lambda;
      return {std::move(m), 0.0, train, 0.0, lam};
    }
  }
  throw InvalidArgument("fit_estimator: unknown estimator");
}

EstimatorKind kind_of(const FittedModel& model) {
  if (std::holds_alternative<two_stage::DfpvModel>(model)) return EstimatorKind::dfpv;
  if (std::holds_alternative<two_stage::FixedFeatureModel>(model)) return EstimatorKind::fixed_feature;
  return EstimatorKind::direct_ridge;
}

Vector predict_structural(const FittedModel& model, const DenseMatrix& grid) {
  if (const auto* r = std::get_if<DirectRidgeModel>(&model))
    return numkit::matvec(features::rbf_features(grid, r->dict), r->weights);
  const auto bridge = std::visit(
      [](const auto& m) -> causal::BridgeModel {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DirectRidgeModel>) {
          throw InvalidArgument("unreachable");
        } else {
          return causal::bridge_from(m);
        }
      },
      model);
  return causal::eval_structural(bridge.structural(), grid);
}

double estimate_policy_value(const FittedModel& model, const causal::Policy& policy, const datagen::Split& s3) {
  if (const auto* r = std::get_if<DirectRidgeModel>(&model)) {
    if (s3.size() == 0) throw InvalidArgument("estimate_policy_value: empty evaluation sample");
    const DenseMatrix& ctx = causal::context_role(policy) == causal::ContextRole::treatment ? s3.a : s3.z;
    DenseMatrix actions(s3.size(), 1);
    for (std::size_t i = 0; i < s3.size(); ++i) actions(i, 0) = causal::apply_policy(policy, ctx.row(i));
    const Vector f = numkit::matvec(features::rbf_features(actions, r->dict), r->weights);
    double s = 0.0;
    for (double v : f) s += v;
    return s / static_cast<double>(f.size());
  }
  if (const auto* d = std::get_if<two_stage::DfpvModel>(&model))
    return causal::estimate_value(causal::bridge_from(*d), policy, s3);
  return causal::estimate_value(causal::bridge_from(std::get<two_stage::FixedFeatureModel>(model)), policy, s3);
}

nlohmann::json model_to_json(const FittedModel& model) {
  nlohmann::json j;
  if (const auto* d = std::get_if<two_stage::DfpvModel>(&model)) {
    two_stage::to_json(j, *d);
  } else if (const auto* f = std::get_if<two_stage::FixedFeatureModel>(&model)) {
    two_stage::to_json(j, *f);
  } else {
    const auto& r = std::get<DirectRidgeModel>(model);
    nlohmann::json dict;
    features::to_json(dict, r.dict);
    j = nlohmann::json{{"estimator", "direct_ridge"},
                       {"dictionary", dict},
                       {"weights", r.weights},
                       {"lambda", r.lambda},
                       {"train_loss", r.train_loss},
                       {"heldout_loss", r.heldout_loss}};
  }
  return j;
}

FittedModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("estimator")) throw InvalidArgument("model json: missing 'estimator'");
  switch (estimator_from_string(j.at("estimator").get<std::string>())) {
    case EstimatorKind::dfpv: return two_stage::dfpv_model_from_json(j);
    case EstimatorKind::fixed_feature: return two_stage::fixed_feature_model_from_json(j);
    case EstimatorKind::direct_ridge: {
      try {
        DirectRidgeModel r{features::rbf_from_json(j.at("dictionary")), j.at("weights").get<Vector>(),
                           j.value("lambda", 0.0), j.value("train_loss", 0.0), j.value("heldout_loss", 0.0)};
        if (r.weights.size() != r.dict.size()) throw InvalidArgument("model json: ridge weight length mismatch");
        return r;
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("model json: ") + e.what());
      }
    }
  }
  throw InvalidArgument("model json: unknown estimator");
}

}  // namespace dfpv::bench
