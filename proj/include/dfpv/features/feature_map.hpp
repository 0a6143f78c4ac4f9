#pragma once

#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/features/mlp.hpp"
#include "dfpv/features/rbf.hpp"

namespace dfpv::features {

using FeatureMap = std::variant<RbfDictionary, MlpFeatureMap>;

DenseMatrix apply(const FeatureMap& map, const DenseMatrix& inputs);
Vector apply(const FeatureMap& map, std::span<const double> x);
std::size_t input_dim(const FeatureMap& map);
std::size_t output_dim(const FeatureMap& map);

nlohmann::json feature_map_to_json(const FeatureMap& map);
FeatureMap feature_map_from_json(const nlohmann::json& j);

}  // namespace dfpv::features
