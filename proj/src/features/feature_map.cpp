#include "dfpv/features/feature_map.hpp"

#include <nlohmann/json.hpp>

#include "dfpv/errors.hpp"

namespace dfpv::features {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

DenseMatrix apply(const FeatureMap& map, const DenseMatrix& inputs) {
  return std::visit(overloaded{[&](const RbfDictionary& d) { return rbf_features(inputs, d); },
                               [&](const MlpFeatureMap& m) { return mlp_forward(m, inputs); }},
                    map);
}

Vector apply(const FeatureMap& map, std::span<const double> x) {
  return std::visit(overloaded{[&](const RbfDictionary& d) { return rbf_features(x, d); },
                               [&](const MlpFeatureMap& m) { return mlp_features(x, m); }},
                    map);
}

std::size_t input_dim(const FeatureMap& map) {
  return std::visit([](const auto& m) { return m.input_dim(); }, map);
}

std::size_t output_dim(const FeatureMap& map) {
  return std::visit(overloaded{[](const RbfDictionary& d) { return d.size(); },
                               [](const MlpFeatureMap& m) { return m.output_dim(); }},
                    map);
}

nlohmann::json feature_map_to_json(const FeatureMap& map) {
  nlohmann::json j;
  std::visit([&](const auto& m) { to_json(j, m); }, map);
  return j;
}

FeatureMap feature_map_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", std::string("mlp"));
  if (kind == "rbf") return rbf_from_json(j);
  if (kind == "mlp") return mlp_from_json(j);
  throw InvalidArgument("feature map json: unknown kind '" + kind + "'");
}

}  // namespace dfpv::features
