#include "dfpv/features/mlp.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/random.hpp"

namespace dfpv::features {

MlpFeatureMap::MlpFeatureMap(std::vector<std::size_t> layer_dims, std::vector<DenseLayer> layers)
    : dims_(std::move(layer_dims)), layers_(std::move(layers)) {
  if (dims_.size() < 2) throw InvalidArgument("MlpFeatureMap: need input and output dims");
  if (layers_.size() != dims_.size() - 1)
    throw InvalidArgument("MlpFeatureMap: layer count does not match layer_dims");
  for (std::size_t d : dims_)
    if (d == 0) throw InvalidArgument("MlpFeatureMap: zero-size layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weight.rows() != dims_[l + 1] || layer.weight.cols() != dims_[l] ||
        layer.bias.size() != dims_[l + 1]) {
      throw InvalidArgument("MlpFeatureMap: layer " + std::to_string(l) +
                            " shape inconsistent with layer_dims");
    }
  }
}

void MlpFeatureMap::set_input_standardization(Vector shift, Vector scale) {
  if (shift.empty() && scale.empty()) {
    shift_.clear();
    scale_.clear();
    return;
  }
  if (shift.size() != input_dim() || scale.size() != input_dim())
    throw InvalidArgument("MlpFeatureMap: standardization length must equal input dim");
  for (double s : scale)
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("MlpFeatureMap: scale must be positive");
  shift_ = std::move(shift);
  scale_ = std::move(scale);
}

void MlpFeatureMap::fit_input_standardization(const DenseMatrix& inputs) {
  if (inputs.cols() != input_dim()) throw InvalidArgument("fit_input_standardization: dimension mismatch");
  Vector mean = numkit::column_mean(inputs);
  Vector sd(mean.size(), 0.0);
  for (std::size_t i = 0; i < inputs.rows(); ++i)
    for (std::size_t j = 0; j < inputs.cols(); ++j) {
      const double d = inputs(i, j) - mean[j];
      sd[j] += d * d;
    }
  for (double& s : sd) {
    s = std::sqrt(s / static_cast<double>(inputs.rows()));
    if (!(s > 1e-12)) s = 1.0;
  }
  set_input_standardization(std::move(mean), std::move(sd));
}

DenseMatrix MlpFeatureMap::standardize(const DenseMatrix& inputs) const {
  if (inputs.cols() != input_dim()) {
    throw InvalidArgument("mlp: input has dimension " + std::to_string(inputs.cols()) +
                          ", network expects " + std::to_string(input_dim()));
  }
  if (shift_.empty()) return inputs;
  DenseMatrix out = inputs;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = (r[j] - shift_[j]) / scale_[j];
  }
  return out;
}

std::size_t MlpFeatureMap::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

Vector MlpFeatureMap::flatten_parameters() const {
  Vector out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weight.data().begin(), l.weight.data().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void MlpFeatureMap::assign_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw InvalidArgument("assign_parameters: wrong length");
  std::size_t pos = 0;
  for (auto& l : layers_) {
    auto w = l.weight.data();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + w.size()), w.begin());
    pos += w.size();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + l.bias.size()), l.bias.begin());
    pos += l.bias.size();
  }
}

MlpFeatureMap init_mlp(const std::vector<std::size_t>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) throw InvalidArgument("init_mlp: need at least one layer");
  for (std::size_t d : layer_dims)
    if (d == 0) throw InvalidArgument("init_mlp: zero-size layer");
  numkit::CounterRng rng(seed, 0x6d6c70ULL);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t fan_in = layer_dims[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    DenseLayer layer{DenseMatrix(layer_dims[l + 1], fan_in), Vector(layer_dims[l + 1], 0.0)};
    for (double& w : layer.weight.data()) w = rng.uniform(-bound, bound);
    layers.push_back(std::move(layer));
  }
  return MlpFeatureMap(layer_dims, std::move(layers));
}

DenseMatrix mlp_forward(const MlpFeatureMap& map, const DenseMatrix& inputs) {
  DenseMatrix h = map.standardize(inputs);
  for (const auto& layer : map.layers()) {
    DenseMatrix next = numkit::matmul_nt(h, layer.weight);
    for (std::size_t i = 0; i < next.rows(); ++i) {
      auto r = next.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) {
        const double v = r[j] + layer.bias[j];
        r[j] = v > 0.0 ? v : 0.0;
      }
    }
    h = std::move(next);
  }
  if (map.constant_feature()) {
    DenseMatrix out(h.rows(), h.cols() + 1, 1.0);
    for (std::size_t i = 0; i < h.rows(); ++i) std::copy(h.row(i).begin(), h.row(i).end(), out.row(i).begin());
    return out;
  }
  return h;
}

Vector mlp_features(std::span<const double> x, const MlpFeatureMap& map) {
  const DenseMatrix out = mlp_forward(map, DenseMatrix::row_vector(x));
  return Vector(out.data().begin(), out.data().end());
}

RecordedMlp record_mlp(numkit::GradTape& tape, const MlpFeatureMap& map, const DenseMatrix& inputs) {
  RecordedMlp rec;
  numkit::NodeRef h = tape.constant(map.standardize(inputs));
  for (const auto& layer : map.layers()) {
    const auto w = tape.parameter(layer.weight);
    const auto b = tape.parameter(DenseMatrix::row_vector(layer.bias));
    rec.weights.push_back(w);
    rec.biases.push_back(b);
    h = tape.relu(tape.affine(h, w, b));
  }
  rec.output = map.constant_feature() ? tape.append_ones(h) : h;
  return rec;
}

Vector RecordedMlp::flat_gradient(const numkit::Gradients& grads) const {
  Vector out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto& gw = grads.of(weights[l]);
    const auto& gb = grads.of(biases[l]);
    out.insert(out.end(), gw.data().begin(), gw.data().end());
    out.insert(out.end(), gb.data().begin(), gb.data().end());
  }
  return out;
}

void to_json(nlohmann::json& j, const MlpFeatureMap& map) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (const auto& l : map.layers()) {
    weights.push_back(l.weight.storage());
    biases.push_back(l.bias);
  }
  j = nlohmann::json{{"kind", "mlp"}, {"layer_dims", map.layer_dims()}, {"weights", weights}, {"biases", biases}};
  if (map.constant_feature()) j["constant_feature"] = true;
  if (!map.input_shift().empty()) {
    j["input_shift"] = map.input_shift();
    j["input_scale"] = map.input_scale();
  }
}

MlpFeatureMap mlp_from_json(const nlohmann::json& j) {
  try {
    const auto dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (dims.size() < 2 || weights.size() != dims.size() - 1 || biases.size() != dims.size() - 1)
      throw InvalidArgument("mlp json: layer count mismatch");
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      auto w = weights.at(l).get<std::vector<double>>();
      if (w.size() != dims[l] * dims[l + 1]) throw InvalidArgument("mlp json: weight length mismatch");
      layers.push_back({DenseMatrix(dims[l + 1], dims[l], std::move(w)), biases.at(l).get<Vector>()});
    }
    MlpFeatureMap map(dims, std::move(layers));
    if (j.contains("input_shift"))
      map.set_input_standardization(j.at("input_shift").get<Vector>(), j.at("input_scale").get<Vector>());
    map.set_constant_feature(j.value("constant_feature", false));
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("mlp json: ") + e.what());
  }
}

}  // namespace dfpv::features
