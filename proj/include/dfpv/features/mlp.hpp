#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/numkit/dense_matrix.hpp"
#include "dfpv/numkit/grad_tape.hpp"

namespace dfpv::features {

using numkit::DenseMatrix;
using numkit::Vector;

struct DenseLayer {
  DenseMatrix weight;  // out x in
  Vector bias;         // out
};

// Fully connected network with ReLU after every layer, the last one included, so features
// are nonnegative. Inputs pass through a frozen per-coordinate standardization
// (x - shift) / scale first; an empty shift/scale means identity. With constant_feature set,
// a trailing coordinate fixed at 1 is appended to the output.
class MlpFeatureMap {
 public:
  MlpFeatureMap() = default;  // empty placeholder; assign before use
  MlpFeatureMap(std::vector<std::size_t> layer_dims, std::vector<DenseLayer> layers);

  const std::vector<std::size_t>& layer_dims() const noexcept { return dims_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::size_t input_dim() const noexcept { return dims_.empty() ? 0 : dims_.front(); }
  std::size_t output_dim() const noexcept { return dims_.empty() ? 0 : dims_.back() + (constant_ ? 1 : 0); }
  bool constant_feature() const noexcept { return constant_; }
  void set_constant_feature(bool on) noexcept { constant_ = on; }

  const Vector& input_shift() const noexcept { return shift_; }
  const Vector& input_scale() const noexcept { return scale_; }
  void set_input_standardization(Vector shift, Vector scale);
  // Standardizes with the column means and standard deviations of `inputs`.
  void fit_input_standardization(const DenseMatrix& inputs);
  DenseMatrix standardize(const DenseMatrix& inputs) const;

  // Parameters flattened layer by layer: weight (row-major) then bias.
  std::size_t parameter_count() const noexcept;
  Vector flatten_parameters() const;
  void assign_parameters(std::span<const double> flat);

 private:
  std::vector<std::size_t> dims_;
  std::vector<DenseLayer> layers_;
  Vector shift_;
  Vector scale_;
  bool constant_ = false;
};

// He-uniform weights (bound sqrt(6 / fan_in)) and zero biases, deterministic in `seed`.
MlpFeatureMap init_mlp(const std::vector<std::size_t>& layer_dims, std::uint64_t seed);

Vector mlp_features(std::span<const double> x, const MlpFeatureMap& map);
DenseMatrix mlp_forward(const MlpFeatureMap& map, const DenseMatrix& inputs);

// Forward pass recorded on a tape with every weight and bias registered as a parameter.
struct RecordedMlp {
  numkit::NodeRef output;
  std::vector<numkit::NodeRef> weights;
  std::vector<numkit::NodeRef> biases;

  // Gradient in the flatten_parameters() layout.
  Vector flat_gradient(const numkit::Gradients& grads) const;
};

RecordedMlp record_mlp(numkit::GradTape& tape, const MlpFeatureMap& map, const DenseMatrix& inputs);

void to_json(nlohmann::json& j, const MlpFeatureMap& map);
MlpFeatureMap mlp_from_json(const nlohmann::json& j);

}  // namespace dfpv::features
