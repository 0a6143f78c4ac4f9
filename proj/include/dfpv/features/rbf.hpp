#pragma once

#include <cstdint>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::features {

using numkit::DenseMatrix;
using numkit::Vector;

// Fixed Gaussian dictionary: feature k of x is exp(-||x - c_k||^2 / (2 bandwidth^2)).
class RbfDictionary {
 public:
  RbfDictionary(DenseMatrix centers, double bandwidth);

  const DenseMatrix& centers() const noexcept { return centers_; }
  double bandwidth() const noexcept { return bandwidth_; }
  std::size_t size() const noexcept { return centers_.rows(); }
  std::size_t input_dim() const noexcept { return centers_.cols(); }

 private:
  DenseMatrix centers_;  // K x d
  double bandwidth_;
};

Vector rbf_features(std::span<const double> x, const RbfDictionary& dict);
// Batched: row i of the result holds the features of row i of `inputs`.
DenseMatrix rbf_features(const DenseMatrix& inputs, const RbfDictionary& dict);

// Centers are a seeded subsample of min(max_centers, rows) rows of `points`; bandwidth is the
// median heuristic over `points`.
RbfDictionary make_rbf_dictionary(const DenseMatrix& points, std::size_t max_centers,
                                  std::uint64_t seed);

void to_json(nlohmann::json& j, const RbfDictionary& dict);
RbfDictionary rbf_from_json(const nlohmann::json& j);

}  // namespace dfpv::features
