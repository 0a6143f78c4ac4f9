#include "dfpv/features/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/linalg.hpp"
#include "dfpv/numkit/random.hpp"

namespace dfpv::features {

RbfDictionary::RbfDictionary(DenseMatrix centers, double bandwidth)
    : centers_(std::move(centers)), bandwidth_(bandwidth) {
  if (centers_.rows() == 0 || centers_.cols() == 0)
    throw InvalidArgument("RbfDictionary: need at least one center of positive dimension");
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_))
    throw InvalidArgument("RbfDictionary: bandwidth must be positive and finite");
  if (!centers_.all_finite()) throw InvalidArgument("RbfDictionary: nonfinite center");
}

Vector rbf_features(std::span<const double> x, const RbfDictionary& dict) {
  if (x.size() != dict.input_dim()) {
    throw InvalidArgument("rbf_features: input has dimension " + std::to_string(x.size()) +
                          ", centers have " + std::to_string(dict.input_dim()));
  }
  const double inv = 1.0 / (2.0 * dict.bandwidth() * dict.bandwidth());
  Vector out(dict.size());
  for (std::size_t k = 0; k < dict.size(); ++k) {
    auto c = dict.centers().row(k);
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - c[i];
      d2 += d * d;
    }
    out[k] = std::exp(-d2 * inv);
  }
  return out;
}

DenseMatrix rbf_features(const DenseMatrix& inputs, const RbfDictionary& dict) {
  DenseMatrix out(inputs.rows(), dict.size());
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const Vector f = rbf_features(inputs.row(r), dict);
    std::copy(f.begin(), f.end(), out.row(r).begin());
  }
  return out;
}

RbfDictionary make_rbf_dictionary(const DenseMatrix& points, std::size_t max_centers,
                                  std::uint64_t seed) {
  if (max_centers == 0) throw InvalidArgument("make_rbf_dictionary: max_centers must be >= 1");
  const double bandwidth = numkit::median_heuristic(points, seed);
  numkit::CounterRng rng(seed, 0x72626663ULL);
  auto idx = numkit::sample_without_replacement(points.rows(), std::min(max_centers, points.rows()), rng);
  std::sort(idx.begin(), idx.end());
  return RbfDictionary(numkit::take_rows(points, idx), bandwidth);
}

void to_json(nlohmann::json& j, const RbfDictionary& dict) {
  nlohmann::json centers = nlohmann::json::array();
  for (std::size_t k = 0; k < dict.size(); ++k) {
    auto row = dict.centers().row(k);
    centers.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j = nlohmann::json{{"kind", "rbf"}, {"centers", centers}, {"bandwidth", dict.bandwidth()}};
}

RbfDictionary rbf_from_json(const nlohmann::json& j) {
  try {
    const auto& rows = j.at("centers");
    if (!rows.is_array() || rows.empty()) throw InvalidArgument("rbf json: empty centers");
    const std::size_t d = rows.at(0).size();
    DenseMatrix centers(rows.size(), d);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto r = rows.at(k).get<std::vector<double>>();
      if (r.size() != d) throw InvalidArgument("rbf json: ragged centers");
      std::copy(r.begin(), r.end(), centers.row(k).begin());
    }
    return RbfDictionary(std::move(centers), j.at("bandwidth").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("rbf json: ") + e.what());
  }
}

}  // namespace dfpv::features
