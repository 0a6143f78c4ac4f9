#pragma once

#include <cstdint>
#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/datagen/observation_set.hpp"
#include "dfpv/features/rbf.hpp"
#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::two_stage {

using datagen::ObservationSet;
using datagen::Split;
using features::RbfDictionary;
using numkit::DenseMatrix;
using numkit::Vector;

struct FixedDictionaries {
  RbfDictionary phi_a1;
  RbfDictionary phi_z;
  RbfDictionary psi_a2;
  RbfDictionary psi_w;
};

// Centers are seeded subsamples of min(max_centers, m) stage-1 points per variable, bandwidths
// from the median heuristic.
FixedDictionaries make_fixed_dictionaries(const ObservationSet& data, std::size_t max_centers = 100,
                                          std::uint64_t seed = 0);

// Primal solves in feature space, dual in sample space; automatic picks the smaller system.
enum class SolveRoute { automatic, primal, dual };

// Closed-form stage-1 ridge fit at one lambda1. When the Kronecker dimension d_A1 d_Z exceeds
// m the fit is carried in dual form, V = S^T Phi1 with S = (G1 + m lambda1 I)^{-1} Psi1 and
// G1 = Phi1 Phi1^T = (Phi_A Phi_A^T) o (Phi_Z Phi_Z^T), so V itself is never formed.
class Stage1Fit {
 public:
  Stage1Fit(const FixedDictionaries& dicts, const Split& stage1, double lambda1,
            SolveRoute route = SolveRoute::automatic);

  // V (phi_a1(a) kron phi_z(z)) per row, n x d_W.
  DenseMatrix predict(const DenseMatrix& a, const DenseMatrix& z) const;
  double lambda() const noexcept { return lambda_; }
  bool dual() const noexcept { return !v_.has_value(); }
  double weight_norm_sq() const noexcept { return weight_norm_sq_; }
  // In-sample (1/m) ||Psi1 - Phi1 V^T||^2 + lambda1 ||V||^2.
  double loss() const noexcept { return loss_; }

 private:
  FixedDictionaries dicts_;
  double lambda_;
  std::optional<DenseMatrix> v_;  // primal route
  DenseMatrix train_fa_, train_fz_, s_;
  double weight_norm_sq_ = 0.0;
  double loss_ = 0.0;
};

struct FixedFeatureModel {
  FixedDictionaries dicts;
  Vector u;     // d_A2 d_W, row-major over (treatment feature, proxy feature)
  Vector mu_w;  // mean psi_w over S_W
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double stage1_loss = 0.0;
  double stage2_loss = 0.0;
};

// Stage-2 ridge on top of a stage-1 fit, again primal or dual by dimension.
FixedFeatureModel fit_fixed_stage2(const FixedDictionaries& dicts, const Stage1Fit& stage1, const ObservationSet& data,
                                   double lambda2, SolveRoute route = SolveRoute::automatic);

FixedFeatureModel fit_fixed_feature(const ObservationSet& data, const FixedDictionaries& dicts, double lambda1,
                                    double lambda2, SolveRoute route = SolveRoute::automatic);

// u^T (psi_a2(a) kron v) for each row pair of a and v (v = predicted or mean proxy features).
Vector fixed_feature_outcome(const FixedFeatureModel& model, const DenseMatrix& a, const DenseMatrix& v);

void to_json(nlohmann::json& j, const FixedFeatureModel& model);
FixedFeatureModel fixed_feature_model_from_json(const nlohmann::json& j);

}  // namespace dfpv::two_stage
