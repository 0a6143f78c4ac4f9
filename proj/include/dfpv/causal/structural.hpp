#pragma once

#include <span>

#include "dfpv/causal/policy.hpp"
#include "dfpv/datagen/observation_set.hpp"
#include "dfpv/features/feature_map.hpp"
#include "dfpv/two_stage/dfpv.hpp"
#include "dfpv/two_stage/fixed_feature.hpp"

namespace dfpv::causal {

using features::FeatureMap;
using numkit::DenseMatrix;

// f(a) = u^T (psi_a2(a) kron mu_w).
struct StructuralEstimate {
  FeatureMap psi_a2;
  Vector u;
  Vector mu_w;

  void validate() const;
};

// h(a, w) = u^T (psi_a2(a) kron psi_w(w)).
struct BridgeModel {
  FeatureMap psi_a2;
  FeatureMap psi_w;
  Vector u;
  Vector mu_w;

  void validate() const;
  StructuralEstimate structural() const { return {psi_a2, u, mu_w}; }
};

BridgeModel bridge_from(const two_stage::DfpvModel& model);
BridgeModel bridge_from(const two_stage::FixedFeatureModel& model);

// Mean of psi_w over the rows of `samples`.
Vector mean_outcome_feature(const FeatureMap& psi_w, const DenseMatrix& samples);

double eval_structural(const StructuralEstimate& est, std::span<const double> a);
// One value per grid row.
Vector eval_structural(const StructuralEstimate& est, const DenseMatrix& grid);

double eval_bridge(const BridgeModel& model, std::span<const double> a, std::span<const double> w);
// h(a_i, w_i) for paired rows.
Vector eval_bridge(const BridgeModel& model, const DenseMatrix& a, const DenseMatrix& w);

// Mean of h(pi(c_i), w_i) over the evaluation block. The policy context comes from the block's
// a or z columns according to context_role(policy).
double estimate_value(const BridgeModel& model, const Policy& policy, const datagen::Split& s3);

}  // namespace dfpv::causal
