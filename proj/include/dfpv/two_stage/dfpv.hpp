#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/datagen/observation_set.hpp"
#include "dfpv/features/mlp.hpp"
#include "dfpv/numkit/dense_matrix.hpp"
#include "dfpv/two_stage/train_config.hpp"

namespace dfpv::two_stage {

using datagen::ObservationSet;
using datagen::Split;
using features::MlpFeatureMap;
using numkit::DenseMatrix;
using numkit::Vector;

// The four adaptive feature maps: phi_a1 and phi_z feed stage 1, psi_a2 and psi_w stage 2.
struct DfpvFeatures {
  MlpFeatureMap phi_a1;
  MlpFeatureMap phi_z;
  MlpFeatureMap psi_a2;
  MlpFeatureMap psi_w;
};

struct Stage1LossResult {
  double loss = 0.0;
  DenseMatrix weights;  // V at the current features, d_W x (d_A1 d_Z)
  Vector grad_phi_a1;   // flat, MlpFeatureMap::flatten_parameters layout
  Vector grad_phi_z;
};

struct Stage2LossResult {
  double loss = 0.0;
  Vector weights;               // u at the current features, d_A2 d_W
  DenseMatrix stage1_weights;   // V used to build the stage-2 inputs
  Vector grad_psi_a2;
  Vector grad_psi_w;
};

// Stage-1 loss (1/m) sum ||psi_w(w_i) - V (phi_a1(a_i) kron phi_z(z_i))||^2 + lambda1 ||V||^2 with
// V the closed-form minimizer, and its gradient in (theta_A1, theta_Z). Because V minimizes the
// same objective, the gradient is taken with V held fixed.
Stage1LossResult dfpv_stage1_loss(const DfpvFeatures& f, const Split& stage1, double lambda1);
// Same, with the stage-1 target features psi_w(w) already evaluated.
Stage1LossResult dfpv_stage1_loss(const DfpvFeatures& f, const Split& stage1, const DenseMatrix& psi1,
                                  double lambda1);

// Stage-2 loss (1/n) sum (y_i - u^T (psi_a2(a_i) kron V phi1(a_i, z_i)))^2 + lambda2 ||u||^2 with u
// the closed-form minimizer, and its gradient in (theta_A2, theta_W). theta_W reaches the loss
// through V = Psi1(theta_W)^T P where P depends only on the frozen stage-1 features.
Stage2LossResult dfpv_stage2_loss(const DfpvFeatures& f, const Split& stage1, const Split& stage2,
                                  double lambda1, double lambda2);

struct TrainTrace {
  std::vector<double> stage1_loss;  // last inner-step loss per outer iteration
  std::vector<double> stage2_loss;
  std::size_t iterations = 0;
  bool converged = false;
};

struct DfpvModel {
  DfpvFeatures features;
  DenseMatrix V;   // d_W x (d_A1 d_Z)
  Vector u;        // d_A2 d_W
  Vector mu_w;     // mean psi_w over S_W
  TrainConfig config;
  double final_stage1_loss = 0.0;
  double final_stage2_loss = 0.0;
  TrainTrace trace;

  // V (phi_a1(a) kron phi_z(z)) for each row.
  DenseMatrix predict_outcome_proxy_mean(const DenseMatrix& a, const DenseMatrix& z) const;
};

DfpvFeatures init_dfpv_features(const ObservationSet& data, const DfpvArchitecture& arch, std::uint64_t seed);

// Alternates stage1_inner_steps Adam updates of (theta_A1, theta_Z) with stage2_steps Adam updates
// of (theta_A2, theta_W), then recomputes V, u and the mean outcome-proxy feature at the final
// parameters. Throws NonfiniteLossError if a loss stops being finite.
DfpvModel train_dfpv(const ObservationSet& data, const TrainConfig& config,
                     const DfpvArchitecture& arch = {});

// Weights and losses at fixed features, no training.
DfpvModel finalize_dfpv(DfpvFeatures features, const ObservationSet& data, const TrainConfig& config);

void to_json(nlohmann::json& j, const DfpvModel& model);
DfpvModel dfpv_model_from_json(const nlohmann::json& j);

}  // namespace dfpv::two_stage
