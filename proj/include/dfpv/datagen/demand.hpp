#pragma once

#include <cstdint>

#include "dfpv/causal/policy.hpp"
#include "dfpv/datagen/ground_truth.hpp"
#include "dfpv/datagen/observation_set.hpp"

namespace dfpv::datagen {

// 2((d-5)^4/600 + exp(-4(d-5)^2) + d/10 - 2)
double demand_g(double d);

// Outcome mean at price p for demand level d and proxy v, before the additive noise.
double demand_outcome_mean(double p, double v, double d);

// Roles: a = P (1 column), z = (C1, C2), w = V, y = Y.
struct DemandDraw {
  ObservationSet data;
  // Latent demand level per record, for checks on the construction.
  Vector d_stage1;
  Vector d_stage2;
  Vector d_ope;
};

// Stage 1, stage 2 and the optional policy-evaluation block use independent streams.
DemandDraw gen_demand_with_latents(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed,
                                   std::size_t n_ope = 0);
ObservationSet gen_demand(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed,
                          std::size_t n_ope = 0);

// Ten prices evenly spaced on [10, 30].
DenseMatrix demand_grid();

// f(p) = E[p min(exp((V - p)/10), 5) - 5 g(D)], estimated with n_mc common draws of (D, eps3).
GroundTruth demand_truth_mc(const DenseMatrix& grid, std::size_t n_mc, std::uint64_t seed);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// v(pi) for the demand design: the context is drawn from its law, the action set by the
// policy, and the outcome mean averaged.
McEstimate ope_truth_mc(const causal::Policy& policy, std::size_t n_mc, std::uint64_t seed);

// E[Y] under the logging policy; the constant-predictor reference for policy values.
McEstimate observational_mean_mc(std::size_t n_mc, std::uint64_t seed);

}  // namespace dfpv::datagen
