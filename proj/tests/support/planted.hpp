#pragma once

// A design whose bridge function lies exactly in the span of a fixed dictionary.
//
// U ~ Cat{0, 1, 2} with probabilities (0.2, 0.3, 0.5), Z = W = U, A = V^(1 + U) with
// V ~ Unif(0, 1), Y = h(A, W) + sigma eps, h(a, w) = sum_j beta[j][w] psi_j(a) for a five-center
// RBF dictionary psi on [0, 1]. With Z = W the stage-1 conditional mean is exact, and with
// narrow RBFs on {0, 1, 2} the proxy features are one-hot, so h is recovered up to ridge bias.

#include <cstdint>

#include "dfpv/datagen/ground_truth.hpp"
#include "dfpv/datagen/observation_set.hpp"
#include "dfpv/two_stage/fixed_feature.hpp"

namespace planted {

struct PlantedDesign {
  dfpv::two_stage::FixedDictionaries dicts;
  double beta[5][3];
  double probs[3] = {0.2, 0.3, 0.5};
  double noise_sd = 1e-3;

  double bridge(double a, int w) const;
  double structural(double a) const;
  dfpv::datagen::ObservationSet sample(std::size_t n, std::uint64_t seed) const;
  dfpv::datagen::GroundTruth truth(std::size_t grid_points = 20) const;
};

PlantedDesign make_planted(double noise_sd = 1e-3);

}  // namespace planted
