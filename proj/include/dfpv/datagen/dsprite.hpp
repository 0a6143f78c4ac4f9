#pragma once

#include <cstdint>

#include "dfpv/datagen/ground_truth.hpp"
#include "dfpv/datagen/observation_set.hpp"

namespace dfpv::datagen {

// Image latents: scale in [0.5, 1], rotation in [0, 2 pi], posX and posY in [0, 1].
struct SpriteLatents {
  double scale, rotation, pos_x, pos_y;
};

// Seeded stand-in for the image renderer: a random-Fourier embedding
// e_j(l) = cos(omega_j . l~ + b_j) of the latents rescaled to [0, 1], plus the fixed readout
// matrix B (10 x embed_dim) of the structural function (||B a||^2 - 5000) / 1000.
class SpriteSurrogate {
 public:
  SpriteSurrogate(std::size_t embed_dim, std::uint64_t seed);

  std::size_t embed_dim() const noexcept { return omega_.rows(); }
  Vector embed(const SpriteLatents& l) const;
  double structural(std::span<const double> a) const;
  const DenseMatrix& readout() const noexcept { return b_; }
  // Mean of ||B A||^2 over the calibration draws, before rescaling (B is scaled to hit 5000).
  double raw_calibration_mean() const noexcept { return raw_mean_; }

 private:
  DenseMatrix omega_;  // embed_dim x 4
  Vector phase_;
  DenseMatrix b_;      // 10 x embed_dim
  double raw_mean_ = 0.0;
};

// Treatment-noise and proxy-noise variance, matching N(0, 0.1 I).
inline constexpr double kSpriteNoiseVariance = 0.1;

// A = Embed(latents) + noise, Z = (scale, rotation, posX), W = Embed(0.8, 0, 0.5, posY) + noise,
// Y = 12 (posY - 0.5)^2 f(A) + eps with eps ~ N(0, 0.5). E[12 (posY - 0.5)^2] = 1, so f is the
// structural function.
ObservationSet gen_dsprite_surrogate(const SpriteSurrogate& sprite, std::size_t n_stage1, std::size_t n_stage2,
                                     std::uint64_t seed);

// 48 latent points: posX, posY in {0.25, 0.75}, scale in {0.5, 0.75, 1}, rotation at 4 evenly
// spaced angles in [0, 2 pi); the treatment is the noise-free embedding.
GroundTruth dsprite_truth(const SpriteSurrogate& sprite);

}  // namespace dfpv::datagen
