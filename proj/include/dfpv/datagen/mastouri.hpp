#pragma once

#include <cstdint>
#include <string>

#include "dfpv/datagen/ground_truth.hpp"
#include "dfpv/datagen/observation_set.hpp"

namespace dfpv::datagen {

// How the second argument of N(0, s) in the Mastouri design is read.
enum class NoiseConvention { variance, stddev };

std::string to_string(NoiseConvention c);
NoiseConvention noise_convention_from_string(const std::string& s);

// U2 ~ Unif[-1, 2], U1 ~ Unif[0, 1] - 1[0 <= U2 <= 1],
// Z = (U1 + Unif[-1, 1], U2 + N(0, 3)), W = (U1 + N(0, 3), U2 + Unif[-1, 1]),
// A = U2 + N(0, 0.05), Y = U2 cos(2 (A + 0.3 U1 + 0.2)).
ObservationSet gen_mastouri(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed,
                            NoiseConvention noise = NoiseConvention::variance);

struct MastouriDraw {
  ObservationSet data;
  Vector u1_stage1, u2_stage1;
  Vector u1_stage2, u2_stage2;
};

MastouriDraw gen_mastouri_with_latents(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed,
                                       NoiseConvention noise = NoiseConvention::variance);

// Twenty points evenly spaced on [0, 1].
DenseMatrix mastouri_grid();

// Closed form E[U2 cos(2a + 0.6 U1 + 0.4)]: (1/6) S(a; -1) + (1/3) S(a; 0) with
// S(a; c) = [sin(2a + 0.6(c+1) + 0.4) - sin(2a + 0.6c + 0.4)] / 0.6.
double mastouri_structural(double a);
GroundTruth mastouri_truth(const DenseMatrix& grid);

// Monte-Carlo estimate of the same expectation from n_mc draws of (U1, U2).
GroundTruth mastouri_truth_mc(const DenseMatrix& grid, std::size_t n_mc, std::uint64_t seed);

}  // namespace dfpv::datagen
