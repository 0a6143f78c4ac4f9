#pragma once

// Sample moments of the synthetic designs against values integrated independently.

#include <cmath>
#include <numbers>

#include "dfpv/datagen/demand.hpp"
#include "dfpv/datagen/mastouri.hpp"
#include "support/oracles.hpp"

namespace moments {

using oracle::Vector;

struct Check {
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double z() const { return std::abs(estimate - target) / std_error; }
};

inline Check sample_mean(std::span<const double> xs, double target) {
  double s = 0.0, s2 = 0.0;
  for (double x : xs) s += x;
  const double n = static_cast<double>(xs.size()), mean = s / n;
  for (double x : xs) s2 += (x - mean) * (x - mean);
  return {mean, std::sqrt(s2 / (n - 1.0) / n), target};
}

// E over D ~ Unif[0, 10] by Simpson.
inline double demand_expect(const std::function<double(double)>& f) {
  return oracle::simpson(f, 0.0, 10.0, 4000) / 10.0;
}

inline double demand_price_mean() {
  return 35.0 + demand_expect([](double d) {
           const double t = 2.0 * std::numbers::pi * d / 10.0;
           return (2.0 * std::sin(t) + 3.0) * dfpv::datagen::demand_g(d) + 2.0 * std::cos(t);
         });
}

inline Check demand_d_mean(std::size_t n, std::uint64_t seed) {
  const auto draw = dfpv::datagen::gen_demand_with_latents(n, 1, seed);
  return sample_mean(draw.d_stage1, 5.0);
}

inline Check demand_a_mean(std::size_t n, std::uint64_t seed) {
  const auto draw = dfpv::datagen::gen_demand_with_latents(n, 1, seed);
  return sample_mean(draw.data.stage1.a.storage(), demand_price_mean());
}

// U1 < 0 exactly when U2 lands in [0, 1], which has probability 1/3.
inline Check mastouri_u1_negative(std::size_t n, std::uint64_t seed) {
  const auto draw = dfpv::datagen::gen_mastouri_with_latents(n, 1, seed);
  Vector ind(n);
  for (std::size_t i = 0; i < n; ++i) ind[i] = draw.u1_stage1[i] < 0.0 ? 1.0 : 0.0;
  return sample_mean(ind, 1.0 / 3.0);
}

}  // namespace moments
