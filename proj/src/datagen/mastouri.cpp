#include "dfpv/datagen/mastouri.hpp"

#include <algorithm>
#include <cmath>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/random.hpp"

namespace dfpv::datagen {

namespace {

struct Latents {
  double u1, u2;
};

Latents draw_latents(numkit::CounterRng& rng) {
  const double u2 = rng.uniform(-1.0, 2.0);
  const double u1 = rng.uniform() - ((u2 >= 0.0 && u2 <= 1.0) ? 1.0 : 0.0);
  return {u1, u2};
}

Split draw_split(std::size_t n, std::uint64_t seed, std::uint64_t stream, NoiseConvention noise, Vector& u1s,
                 Vector& u2s) {
  numkit::CounterRng rng(seed, stream);
  u1s.assign(n, 0.0);
  u2s.assign(n, 0.0);
  auto sd = [noise](double s) { return noise == NoiseConvention::variance ? std::sqrt(s) : s; };
  const double sd3 = sd(3.0), sd005 = sd(0.05);
  Split s{DenseMatrix(n, 1), DenseMatrix(n, 2), DenseMatrix(n, 2), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto [u1, u2] = draw_latents(rng);
    u1s[i] = u1;
    u2s[i] = u2;
    s.z(i, 0) = u1 + rng.uniform(-1.0, 1.0);
    s.z(i, 1) = u2 + rng.normal(0.0, sd3);
    s.w(i, 0) = u1 + rng.normal(0.0, sd3);
    s.w(i, 1) = u2 + rng.uniform(-1.0, 1.0);
    s.a(i, 0) = u2 + rng.normal(0.0, sd005);
    s.y[i] = u2 * std::cos(2.0 * (s.a(i, 0) + 0.3 * u1 + 0.2));
  }
  return s;
}

double branch_mean(double a, double c) {
  return (std::sin(2.0 * a + 0.6 * (c + 1.0) + 0.4) - std::sin(2.0 * a + 0.6 * c + 0.4)) / 0.6;
}

}  // namespace

std::string to_string(NoiseConvention c) { return c == NoiseConvention::variance ? "variance" : "stddev"; }

NoiseConvention noise_convention_from_string(const std::string& s) {
  if (s == "variance") return NoiseConvention::variance;
  if (s == "stddev") return NoiseConvention::stddev;
  throw InvalidArgument("noise convention must be 'variance' or 'stddev', got '" + s + "'");
}

MastouriDraw gen_mastouri_with_latents(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed,
                                       NoiseConvention noise) {
  if (n_stage1 == 0 || n_stage2 == 0) throw InvalidArgument("gen_mastouri: stage sizes must be >= 1");
  MastouriDraw out;
  out.data.stage1 = draw_split(n_stage1, seed, 1, noise, out.u1_stage1, out.u2_stage1);
  out.data.stage2 = draw_split(n_stage2, seed, 2, noise, out.u1_stage2, out.u2_stage2);
  return out;
}

ObservationSet gen_mastouri(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed, NoiseConvention noise) {
  return gen_mastouri_with_latents(n_stage1, n_stage2, seed, noise).data;
}

DenseMatrix mastouri_grid() { return evenly_spaced(0.0, 1.0, 20); }

double mastouri_structural(double a) { return branch_mean(a, -1.0) / 6.0 + branch_mean(a, 0.0) / 3.0; }

GroundTruth mastouri_truth(const DenseMatrix& grid) {
  if (grid.rows() == 0 || grid.cols() != 1) throw InvalidArgument("mastouri_truth: grid must be k x 1");
  GroundTruth t{grid, Vector(grid.rows()), Vector(grid.rows(), 0.0), 0};
  for (std::size_t i = 0; i < grid.rows(); ++i) t.values[i] = mastouri_structural(grid(i, 0));
  return t;
}

GroundTruth mastouri_truth_mc(const DenseMatrix& grid, std::size_t n_mc, std::uint64_t seed) {
  if (grid.rows() == 0 || grid.cols() != 1) throw InvalidArgument("mastouri_truth_mc: grid must be k x 1");
  if (n_mc < 2) throw InvalidArgument("mastouri_truth_mc: n_mc must be >= 2");
  const std::size_t k = grid.rows();
  Vector sum(k, 0.0), sum_sq(k, 0.0);
  numkit::CounterRng rng(seed, 4);
  for (std::size_t s = 0; s < n_mc; ++s) {
    const auto [u1, u2] = draw_latents(rng);
    for (std::size_t i = 0; i < k; ++i) {
      const double f = u2 * std::cos(2.0 * (grid(i, 0) + 0.3 * u1 + 0.2));
      sum[i] += f;
      sum_sq[i] += f * f;
    }
  }
  const double n = static_cast<double>(n_mc);
  GroundTruth t{grid, Vector(k), Vector(k), n_mc};
  for (std::size_t i = 0; i < k; ++i) {
    const double mean = sum[i] / n;
    t.values[i] = mean;
    t.mc_stderr[i] = std::sqrt(std::max(0.0, (sum_sq[i] - n * mean * mean) / (n - 1.0)) / n);
  }
  return t;
}

}  // namespace dfpv::datagen
