#include "dfpv/datagen/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/random.hpp"

namespace dfpv::datagen {

namespace {

constexpr std::size_t kMinMcDraws = 10000;

struct DemandRecord {
  double d, c1, c2, v, p, y;
};

DemandRecord draw_record(numkit::CounterRng& rng) {
  DemandRecord r{};
  r.d = rng.uniform(0.0, 10.0);
  const double e1 = rng.normal(), e2 = rng.normal(), e3 = rng.normal(), e4 = rng.normal(), e = rng.normal();
  const double g = demand_g(r.d);
  const double angle = 2.0 * std::numbers::pi * r.d / 10.0;
  r.c1 = 2.0 * std::sin(angle) + e1;
  r.c2 = 2.0 * std::cos(angle) + e2;
  r.v = 7.0 * g + 45.0 + e3;
  r.p = 35.0 + (r.c1 + 3.0) * g + r.c2 + e4;
  r.y = demand_outcome_mean(r.p, r.v, r.d) + e;
  return r;
}

Split draw_split(std::size_t n, std::uint64_t seed, std::uint64_t stream, Vector& latent) {
  numkit::CounterRng rng(seed, stream);
  Split s{DenseMatrix(n, 1), DenseMatrix(n, 2), DenseMatrix(n, 1), Vector(n)};
  latent.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = draw_record(rng);
    s.a(i, 0) = r.p;
    s.z(i, 0) = r.c1;
    s.z(i, 1) = r.c2;
    s.w(i, 0) = r.v;
    s.y[i] = r.y;
    latent[i] = r.d;
  }
  return s;
}

McEstimate mean_and_stderr(double sum, double sum_sq, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
  return {mean, std::sqrt(var / nn)};
}

}  // namespace

double demand_g(double d) {
  const double x = d - 5.0;
  return 2.0 * (x * x * x * x / 600.0 + std::exp(-4.0 * x * x) + d / 10.0 - 2.0);
}

double demand_outcome_mean(double p, double v, double d) {
  return p * std::min(std::exp((v - p) / 10.0), 5.0) - 5.0 * demand_g(d);
}

DemandDraw gen_demand_with_latents(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed,
                                   std::size_t n_ope) {
  if (n_stage1 == 0 || n_stage2 == 0) throw InvalidArgument("gen_demand: stage sizes must be >= 1");
  DemandDraw out;
  out.data.stage1 = draw_split(n_stage1, seed, 1, out.d_stage1);
  out.data.stage2 = draw_split(n_stage2, seed, 2, out.d_stage2);
  if (n_ope > 0) out.data.ope = draw_split(n_ope, seed, 3, out.d_ope);
  return out;
}

ObservationSet gen_demand(std::size_t n_stage1, std::size_t n_stage2, std::uint64_t seed, std::size_t n_ope) {
  return gen_demand_with_latents(n_stage1, n_stage2, seed, n_ope).data;
}

DenseMatrix demand_grid() { return evenly_spaced(10.0, 30.0, 10); }

GroundTruth demand_truth_mc(const DenseMatrix& grid, std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < kMinMcDraws) throw InvalidArgument("demand_truth_mc: n_mc must be >= 10^4");
  if (grid.rows() == 0 || grid.cols() != 1) throw InvalidArgument("demand_truth_mc: grid must be k x 1");
  const std::size_t k = grid.rows();
  Vector sum(k, 0.0), sum_sq(k, 0.0);
  numkit::CounterRng rng(seed, 4);
  for (std::size_t s = 0; s < n_mc; ++s) {
    const double d = rng.uniform(0.0, 10.0);
    const double v = 7.0 * demand_g(d) + 45.0 + rng.normal();
    for (std::size_t i = 0; i < k; ++i) {
      const double f = demand_outcome_mean(grid(i, 0), v, d);
      sum[i] += f;
      sum_sq[i] += f * f;
    }
  }
  GroundTruth t{grid, Vector(k), Vector(k), n_mc};
  for (std::size_t i = 0; i < k; ++i) {
    const auto e = mean_and_stderr(sum[i], sum_sq[i], n_mc);
    t.values[i] = e.value;
    t.mc_stderr[i] = e.std_error;
  }
  return t;
}

McEstimate ope_truth_mc(const causal::Policy& policy, std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < kMinMcDraws) throw InvalidArgument("ope_truth_mc: n_mc must be >= 10^4");
  const auto role = causal::context_role(policy);
  numkit::CounterRng rng(seed, 5);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < n_mc; ++s) {
    const auto r = draw_record(rng);
    double ctx[2] = {r.c1, r.c2};
    std::span<const double> context(ctx, 2);
    if (role == causal::ContextRole::treatment) {
      ctx[0] = r.p;
      context = std::span<const double>(ctx, 1);
    }
    const double a = causal::apply_policy(policy, context);
    const double f = demand_outcome_mean(a, r.v, r.d);
    sum += f;
    sum_sq += f * f;
  }
  return mean_and_stderr(sum, sum_sq, n_mc);
}

McEstimate observational_mean_mc(std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < kMinMcDraws) throw InvalidArgument("observational_mean_mc: n_mc must be >= 10^4");
  numkit::CounterRng rng(seed, 6);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < n_mc; ++s) {
    const auto r = draw_record(rng);
    const double f = demand_outcome_mean(r.p, r.v, r.d);
    sum += f;
    sum_sq += f * f;
  }
  return mean_and_stderr(sum, sum_sq, n_mc);
}

}  // namespace dfpv::datagen
