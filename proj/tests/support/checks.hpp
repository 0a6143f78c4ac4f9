#pragma once

// Randomized checks shared by the unit tests and the acceptance runner.

#include <cmath>

#include "dfpv/numkit/linalg.hpp"
#include "dfpv/two_stage/dfpv.hpp"
#include "dfpv/two_stage/ridge.hpp"
#include "support/oracles.hpp"

namespace checks {

using dfpv::datagen::Split;
using dfpv::numkit::CounterRng;
using dfpv::numkit::DenseMatrix;
using dfpv::numkit::Vector;
using dfpv::two_stage::DfpvFeatures;

struct RidgeTrial {
  double v_rel = 0.0;  // ||V_closed - V_gd|| / ||V_gd||
  double u_rel = 0.0;
};

// One random instance: m, n <= 200, feature dims <= 16, lambdas log-uniform in [1e-3, 1].
inline RidgeTrial ridge_trial(CounterRng& rng) {
  const std::size_t m = 5 + rng.below(196), n = 5 + rng.below(196);
  const std::size_t d1 = 1 + rng.below(16), dw = 1 + rng.below(16), d2 = 1 + rng.below(16);
  const double l1 = std::pow(10.0, rng.uniform(-3.0, 0.0)), l2 = std::pow(10.0, rng.uniform(-3.0, 0.0));
  const auto phi1 = oracle::random_matrix(m, d1, rng);
  const auto psi1 = oracle::random_matrix(m, dw, rng);
  const auto phi2 = oracle::random_matrix(n, d2, rng);
  Vector y(n);
  for (auto& v : y) v = rng.normal(0.0, 2.0);

  const auto v_closed = dfpv::two_stage::fit_stage1_weights(psi1, phi1, l1);
  const auto v_gd = oracle::gd_ridge(psi1, phi1, l1);
  const auto u_closed = dfpv::two_stage::fit_stage2_weights(phi2, y, l2);
  const auto u_gd = oracle::gd_ridge(DenseMatrix::column(y), phi2, l2);
  return {oracle::rel_diff(v_closed.storage(), v_gd.storage()), oracle::rel_diff(u_closed, u_gd.storage())};
}

// Losses recomputed from scratch: library forward passes, then Kronecker rows, normal
// equations and residuals by hand with Gaussian elimination.
inline DenseMatrix kron_rows(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix k(a.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = 0; p < a.cols(); ++p)
      for (std::size_t q = 0; q < b.cols(); ++q) k(i, p * b.cols() + q) = a(i, p) * b(i, q);
  return k;
}

// Returns W^T with W the minimizer of (1/m)||T - X W^T||^2 + lambda ||W||^2.
inline DenseMatrix ridge_normal_equations(const DenseMatrix& t, const DenseMatrix& x, double lambda) {
  DenseMatrix a = oracle::naive_matmul(oracle::transpose(x), x);
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += static_cast<double>(x.rows()) * lambda;
  return oracle::gauss_solve(a, oracle::naive_matmul(oracle::transpose(x), t));
}

inline double penalized_loss(const DenseMatrix& t, const DenseMatrix& x, const DenseMatrix& wt, double lambda) {
  const auto pred = oracle::naive_matmul(x, wt);
  double s = 0.0, r = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::pow(t.data()[i] - pred.data()[i], 2);
  for (double v : wt.data()) r += v * v;
  return s / static_cast<double>(t.rows()) + lambda * r;
}

inline double oracle_stage1_loss(const DfpvFeatures& f, const Split& s1, double l1) {
  using dfpv::features::mlp_forward;
  const auto phi = kron_rows(mlp_forward(f.phi_a1, s1.a), mlp_forward(f.phi_z, s1.z));
  const auto psi = mlp_forward(f.psi_w, s1.w);
  return penalized_loss(psi, phi, ridge_normal_equations(psi, phi, l1), l1);
}

inline double oracle_stage2_loss(const DfpvFeatures& f, const Split& s1, const Split& s2, double l1, double l2) {
  using dfpv::features::mlp_forward;
  const auto phi1 = kron_rows(mlp_forward(f.phi_a1, s1.a), mlp_forward(f.phi_z, s1.z));
  const auto vt = ridge_normal_equations(mlp_forward(f.psi_w, s1.w), phi1, l1);
  const auto w_hat = oracle::naive_matmul(kron_rows(mlp_forward(f.phi_a1, s2.a), mlp_forward(f.phi_z, s2.z)), vt);
  const auto phi2 = kron_rows(mlp_forward(f.psi_a2, s2.a), w_hat);
  const auto y = DenseMatrix::column(s2.y);
  return penalized_loss(y, phi2, ridge_normal_equations(y, phi2, l2), l2);
}

struct GradientTrial {
  double stage1_value_rel = 0.0;  // library loss vs oracle loss
  double stage2_value_rel = 0.0;
  double stage1_grad_rel = 0.0;   // analytic vs central differences of the oracle
  double stage2_grad_rel = 0.0;
};

inline dfpv::features::MlpFeatureMap random_net(std::size_t in, const std::vector<std::size_t>& hidden,
                                               bool constant, CounterRng& rng) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  auto m = dfpv::features::init_mlp(dims, rng());
  Vector p = m.flatten_parameters();
  for (auto& v : p) v += 0.05 * rng.normal();
  m.assign_parameters(p);
  m.set_constant_feature(constant);
  return m;
}

// Random networks with one or two layers of at most 16 units, small samples, random lambdas.
inline GradientTrial gradient_trial(CounterRng& rng) {
  const std::size_t m = 20 + rng.below(21), n = 20 + rng.below(21);
  auto hidden = [&] {
    std::vector<std::size_t> h;
    const std::size_t layers = 1 + rng.below(2);
    for (std::size_t l = 0; l < layers; ++l) h.push_back(2 + rng.below(15));
    h.back() = 2 + rng.below(3);  // keep the Kronecker products small
    return h;
  };
  const bool constant = rng.below(2) == 1;
  DfpvFeatures f{random_net(1, hidden(), constant, rng), random_net(2, hidden(), constant, rng),
                 random_net(1, hidden(), constant, rng), random_net(2, hidden(), constant, rng)};
  auto split = [&](std::size_t rows) {
    Split s{oracle::random_matrix(rows, 1, rng), oracle::random_matrix(rows, 2, rng),
            oracle::random_matrix(rows, 2, rng), Vector(rows)};
    for (std::size_t i = 0; i < rows; ++i) s.y[i] = std::sin(s.a(i, 0)) + s.w(i, 0) + 0.1 * rng.normal();
    return s;
  };
  const Split s1 = split(m), s2 = split(n);
  const double l1 = std::pow(10.0, rng.uniform(-2.0, 0.0)), l2 = std::pow(10.0, rng.uniform(-2.0, 0.0));

  GradientTrial out;
  const auto r1 = dfpv::two_stage::dfpv_stage1_loss(f, s1, l1);
  const auto r2 = dfpv::two_stage::dfpv_stage2_loss(f, s1, s2, l1, l2);
  const double o1 = oracle_stage1_loss(f, s1, l1), o2 = oracle_stage2_loss(f, s1, s2, l1, l2);
  out.stage1_value_rel = std::abs(r1.loss - o1) / std::abs(o1);
  out.stage2_value_rel = std::abs(r2.loss - o2) / std::abs(o2);

  const double h = 1e-6;
  // stage 1: theta_A1 then theta_Z
  Vector g1 = r1.grad_phi_a1, fd1;
  g1.insert(g1.end(), r1.grad_phi_z.begin(), r1.grad_phi_z.end());
  {
    const std::size_t na = f.phi_a1.parameter_count();
    Vector theta = f.phi_a1.flatten_parameters();
    const Vector tz = f.phi_z.flatten_parameters();
    theta.insert(theta.end(), tz.begin(), tz.end());
    fd1 = oracle::central_diff(
        [&](const Vector& t) {
          DfpvFeatures g = f;
          g.phi_a1.assign_parameters(std::span<const double>(t.data(), na));
          g.phi_z.assign_parameters(std::span<const double>(t.data() + na, t.size() - na));
          return oracle_stage1_loss(g, s1, l1);
        },
        theta, h);
  }
  out.stage1_grad_rel = oracle::rel_diff(g1, fd1);

  Vector g2 = r2.grad_psi_a2, fd2;
  g2.insert(g2.end(), r2.grad_psi_w.begin(), r2.grad_psi_w.end());
  {
    const std::size_t na = f.psi_a2.parameter_count();
    Vector theta = f.psi_a2.flatten_parameters();
    const Vector tw = f.psi_w.flatten_parameters();
    theta.insert(theta.end(), tw.begin(), tw.end());
    fd2 = oracle::central_diff(
        [&](const Vector& t) {
          DfpvFeatures g = f;
          g.psi_a2.assign_parameters(std::span<const double>(t.data(), na));
          g.psi_w.assign_parameters(std::span<const double>(t.data() + na, t.size() - na));
          return oracle_stage2_loss(g, s1, s2, l1, l2);
        },
        theta, h);
  }
  out.stage2_grad_rel = oracle::rel_diff(g2, fd2);
  return out;
}

}  // namespace checks
