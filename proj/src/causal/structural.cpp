#include "dfpv/causal/structural.hpp"

#include "dfpv/errors.hpp"
#include "dfpv/numkit/linalg.hpp"

namespace dfpv::causal {

namespace {

// U mu where U is the d_A2 x d_W reshaping of u.
Vector contract_proxy(const Vector& u, std::span<const double> psi_w, std::size_t d_a) {
  const std::size_t d_w = psi_w.size();
  Vector out(d_a, 0.0);
  for (std::size_t i = 0; i < d_a; ++i)
    for (std::size_t j = 0; j < d_w; ++j) out[i] += u[i * d_w + j] * psi_w[j];
  return out;
}

void check_lengths(const FeatureMap& psi_a2, std::size_t d_w, const Vector& u, const Vector& mu_w) {
  if (u.size() != features::output_dim(psi_a2) * d_w)
    throw InvalidArgument("bridge: u length must be dim(psi_a2) x dim(psi_w)");
  if (mu_w.size() != d_w) throw InvalidArgument("bridge: mu_w length must be dim(psi_w)");
}

}  // namespace

void StructuralEstimate::validate() const { check_lengths(psi_a2, mu_w.size(), u, mu_w); }

void BridgeModel::validate() const { check_lengths(psi_a2, features::output_dim(psi_w), u, mu_w); }

BridgeModel bridge_from(const two_stage::DfpvModel& model) {
  BridgeModel b{model.features.psi_a2, model.features.psi_w, model.u, model.mu_w};
  b.validate();
  return b;
}

BridgeModel bridge_from(const two_stage::FixedFeatureModel& model) {
  BridgeModel b{model.dicts.psi_a2, model.dicts.psi_w, model.u, model.mu_w};
  b.validate();
  return b;
}

Vector mean_outcome_feature(const FeatureMap& psi_w, const DenseMatrix& samples) {
  if (samples.rows() == 0) throw InvalidArgument("mean_outcome_feature: no samples");
  return numkit::column_mean(features::apply(psi_w, samples));
}

double eval_structural(const StructuralEstimate& est, std::span<const double> a) {
  est.validate();
  const Vector fa = features::apply(est.psi_a2, a);
  return numkit::dot(fa, contract_proxy(est.u, est.mu_w, fa.size()));
}

Vector eval_structural(const StructuralEstimate& est, const DenseMatrix& grid) {
  est.validate();
  const DenseMatrix fa = features::apply(est.psi_a2, grid);
  const Vector um = contract_proxy(est.u, est.mu_w, fa.cols());
  return numkit::matvec(fa, um);
}

double eval_bridge(const BridgeModel& model, std::span<const double> a, std::span<const double> w) {
  model.validate();
  const Vector fa = features::apply(model.psi_a2, a);
  const Vector fw = features::apply(model.psi_w, w);
  return numkit::dot(fa, contract_proxy(model.u, fw, fa.size()));
}

Vector eval_bridge(const BridgeModel& model, const DenseMatrix& a, const DenseMatrix& w) {
  model.validate();
  if (a.rows() != w.rows()) throw InvalidArgument("eval_bridge: a and w row counts differ");
  const DenseMatrix fa = features::apply(model.psi_a2, a);
  const DenseMatrix fw = features::apply(model.psi_w, w);
  const DenseMatrix u(fa.cols(), fw.cols(), model.u);
  const DenseMatrix uw = numkit::matmul_nt(fw, u);  // rows x d_A2
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = numkit::dot(fa.row(i), uw.row(i));
  return out;
}

double estimate_value(const BridgeModel& model, const Policy& policy, const datagen::Split& s3) {
  if (s3.size() == 0) throw InvalidArgument("estimate_value: empty evaluation sample");
  if (!s3.has_w()) throw InvalidArgument("estimate_value: evaluation sample needs w");
  const DenseMatrix& ctx = context_role(policy) == ContextRole::treatment ? s3.a : s3.z;
  if (ctx.rows() != s3.size()) throw InvalidArgument("estimate_value: context rows missing");
  DenseMatrix actions(s3.size(), features::input_dim(model.psi_a2));
  if (actions.cols() != 1) throw InvalidArgument("estimate_value: policies produce scalar treatments");
  for (std::size_t i = 0; i < s3.size(); ++i) actions(i, 0) = apply_policy(policy, ctx.row(i));
  const Vector h = eval_bridge(model, actions, s3.w);
  double s = 0.0;
  for (double v : h) s += v;
  return s / static_cast<double>(h.size());
}

}  // namespace dfpv::causal
