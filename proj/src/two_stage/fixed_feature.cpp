#include "dfpv/two_stage/fixed_feature.hpp"

#include <nlohmann/json.hpp>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/linalg.hpp"
#include "dfpv/two_stage/ridge.hpp"

namespace dfpv::two_stage {

using features::rbf_features;

namespace {

double sum_of_products(const DenseMatrix& a, const DenseMatrix& b) {
  return numkit::dot(a.data(), b.data());
}

double mean_sq_diff(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix d = a - b;
  return numkit::squared_norm(d.data()) / static_cast<double>(a.rows());
}

bool use_primal(SolveRoute route, std::size_t dim, std::size_t rows) {
  if (route == SolveRoute::automatic) return dim <= rows;
  return route == SolveRoute::primal;
}

}  // namespace

FixedDictionaries make_fixed_dictionaries(const ObservationSet& data, std::size_t max_centers, std::uint64_t seed) {
  if (max_centers == 0) throw InvalidArgument("make_fixed_dictionaries: max_centers must be >= 1");
  const Split& s1 = data.stage1;
  if (!s1.has_w()) throw InvalidArgument("make_fixed_dictionaries: stage-1 w missing");
  return FixedDictionaries{
      features::make_rbf_dictionary(s1.a, max_centers, seed * 4 + 0),
      features::make_rbf_dictionary(s1.z, max_centers, seed * 4 + 1),
      features::make_rbf_dictionary(s1.a, max_centers, seed * 4 + 2),
      features::make_rbf_dictionary(s1.w, max_centers, seed * 4 + 3),
  };
}

Stage1Fit::Stage1Fit(const FixedDictionaries& dicts, const Split& stage1, double lambda1, SolveRoute route)
    : dicts_(dicts), lambda_(lambda1) {
  if (stage1.size() == 0 || !stage1.has_w()) throw InvalidArgument("Stage1Fit: stage-1 data needs a, z and w");
  if (!(lambda1 >= 0.0)) throw InvalidArgument("Stage1Fit: lambda1 must be >= 0");
  const double m = static_cast<double>(stage1.size());
  const DenseMatrix psi1 = rbf_features(stage1.w, dicts_.psi_w);
  DenseMatrix fa = rbf_features(stage1.a, dicts_.phi_a1);
  DenseMatrix fz = rbf_features(stage1.z, dicts_.phi_z);
  if (use_primal(route, fa.cols() * fz.cols(), stage1.size())) {
    const DenseMatrix phi1 = numkit::row_kron(fa, fz);
    v_ = fit_stage1_weights(psi1, phi1, lambda1);
    weight_norm_sq_ = numkit::squared_norm(v_->data());
    loss_ = mean_squared_residual(psi1, phi1, *v_) + lambda1 * weight_norm_sq_;
    return;
  }
  const DenseMatrix g1 = numkit::hadamard(numkit::matmul_nt(fa, fa), numkit::matmul_nt(fz, fz));
  s_ = numkit::solve_spd(numkit::add_diagonal(g1, m * lambda1), psi1);
  const DenseMatrix fitted = numkit::matmul(g1, s_);
  weight_norm_sq_ = sum_of_products(s_, fitted);
  loss_ = mean_sq_diff(psi1, fitted) + lambda1 * weight_norm_sq_;
  train_fa_ = std::move(fa);
  train_fz_ = std::move(fz);
}

DenseMatrix Stage1Fit::predict(const DenseMatrix& a, const DenseMatrix& z) const {
  if (a.rows() != z.rows()) throw InvalidArgument("Stage1Fit::predict: a and z row counts differ");
  const DenseMatrix fa = rbf_features(a, dicts_.phi_a1);
  const DenseMatrix fz = rbf_features(z, dicts_.phi_z);
  if (v_) return numkit::matmul_nt(numkit::row_kron(fa, fz), *v_);
  const DenseMatrix k = numkit::hadamard(numkit::matmul_nt(train_fa_, fa), numkit::matmul_nt(train_fz_, fz));
  return numkit::matmul_tn(k, s_);
}

FixedFeatureModel fit_fixed_stage2(const FixedDictionaries& dicts, const Stage1Fit& stage1, const ObservationSet& data,
                                   double lambda2, SolveRoute route) {
  const Split& s2 = data.stage2;
  if (s2.size() == 0 || !s2.has_y()) throw InvalidArgument("fit_fixed_stage2: stage-2 data needs a, z and y");
  if (!(lambda2 >= 0.0)) throw InvalidArgument("fit_fixed_stage2: lambda2 must be >= 0");
  const double n = static_cast<double>(s2.size());

  FixedFeatureModel model{dicts, {}, {}, stage1.lambda(), lambda2, stage1.loss(), 0.0};
  const DenseMatrix fa = rbf_features(s2.a, dicts.psi_a2);
  const DenseMatrix w_hat = stage1.predict(s2.a, s2.z);
  Vector fitted;
  double norm_sq = 0.0;
  if (use_primal(route, fa.cols() * w_hat.cols(), s2.size())) {
    const DenseMatrix phi2 = numkit::row_kron(fa, w_hat);
    model.u = fit_stage2_weights(phi2, s2.y, lambda2);
    fitted = numkit::matvec(phi2, model.u);
    norm_sq = numkit::squared_norm(model.u);
  } else {
    const DenseMatrix g2 = numkit::hadamard(numkit::matmul_nt(fa, fa), numkit::matmul_nt(w_hat, w_hat));
    const DenseMatrix alpha = numkit::solve_spd(numkit::add_diagonal(g2, n * lambda2), DenseMatrix::column(s2.y));
    DenseMatrix scaled = w_hat;
    for (std::size_t i = 0; i < scaled.rows(); ++i)
      for (double& v : scaled.row(i)) v *= alpha(i, 0);
    model.u = numkit::matmul_tn(fa, scaled).storage();
    fitted = numkit::matmul(g2, alpha).storage();
    norm_sq = numkit::dot(alpha.data(), fitted);
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < fitted.size(); ++i) sse += (s2.y[i] - fitted[i]) * (s2.y[i] - fitted[i]);
  model.stage2_loss = sse / n + lambda2 * norm_sq;
  model.mu_w = numkit::column_mean(rbf_features(data.outcome_proxy_samples(), dicts.psi_w));
  return model;
}

FixedFeatureModel fit_fixed_feature(const ObservationSet& data, const FixedDictionaries& dicts, double lambda1,
                                    double lambda2, SolveRoute route) {
  data.validate();
  const Stage1Fit stage1(dicts, data.stage1, lambda1, route);
  return fit_fixed_stage2(dicts, stage1, data, lambda2, route);
}

Vector fixed_feature_outcome(const FixedFeatureModel& model, const DenseMatrix& a, const DenseMatrix& v) {
  const std::size_t da = model.dicts.psi_a2.size(), dw = model.dicts.psi_w.size();
  if (a.rows() != v.rows() || v.cols() != dw) throw InvalidArgument("fixed_feature_outcome: shape mismatch");
  if (model.u.size() != da * dw) throw InvalidArgument("fixed_feature_outcome: u has the wrong length");
  const DenseMatrix fa = rbf_features(a, model.dicts.psi_a2);
  const DenseMatrix u(da, dw, model.u);
  const DenseMatrix uv = numkit::matmul_nt(u, v);  // da x rows
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < da; ++k) out[i] += fa(i, k) * uv(k, i);
  return out;
}

void to_json(nlohmann::json& j, const FixedFeatureModel& model) {
  nlohmann::json a1, z, a2, w;
  features::to_json(a1, model.dicts.phi_a1);
  features::to_json(z, model.dicts.phi_z);
  features::to_json(a2, model.dicts.psi_a2);
  features::to_json(w, model.dicts.psi_w);
  j = nlohmann::json{{"estimator", "fixed_feature"},
                     {"phi_a1", a1},
                     {"phi_z", z},
                     {"psi_a2", a2},
                     {"psi_w", w},
                     {"u", model.u},
                     {"mu_w", model.mu_w},
                     {"lambda1", model.lambda1},
                     {"lambda2", model.lambda2},
                     {"final_losses", {model.stage1_loss, model.stage2_loss}}};
}

FixedFeatureModel fixed_feature_model_from_json(const nlohmann::json& j) {
  try {
    FixedFeatureModel m{FixedDictionaries{features::rbf_from_json(j.at("phi_a1")), features::rbf_from_json(j.at("phi_z")),
                                          features::rbf_from_json(j.at("psi_a2")), features::rbf_from_json(j.at("psi_w"))},
                        j.at("u").get<Vector>(),
                        j.at("mu_w").get<Vector>(),
                        j.value("lambda1", 0.0),
                        j.value("lambda2", 0.0),
                        0.0,
                        0.0};
    if (j.contains("final_losses")) {
      m.stage1_loss = j.at("final_losses").at(0).get<double>();
      m.stage2_loss = j.at("final_losses").at(1).get<double>();
    }
    if (m.u.size() != m.dicts.psi_a2.size() * m.dicts.psi_w.size() || m.mu_w.size() != m.dicts.psi_w.size())
      throw InvalidArgument("fixed-feature model json: u or mu_w length inconsistent with dictionaries");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("fixed-feature model json: ") + e.what());
  }
}

}  // namespace dfpv::two_stage
