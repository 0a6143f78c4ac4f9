#include "dfpv/two_stage/dfpv.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/grad_tape.hpp"
#include "dfpv/numkit/linalg.hpp"
#include "dfpv/numkit/random.hpp"
#include "dfpv/two_stage/adam.hpp"
#include "dfpv/two_stage/ridge.hpp"

namespace dfpv::two_stage {

using numkit::GradTape;

namespace {

void require_finite(double loss, const char* what) {
  if (!std::isfinite(loss)) throw NonfiniteLossError(std::string(what) + " is not finite");
}

DenseMatrix stage1_inputs(const DfpvFeatures& f, const DenseMatrix& a, const DenseMatrix& z) {
  return numkit::row_kron(features::mlp_forward(f.phi_a1, a), features::mlp_forward(f.phi_z, z));
}

Vector concat(const Vector& a, const Vector& b) {
  Vector out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void assign_pair(MlpFeatureMap& first, MlpFeatureMap& second, const Vector& flat) {
  const std::size_t n1 = first.parameter_count();
  first.assign_parameters(std::span<const double>(flat).subspan(0, n1));
  second.assign_parameters(std::span<const double>(flat).subspan(n1));
}

// Yields successive mini-batches, reshuffling at the start of every epoch.
class BatchCursor {
 public:
  BatchCursor(std::size_t n, std::optional<std::size_t> batch, numkit::CounterRng& rng)
      : n_(n), batch_(batch && *batch < n ? *batch : n), rng_(rng) {}

  bool full() const noexcept { return batch_ == n_; }

  std::vector<std::size_t> next() {
    if (perm_.empty() || pos_ + batch_ > n_) {
      perm_ = numkit::permutation(n_, rng_);
      pos_ = 0;
    }
    std::vector<std::size_t> out(perm_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                 perm_.begin() + static_cast<std::ptrdiff_t>(pos_ + batch_));
    pos_ += batch_;
    return out;
  }

 private:
  std::size_t n_;
  std::size_t batch_;
  numkit::CounterRng& rng_;
  std::vector<std::size_t> perm_;
  std::size_t pos_ = 0;
};

std::uint64_t role_seed(std::uint64_t seed, std::uint64_t role) {
  numkit::CounterRng rng(seed, 0x726f6c65ULL + role);
  return rng();
}

std::vector<std::size_t> dims_with_input(std::size_t input, const std::vector<std::size_t>& widths) {
  std::vector<std::size_t> dims{input};
  dims.insert(dims.end(), widths.begin(), widths.end());
  return dims;
}

DenseMatrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto r = j.at(i).get<std::vector<double>>();
    if (r.size() != cols) throw InvalidArgument("matrix json: ragged rows");
    std::copy(r.begin(), r.end(), m.row(i).begin());
  }
  return m;
}

nlohmann::json matrix_to_json(const DenseMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

}  // namespace

Stage1LossResult dfpv_stage1_loss(const DfpvFeatures& f, const Split& stage1, double lambda1) {
  return dfpv_stage1_loss(f, stage1, features::mlp_forward(f.psi_w, stage1.w), lambda1);
}

Stage1LossResult dfpv_stage1_loss(const DfpvFeatures& f, const Split& stage1, const DenseMatrix& psi1,
                                  double lambda1) {
  const std::size_t m = stage1.size();
  if (m == 0) throw InvalidArgument("dfpv_stage1_loss: empty stage-1 data");
  if (psi1.rows() != m) throw InvalidArgument("dfpv_stage1_loss: target rows differ from stage-1 size");

  GradTape tape;
  const auto a1 = features::record_mlp(tape, f.phi_a1, stage1.a);
  const auto zf = features::record_mlp(tape, f.phi_z, stage1.z);
  const auto phi1 = tape.row_kron(a1.output, zf.output);

  Stage1LossResult out;
  out.weights = fit_stage1_weights(psi1, tape.value(phi1), lambda1);
  const double penalty = lambda1 * numkit::squared_norm(out.weights.data());
  const auto pred = tape.matmul_const_right(phi1, out.weights.transpose());
  const auto loss = tape.squared_error(pred, psi1, 1.0 / static_cast<double>(m), penalty);
  out.loss = tape.value(loss)(0, 0);
  require_finite(out.loss, "stage-1 loss");

  const auto grads = tape.backward(loss);
  out.grad_phi_a1 = a1.flat_gradient(grads);
  out.grad_phi_z = zf.flat_gradient(grads);
  return out;
}

Stage2LossResult dfpv_stage2_loss(const DfpvFeatures& f, const Split& stage1, const Split& stage2,
                                  double lambda1, double lambda2) {
  const std::size_t n = stage2.size();
  if (stage1.size() == 0 || n == 0) throw InvalidArgument("dfpv_stage2_loss: empty data");
  if (!stage2.has_y()) throw InvalidArgument("dfpv_stage2_loss: stage-2 outcomes missing");

  // Stage-1 features are frozen here; only psi_a2 and psi_w are differentiated.
  const DenseMatrix phi1 = stage1_inputs(f, stage1.a, stage1.z);
  const DenseMatrix phi1_stage2 = stage1_inputs(f, stage2.a, stage2.z);
  DenseMatrix projection = stage1_projection(phi1, lambda1);

  GradTape tape;
  const auto wf = features::record_mlp(tape, f.psi_w, stage1.w);
  const auto vt = tape.matmul_const_left(std::move(projection), wf.output);
  const auto w_hat = tape.matmul_const_left(phi1_stage2, vt);
  const auto a2 = features::record_mlp(tape, f.psi_a2, stage2.a);
  const auto phi2 = tape.row_kron(a2.output, w_hat);

  Stage2LossResult out;
  out.weights = fit_stage2_weights(tape.value(phi2), stage2.y, lambda2);
  out.stage1_weights = tape.value(vt).transpose();
  const double penalty = lambda2 * numkit::squared_norm(out.weights);
  const auto pred = tape.matmul_const_right(phi2, DenseMatrix::column(out.weights));
  const auto loss = tape.squared_error(pred, DenseMatrix::column(stage2.y), 1.0 / static_cast<double>(n), penalty);
  out.loss = tape.value(loss)(0, 0);
  require_finite(out.loss, "stage-2 loss");

  const auto grads = tape.backward(loss);
  out.grad_psi_a2 = a2.flat_gradient(grads);
  out.grad_psi_w = wf.flat_gradient(grads);
  return out;
}

DenseMatrix DfpvModel::predict_outcome_proxy_mean(const DenseMatrix& a, const DenseMatrix& z) const {
  return numkit::matmul_nt(stage1_inputs(features, a, z), V);
}

DfpvFeatures init_dfpv_features(const ObservationSet& data, const DfpvArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  DfpvFeatures f{
      features::init_mlp(dims_with_input(data.stage1.a.cols(), arch.phi_a1), role_seed(seed, 0)),
      features::init_mlp(dims_with_input(data.stage1.z.cols(), arch.phi_z), role_seed(seed, 1)),
      features::init_mlp(dims_with_input(data.stage2.a.cols(), arch.psi_a2), role_seed(seed, 2)),
      features::init_mlp(dims_with_input(data.stage1.w.cols(), arch.psi_w), role_seed(seed, 3)),
  };
  for (auto* m : {&f.phi_a1, &f.phi_z, &f.psi_a2, &f.psi_w}) m->set_constant_feature(arch.constant_feature);
  if (arch.standardize_inputs) {
    f.phi_a1.fit_input_standardization(data.stage1.a);
    f.phi_z.fit_input_standardization(data.stage1.z);
    f.psi_a2.fit_input_standardization(data.stage2.a);
    f.psi_w.fit_input_standardization(data.stage1.w);
  }
  return f;
}

DfpvModel finalize_dfpv(DfpvFeatures features, const ObservationSet& data, const TrainConfig& config) {
  DfpvModel model;
  model.features = std::move(features);
  model.config = config;
  const auto& f = model.features;
  const DenseMatrix psi1 = features::mlp_forward(f.psi_w, data.stage1.w);
  const DenseMatrix phi1 = stage1_inputs(f, data.stage1.a, data.stage1.z);
  model.V = fit_stage1_weights(psi1, phi1, config.lambda1);
  model.final_stage1_loss = mean_squared_residual(psi1, phi1, model.V) +
                            config.lambda1 * numkit::squared_norm(model.V.data());

  const DenseMatrix w_hat = model.predict_outcome_proxy_mean(data.stage2.a, data.stage2.z);
  const DenseMatrix phi2 = numkit::row_kron(features::mlp_forward(f.psi_a2, data.stage2.a), w_hat);
  model.u = fit_stage2_weights(phi2, data.stage2.y, config.lambda2);
  const Vector pred = numkit::matvec(phi2, model.u);
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sse += (data.stage2.y[i] - pred[i]) * (data.stage2.y[i] - pred[i]);
  model.final_stage2_loss = sse / static_cast<double>(pred.size()) + config.lambda2 * numkit::squared_norm(model.u);

  model.mu_w = numkit::column_mean(features::mlp_forward(f.psi_w, data.outcome_proxy_samples()));
  require_finite(model.final_stage1_loss, "final stage-1 loss");
  require_finite(model.final_stage2_loss, "final stage-2 loss");
  return model;
}

DfpvModel train_dfpv(const ObservationSet& data, const TrainConfig& config, const DfpvArchitecture& arch) {
  config.validate();
  data.validate();

  DfpvFeatures f = init_dfpv_features(data, arch, config.seed);
  Vector theta1 = concat(f.phi_a1.flatten_parameters(), f.phi_z.flatten_parameters());
  Vector theta2 = concat(f.psi_a2.flatten_parameters(), f.psi_w.flatten_parameters());
  Adam adam1(theta1.size(), config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_eps);
  Adam adam2(theta2.size(), config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_eps);

  numkit::CounterRng batch_rng(config.seed, 0x62617463ULL);
  BatchCursor cursor1(data.stage1.size(), config.batch_size, batch_rng);
  BatchCursor cursor2(data.stage2.size(), config.batch_size, batch_rng);

  TrainTrace trace;
  std::size_t t = 0;
  try {
    for (; t < config.outer_iterations; ++t) {
      double l1 = 0.0;
      if (cursor1.full()) {
        const DenseMatrix psi1 = features::mlp_forward(f.psi_w, data.stage1.w);
        for (std::size_t k = 0; k < config.stage1_inner_steps; ++k) {
          const auto r = dfpv_stage1_loss(f, data.stage1, psi1, config.lambda1);
          adam1.step(theta1, concat(r.grad_phi_a1, r.grad_phi_z));
          assign_pair(f.phi_a1, f.phi_z, theta1);
          l1 = r.loss;
        }
      } else {
        for (std::size_t k = 0; k < config.stage1_inner_steps; ++k) {
          const auto idx = cursor1.next();
          const auto r = dfpv_stage1_loss(f, data.stage1.subset(idx), config.lambda1);
          adam1.step(theta1, concat(r.grad_phi_a1, r.grad_phi_z));
          assign_pair(f.phi_a1, f.phi_z, theta1);
          l1 = r.loss;
        }
      }

      double l2 = 0.0;
      for (std::size_t k = 0; k < config.stage2_steps; ++k) {
        Stage2LossResult r;
        if (cursor1.full() && cursor2.full()) {
          r = dfpv_stage2_loss(f, data.stage1, data.stage2, config.lambda1, config.lambda2);
        } else {
          const auto i1 = cursor1.next();
          const auto i2 = cursor2.next();
          r = dfpv_stage2_loss(f, data.stage1.subset(i1), data.stage2.subset(i2), config.lambda1, config.lambda2);
        }
        adam2.step(theta2, concat(r.grad_psi_a2, r.grad_psi_w));
        assign_pair(f.psi_a2, f.psi_w, theta2);
        l2 = r.loss;
      }

      trace.stage1_loss.push_back(l1);
      trace.stage2_loss.push_back(l2);
      const std::size_t w = config.convergence_window;
      if (trace.stage2_loss.size() > w) {
        const double prev = trace.stage2_loss[trace.stage2_loss.size() - 1 - w];
        if (std::abs(l2 - prev) <= config.convergence_rtol * std::abs(prev)) {
          trace.converged = true;
          ++t;
          break;
        }
      }
    }
  } catch (const NonfiniteLossError& e) {
    throw NonfiniteLossError(std::string("train_dfpv: ") + e.what() + " at outer iteration " + std::to_string(t),
                             static_cast<long>(t), trace.stage2_loss);
  }
  trace.iterations = t;

  DfpvModel model = finalize_dfpv(std::move(f), data, config);
  model.trace = std::move(trace);
  return model;
}

void to_json(nlohmann::json& j, const DfpvModel& model) {
  nlohmann::json cfg;
  to_json(cfg, model.config);
  nlohmann::json a1, z, a2, w;
  features::to_json(a1, model.features.phi_a1);
  features::to_json(z, model.features.phi_z);
  features::to_json(a2, model.features.psi_a2);
  features::to_json(w, model.features.psi_w);
  j = nlohmann::json{{"estimator", "dfpv"},
                     {"phi_a1", a1},
                     {"phi_z", z},
                     {"psi_a2", a2},
                     {"psi_w", w},
                     {"V", matrix_to_json(model.V)},
                     {"u", model.u},
                     {"mu_w", model.mu_w},
                     {"config", cfg},
                     {"final_losses", {model.final_stage1_loss, model.final_stage2_loss}},
                     {"iterations", model.trace.iterations}};
}

DfpvModel dfpv_model_from_json(const nlohmann::json& j) {
  try {
    DfpvModel m;
    m.features.phi_a1 = features::mlp_from_json(j.at("phi_a1"));
    m.features.phi_z = features::mlp_from_json(j.at("phi_z"));
    m.features.psi_a2 = features::mlp_from_json(j.at("psi_a2"));
    m.features.psi_w = features::mlp_from_json(j.at("psi_w"));
    m.V = matrix_from_json(j.at("V"));
    m.u = j.at("u").get<Vector>();
    m.mu_w = j.at("mu_w").get<Vector>();
    if (j.contains("config")) m.config = j.at("config").get<TrainConfig>();
    if (j.contains("final_losses")) {
      m.final_stage1_loss = j.at("final_losses").at(0).get<double>();
      m.final_stage2_loss = j.at("final_losses").at(1).get<double>();
    }
    m.trace.iterations = j.value("iterations", std::size_t{0});
    const std::size_t d_w = m.features.psi_w.output_dim();
    if (m.V.rows() != d_w || m.V.cols() != m.features.phi_a1.output_dim() * m.features.phi_z.output_dim())
      throw InvalidArgument("dfpv model json: V shape inconsistent with feature maps");
    if (m.u.size() != m.features.psi_a2.output_dim() * d_w || m.mu_w.size() != d_w)
      throw InvalidArgument("dfpv model json: u or mu_w length inconsistent with feature maps");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("dfpv model json: ") + e.what());
  }
}

}  // namespace dfpv::two_stage
