#include "dfpv/two_stage/train_config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "dfpv/errors.hpp"

namespace dfpv::two_stage {

void TrainConfig::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2))
    throw InvalidArgument("TrainConfig: lambda1 and lambda2 must be finite and >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("TrainConfig: learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw InvalidArgument("TrainConfig: Adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw InvalidArgument("TrainConfig: adam_eps must be > 0");
  if (outer_iterations == 0 || stage1_inner_steps == 0 || stage2_steps == 0 || convergence_window == 0)
    throw InvalidArgument("TrainConfig: iteration counts must be >= 1");
  if (batch_size && *batch_size == 0) throw InvalidArgument("TrainConfig: batch_size must be >= 1");
  if (!(convergence_rtol >= 0.0)) throw InvalidArgument("TrainConfig: convergence_rtol must be >= 0");
}

DfpvArchitecture DfpvArchitecture::uniform(std::vector<std::size_t> widths) {
  DfpvArchitecture a;
  a.phi_a1 = a.phi_z = a.psi_a2 = a.psi_w = std::move(widths);
  return a;
}

void DfpvArchitecture::validate() const {
  for (const auto* w : {&phi_a1, &phi_z, &psi_a2, &psi_w}) {
    if (w->empty()) throw InvalidArgument("DfpvArchitecture: each network needs at least one layer");
    for (std::size_t d : *w)
      if (d == 0) throw InvalidArgument("DfpvArchitecture: zero-width layer");
  }
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"lambda1", c.lambda1},
                     {"lambda2", c.lambda2},
                     {"learning_rate", c.learning_rate},
                     {"adam_beta1", c.adam_beta1},
                     {"adam_beta2", c.adam_beta2},
                     {"adam_eps", c.adam_eps},
                     {"outer_iterations", c.outer_iterations},
                     {"stage1_inner_steps", c.stage1_inner_steps},
                     {"stage2_steps", c.stage2_steps},
                     {"convergence_rtol", c.convergence_rtol},
                     {"convergence_window", c.convergence_window},
                     {"seed", c.seed}};
  j["batch_size"] = c.batch_size ? nlohmann::json(*c.batch_size) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.lambda1 = j.value("lambda1", d.lambda1);
  c.lambda2 = j.value("lambda2", d.lambda2);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.adam_beta1 = j.value("adam_beta1", d.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", d.adam_beta2);
  c.adam_eps = j.value("adam_eps", d.adam_eps);
  c.outer_iterations = j.value("outer_iterations", d.outer_iterations);
  c.stage1_inner_steps = j.value("stage1_inner_steps", d.stage1_inner_steps);
  c.stage2_steps = j.value("stage2_steps", d.stage2_steps);
  c.convergence_rtol = j.value("convergence_rtol", d.convergence_rtol);
  c.convergence_window = j.value("convergence_window", d.convergence_window);
  c.seed = j.value("seed", d.seed);
  c.batch_size.reset();
  if (j.contains("batch_size") && !j.at("batch_size").is_null()) c.batch_size = j.at("batch_size").get<std::size_t>();
}

void to_json(nlohmann::json& j, const DfpvArchitecture& a) {
  j = nlohmann::json{{"phi_a1", a.phi_a1},
                     {"phi_z", a.phi_z},
                     {"psi_a2", a.psi_a2},
                     {"psi_w", a.psi_w},
                     {"standardize_inputs", a.standardize_inputs},
                     {"constant_feature", a.constant_feature}};
}

void from_json(const nlohmann::json& j, DfpvArchitecture& a) {
  DfpvArchitecture d;
  if (j.contains("widths")) d = DfpvArchitecture::uniform(j.at("widths").get<std::vector<std::size_t>>());
  a.phi_a1 = j.value("phi_a1", d.phi_a1);
  a.phi_z = j.value("phi_z", d.phi_z);
  a.psi_a2 = j.value("psi_a2", d.psi_a2);
  a.psi_w = j.value("psi_w", d.psi_w);
  a.standardize_inputs = j.value("standardize_inputs", d.standardize_inputs);
  a.constant_feature = j.value("constant_feature", d.constant_feature);
}

}  // namespace dfpv::two_stage
