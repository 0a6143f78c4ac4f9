#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dfpv::two_stage {

struct TrainConfig {
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t outer_iterations = 200;
  std::size_t stage1_inner_steps = 20;
  std::size_t stage2_steps = 1;
  std::optional<std::size_t> batch_size;  // full batch when empty
  // Stop when L2 changed by less than this fraction over `convergence_window` outer iterations.
  double convergence_rtol = 1e-5;
  std::size_t convergence_window = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Hidden and output widths per feature network; input widths come from the data.
struct DfpvArchitecture {
  std::vector<std::size_t> phi_a1{32, 16, 8};
  std::vector<std::size_t> phi_z{32, 16, 8};
  std::vector<std::size_t> psi_a2{32, 16, 8};
  std::vector<std::size_t> psi_w{32, 16, 8};
  bool standardize_inputs = false;
  // Append a constant coordinate to every network's output.
  bool constant_feature = true;

  static DfpvArchitecture uniform(std::vector<std::size_t> widths);
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const DfpvArchitecture& a);
void from_json(const nlohmann::json& j, DfpvArchitecture& a);

}  // namespace dfpv::two_stage
