#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "dfpv/datagen/ground_truth.hpp"
#include "dfpv/datagen/mastouri.hpp"
#include "dfpv/datagen/observation_set.hpp"

namespace dfpv::datagen {

enum class DgpKind { demand, mastouri, dsprite_surrogate };

std::string to_string(DgpKind k);
DgpKind dgp_from_string(const std::string& s);

struct DgpOptions {
  NoiseConvention noise = NoiseConvention::variance;  // mastouri only
  std::size_t embed_dim = 16;                         // dsprite_surrogate only
  std::size_t truth_mc = 1000000;                     // demand truth draws
  // Seeds the truth oracle and the fixed parts of the surrogate renderer; kept apart from the
  // per-simulation data seeds so every simulation is scored against the same truth.
  std::uint64_t truth_seed = 7919;
};

void to_json(nlohmann::json& j, const DgpOptions& o);
void from_json(const nlohmann::json& j, DgpOptions& o);

// n_stage1 = n_stage2 = n; the optional third block of n_ope records is demand only.
ObservationSet generate(DgpKind kind, std::size_t n, std::uint64_t seed, const DgpOptions& opts,
                        std::size_t n_ope = 0);
GroundTruth ground_truth(DgpKind kind, const DgpOptions& opts);

struct DatasetMeta {
  std::string dgp;
  std::uint64_t seed = 0;
  std::size_t n_stage1 = 0;
  std::size_t n_stage2 = 0;
  std::size_t n_ope = 0;
  std::string noise_convention = "variance";
};

// Columns stage (1, 2 or 3), a_*, z_*, w_*, y. Values use 17 significant digits.
void write_dataset_csv(const std::string& path, const ObservationSet& data);
ObservationSet read_dataset_csv(const std::string& path);
void write_dataset_sidecar(const std::string& path, const DatasetMeta& meta, const ObservationSet& data);

}  // namespace dfpv::datagen
