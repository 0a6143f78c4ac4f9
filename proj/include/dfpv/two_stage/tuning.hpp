#pragma once

#include <functional>
#include <vector>

#include "dfpv/two_stage/dfpv.hpp"
#include "dfpv/two_stage/fixed_feature.hpp"

namespace dfpv::two_stage {

struct LambdaPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  friend bool operator==(const LambdaPair&, const LambdaPair&) = default;
};

// Out-of-sample losses for one grid point: the stage-1 feature loss on stage-2 (a, z, w) and the
// stage-2 outcome loss on stage-1 (a, z, y), both without penalties.
struct TuningScore {
  double stage1_oos = 0.0;
  double stage2_oos = 0.0;
};

struct TuningRow {
  LambdaPair lambdas;
  TuningScore score;
};

struct TuningResult {
  LambdaPair best;
  std::vector<TuningRow> table;  // one row per distinct grid point, sorted by (lambda1, lambda2)
};

// {1e-4, 1e-3, 1e-2, 1e-1, 1, 10} squared.
std::vector<LambdaPair> default_lambda_grid();

// Sorted by (lambda1, lambda2) with duplicates removed; throws on an empty or invalid grid.
std::vector<LambdaPair> dedupe_grid(const std::vector<LambdaPair>& grid);

// Scores every distinct grid point and picks the smallest stage-2 loss. Scores equal to within
// 1e-12 relative count as ties, resolved toward larger lambda2, then larger lambda1.
TuningResult select_lambdas(const std::vector<LambdaPair>& grid, const std::function<TuningScore(LambdaPair)>& score);

// The stage-1 solve is shared by all grid points with the same lambda1.
TuningResult tune_fixed_feature(const ObservationSet& data, const FixedDictionaries& dicts,
                                const std::vector<LambdaPair>& grid);

// Trains one DFPV model per grid point; expensive.
TuningResult tune_dfpv(const ObservationSet& data, const TrainConfig& config, const DfpvArchitecture& arch,
                       const std::vector<LambdaPair>& grid);

}  // namespace dfpv::two_stage
