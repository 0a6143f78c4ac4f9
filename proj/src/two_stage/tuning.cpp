#include "dfpv/two_stage/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/linalg.hpp"

namespace dfpv::two_stage {

namespace {

void require_full_splits(const ObservationSet& data) {
  data.validate();
  if (!data.has_full_splits()) throw InvalidArgument("tuning needs (a, z, w, y) in both splits");
}

double mean_sq(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix d = a - b;
  return numkit::squared_norm(d.data()) / static_cast<double>(a.rows());
}

double mean_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

bool better(const TuningRow& cand, const TuningRow& best) {
  const double a = cand.score.stage2_oos, b = best.score.stage2_oos;
  if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b))) return a < b;
  if (cand.lambdas.lambda2 != best.lambdas.lambda2) return cand.lambdas.lambda2 > best.lambdas.lambda2;
  return cand.lambdas.lambda1 > best.lambdas.lambda1;
}

}  // namespace

std::vector<LambdaPair> default_lambda_grid() {
  const double values[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<LambdaPair> grid;
  for (double l1 : values)
    for (double l2 : values) grid.push_back({l1, l2});
  return grid;
}

std::vector<LambdaPair> dedupe_grid(const std::vector<LambdaPair>& grid) {
  if (grid.empty()) throw InvalidArgument("lambda grid is empty");
  for (const auto& p : grid)
    if (!(p.lambda1 >= 0.0) || !(p.lambda2 >= 0.0) || !std::isfinite(p.lambda1) || !std::isfinite(p.lambda2))
      throw InvalidArgument("lambda grid entries must be finite and >= 0");
  std::vector<LambdaPair> out = grid;
  std::sort(out.begin(), out.end(), [](const LambdaPair& x, const LambdaPair& y) {
    return x.lambda1 != y.lambda1 ? x.lambda1 < y.lambda1 : x.lambda2 < y.lambda2;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TuningResult select_lambdas(const std::vector<LambdaPair>& grid, const std::function<TuningScore(LambdaPair)>& score) {
  TuningResult result;
  for (const auto& p : dedupe_grid(grid)) result.table.push_back({p, score(p)});
  const TuningRow* best = &result.table.front();
  for (const auto& row : result.table)
    if (better(row, *best)) best = &row;
  result.best = best->lambdas;
  return result;
}

TuningResult tune_fixed_feature(const ObservationSet& data, const FixedDictionaries& dicts,
                                const std::vector<LambdaPair>& grid) {
  require_full_splits(data);
  const Split& s1 = data.stage1;
  const Split& s2 = data.stage2;
  const DenseMatrix psi_w_stage2 = features::rbf_features(s2.w, dicts.psi_w);
  std::map<double, Stage1Fit> stage1_cache;
  std::map<double, double> stage1_oos;
  return select_lambdas(grid, [&](LambdaPair p) {
    auto it = stage1_cache.find(p.lambda1);
    if (it == stage1_cache.end()) {
      it = stage1_cache.emplace(p.lambda1, Stage1Fit(dicts, s1, p.lambda1)).first;
      stage1_oos[p.lambda1] = mean_sq(psi_w_stage2, it->second.predict(s2.a, s2.z));
    }
    const FixedFeatureModel model = fit_fixed_stage2(dicts, it->second, data, p.lambda2);
    const Vector pred = fixed_feature_outcome(model, s1.a, it->second.predict(s1.a, s1.z));
    return TuningScore{stage1_oos[p.lambda1], mean_sq(pred, s1.y)};
  });
}

TuningResult tune_dfpv(const ObservationSet& data, const TrainConfig& config, const DfpvArchitecture& arch,
                       const std::vector<LambdaPair>& grid) {
  require_full_splits(data);
  const Split& s1 = data.stage1;
  const Split& s2 = data.stage2;
  return select_lambdas(grid, [&](LambdaPair p) {
    TrainConfig c = config;
    c.lambda1 = p.lambda1;
    c.lambda2 = p.lambda2;
    const DfpvModel model = train_dfpv(data, c, arch);
    const DenseMatrix target = features::mlp_forward(model.features.psi_w, s2.w);
    const double l1 = mean_sq(target, model.predict_outcome_proxy_mean(s2.a, s2.z));
    const DenseMatrix phi2 = numkit::row_kron(features::mlp_forward(model.features.psi_a2, s1.a),
                                              model.predict_outcome_proxy_mean(s1.a, s1.z));
    return TuningScore{l1, mean_sq(numkit::matvec(phi2, model.u), s1.y)};
  });
}

}  // namespace dfpv::two_stage
