// Acceptance runner: one [PASS]/[FAIL] line per criterion.
//
//   dfpv_acceptance                 all criteria
//   dfpv_acceptance --criterion AC4 one criterion (repeatable)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dfpv/bench/cli.hpp"
#include "dfpv/bench/config.hpp"
#include "dfpv/bench/experiment.hpp"
#include "dfpv/bench/report.hpp"
#include "dfpv/causal/structural.hpp"
#include "dfpv/datagen/demand.hpp"
#include "dfpv/datagen/mastouri.hpp"
#include "dfpv/numkit/runtime.hpp"
#include "support/checks.hpp"
#include "support/moments.hpp"
#include "support/planted.hpp"

using namespace dfpv;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double median(std::vector<double> v) { return bench::percentile(std::move(v), 0.5); }

Verdict ac1() {
  numkit::CounterRng rng(2024, 1);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto r = checks::ridge_trial(rng);
    worst = std::max({worst, r.v_rel, r.u_rel});
  }
  return {worst <= 1e-6, "20 instances, max rel diff " + fmt("%.3g", worst) + " (tol 1e-6)"};
}

Verdict ac2() {
  numkit::CounterRng rng(2024, 2);
  double g1 = 0.0, g2 = 0.0, val = 0.0;
  for (int t = 0; t < 30; ++t) {
    const auto r = checks::gradient_trial(rng);
    g1 = std::max(g1, r.stage1_grad_rel);
    g2 = std::max(g2, r.stage2_grad_rel);
    val = std::max({val, r.stage1_value_rel, r.stage2_value_rel});
  }
  return {g1 <= 1e-4 && g2 <= 1e-4 && val <= 1e-8,
          "30 trials, max rel err stage1 " + fmt("%.3g", g1) + " stage2 " + fmt("%.3g", g2) +
              " (tol 1e-4); loss values vs oracle " + fmt("%.3g", val)};
}

Verdict ac3() {
  const auto design = planted::make_planted(1e-3);
  const auto data = design.sample(5000, 2024);
  const auto model = two_stage::fit_fixed_feature(data, design.dicts, 1e-8, 1e-8);
  const auto truth = design.truth();
  const auto pred = causal::eval_structural(causal::bridge_from(model).structural(), truth.grid);
  const double mse = datagen::grid_mse(pred, truth);
  return {mse <= 1e-3, "n = m = 5000, sigma = 1e-3, grid MSE " + fmt("%.3g", mse) + " (tol 1e-3)"};
}

bench::ExperimentConfig structural_config(datagen::DgpKind dgp, std::size_t n,
                                          std::vector<bench::EstimatorKind> est, bool baseline) {
  bench::ExperimentConfig c;
  c.dgp = dgp;
  c.sizes = {n};
  c.n_sims = 20;
  c.estimators = std::move(est);
  c.baseline = baseline;
  c.save_models = false;
  c.validate();
  return c;
}

std::map<std::string, std::vector<double>> mse_by_estimator(const bench::StructuralReport& r) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& run : r.runs) out[run.estimator].push_back(run.oos_mse);
  return out;
}

Verdict ac4() {
  const auto rep = bench::run_structural_experiment(
      structural_config(datagen::DgpKind::demand, 1000, {bench::EstimatorKind::dfpv}, true));
  if (!rep.failures.empty()) return {false, std::to_string(rep.failures.size()) + " failed runs"};
  auto by = mse_by_estimator(rep);
  const auto& d = by["dfpv"];
  const auto& r = by["direct_ridge"];
  int wins = 0;
  for (std::size_t i = 0; i < d.size(); ++i) wins += d[i] < r[i];
  const double md = median(d), mr = median(r);
  return {md < mr && wins >= 16, "n = m = 1000, 20 seeds: median MSE dfpv " + fmt("%.4g", md) + " vs direct_ridge " +
                                     fmt("%.4g", mr) + ", dfpv wins " + std::to_string(wins) + "/20 (need >= 16)"};
}

Verdict ac5() {
  const auto cfg = structural_config(datagen::DgpKind::mastouri, 500,
                                     {bench::EstimatorKind::dfpv, bench::EstimatorKind::fixed_feature}, false);
  const auto rep = bench::run_structural_experiment(cfg);
  if (!rep.failures.empty()) return {false, std::to_string(rep.failures.size()) + " failed runs"};
  auto by = mse_by_estimator(rep);
  const double c = datagen::constant_predictor_mse(rep.truth);
  const double md = median(by["dfpv"]), mf = median(by["fixed_feature"]);
  return {md < c && mf < c, "n = m = 500, 20 seeds: median MSE dfpv " + fmt("%.4g", md) + ", fixed_feature " +
                                fmt("%.4g", mf) + ", constant predictor " + fmt("%.4g", c) +
                                "; fixed_feature <= dfpv: " + (mf <= md ? "yes" : "no") + " (not gated)"};
}

Verdict ac6() {
  const auto grid = datagen::mastouri_grid();
  const auto cf = datagen::mastouri_truth(grid);
  const auto mc = datagen::mastouri_truth_mc(grid, 1000000, datagen::DgpOptions{}.truth_seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.rows(); ++i)
    worst = std::max(worst, std::abs(cf.values[i] - mc.values[i]) / mc.mc_stderr[i]);
  return {worst <= 3.0, "20 grid points, 1e6 draws, max |closed - MC| / SE = " + fmt("%.3g", worst) + " (tol 3)"};
}

Verdict ac7() {
  // Identity: a constant policy averaged over S_W is the structural estimate at that action.
  const auto data = datagen::gen_demand(1000, 1000, 0);
  const auto ff = two_stage::fit_fixed_feature(data, two_stage::make_fixed_dictionaries(data, 100, 0), 0.1, 0.1);
  const auto bridge = causal::bridge_from(ff);
  double gap = 0.0;
  const auto grid = datagen::demand_grid();
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    const double v = causal::estimate_value(bridge, causal::constant_policy(grid(i, 0)), data.stage1);
    gap = std::max(gap, std::abs(v - causal::eval_structural(bridge.structural(), grid.row(i))));
  }

  auto cfg = structural_config(datagen::DgpKind::demand, 1000, {bench::EstimatorKind::fixed_feature}, false);
  cfg.policies = {"price", "cost"};
  cfg.validate();
  const auto rep = bench::run_ope_experiment(cfg);
  if (!rep.failures.empty()) return {false, std::to_string(rep.failures.size()) + " failed runs"};
  std::map<std::string, int> wins;
  for (const auto& r : rep.runs) wins[r.policy] += std::sqrt(r.sq_error) < std::sqrt(r.constant_sq_error);
  const bool ok = gap <= 1e-9 && wins["price"] >= 15 && wins["cost"] >= 15;
  return {ok, "constant-policy identity max gap " + fmt("%.3g", gap) + " (tol 1e-9); fixed_feature beats E[Y] on " +
                  std::to_string(wins["price"]) + "/20 seeds for price, " + std::to_string(wins["cost"]) +
                  "/20 for cost (need >= 15)"};
}

Verdict ac8() {
  const bool exact = datagen::demand_g(5.0) == -1.0 && std::abs(causal::policy_price(20.0) - 14.0) <= 1e-12 &&
                     causal::policy_cost(2.0, 3.0) == 29.0;
  const auto d = moments::demand_d_mean(100000, 2024);
  const auto a = moments::demand_a_mean(100000, 2024);
  const auto u = moments::mastouri_u1_negative(100000, 2024);
  const bool ok = exact && d.z() < 4.0 && a.z() < 4.0 && u.z() < 4.0;
  return {ok, std::string("formulas ") + (exact ? "exact" : "WRONG") + "; n = 1e5 z-scores: D mean " +
                  fmt("%.2f", d.z()) + ", A mean " + fmt("%.2f", a.z()) + ", P(U1 < 0) " + fmt("%.2f", u.z()) +
                  " (tol 4)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict ac9() {
  const fs::path root = fs::temp_directory_path() / "dfpv_acceptance_ac9";
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json cfg = {{"dgp", "demand"},
                              {"estimators", {"dfpv", "fixed_feature"}},
                              {"sizes", {100, 200}},
                              {"n_sims", 3},
                              {"architecture", {{"widths", {16, 8}}}},
                              {"train", {{"outer_iterations", 20}, {"stage1_inner_steps", 5}}},
                              {"dgp_options", {{"truth_mc", 100000}}},
                              {"policies", {"cost", "price"}},
                              {"ope_truth_mc", 100000}};
  std::ofstream(root / "exp.json") << cfg.dump(2);
  std::vector<std::string> files;
  std::string diff;
  for (const char* run : {"a", "b"}) {
    std::ostringstream out, err;
    const int code =
        bench::run_cli({"bench", "--config", (root / "exp.json").string(), "--out", (root / run).string()}, out, err);
    if (code != 0) return {false, std::string("bench run ") + run + " exited " + std::to_string(code) + ": " + err.str()};
  }
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const auto name = e.path().filename().string();
    if (name != "results.csv" && name != "ope_results.csv" && e.path().extension() != ".svg") continue;
    files.push_back(name);
    if (!fs::exists(root / "b" / name) || slurp(e.path()) != slurp(root / "b" / name)) diff += " " + name;
  }
  std::sort(files.begin(), files.end());
  const bool ok = diff.empty() && std::count(files.begin(), files.end(), "results.csv") == 1 && files.size() >= 3;
  return {ok, "two bench runs, " + std::to_string(files.size()) + " files compared (results.csv, ope_results.csv, " +
                  "SVGs)" + (diff.empty() ? ": byte-identical" : "; differ:" + diff)};
}

struct Criterion {
  std::string id;
  std::string title;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  numkit::keep_large_blocks_on_heap();
  const std::vector<Criterion> all = {
      {"AC1", "ridge closed form vs gradient descent", 10, ac1},
      {"AC2", "stage gradients vs central differences", 30, ac2},
      {"AC3", "planted design recovery", 60, ac3},
      {"AC4", "demand design, dfpv vs direct ridge", 600, ac4},
      {"AC5", "mastouri design vs constant predictor", 300, ac5},
      {"AC6", "mastouri closed form vs Monte Carlo", 30, ac6},
      {"AC7", "policy evaluation", 600, ac7},
      {"AC8", "formula and moment spot checks", 1e9, ac8},
      {"AC9", "bench determinism", 1e9, ac9},
  };

  CLI::App app{"acceptance checks"};
  std::vector<std::string> wanted;
  app.add_option("--criterion", wanted, "AC1 .. AC9; repeatable (default: all)");
  CLI11_PARSE(app, argc, argv);
  for (const auto& w : wanted)
    if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.id == w; })) {
      std::cerr << "unknown criterion " << w << "\n";
      return 1;
    }

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << v.detail << "; "
              << fmt("%.1f", secs) << " s";
    if (c.budget_s < 1e9) std::cout << " (budget " << c.budget_s << " s)";
    if (!in_time) std::cout << " OVER BUDGET";
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
