#include "dfpv/bench/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dfpv/bench/experiment.hpp"
#include "dfpv/datagen/demand.hpp"
#include "dfpv/errors.hpp"

namespace dfpv::bench {

namespace fs = std::filesystem;

namespace {

std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CommonFlags {
  std::string dgp;
  std::optional<std::size_t> size;
  std::optional<std::uint64_t> seed;
  std::string estimator;
  std::string config;
  std::string out;
};

// Config file (if any) with the command-line flags layered on top.
ExperimentConfig resolve_config(const CommonFlags& f) {
  nlohmann::json doc = f.config.empty() ? nlohmann::json::object() : load_config_document(f.config);
  if (!f.dgp.empty()) doc["dgp"] = f.dgp;
  if (f.size) doc["sizes"] = {*f.size};
  if (f.seed) doc["base_seed"] = *f.seed;
  if (!f.estimator.empty() && f.estimator != "direct_ridge") doc["estimators"] = {f.estimator};
  if (!doc.contains("estimators")) doc["estimators"] = {"dfpv"};
  if (!doc.contains("sizes")) doc["sizes"] = {1000};
  if (!f.out.empty()) doc["output_dir"] = f.out;
  return config_from_json(doc);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("file not found: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + p.string());
  out << s;
}

datagen::DgpOptions options_of(const nlohmann::json& model) {
  if (model.contains("run") && model["run"].contains("dgp_options"))
    return model["run"]["dgp_options"].get<datagen::DgpOptions>();
  return {};
}

void add_common(CLI::App* app, CommonFlags& f, bool needs_size) {
  app->add_option("--dgp", f.dgp, "demand, mastouri or dsprite_surrogate");
  auto* s = app->add_option("--size", f.size, "samples per stage");
  if (needs_size) s->required();
  app->add_option("--seed", f.seed, "data and training seed");
  app->add_option("--config", f.config, "TOML or JSON experiment config");
  app->add_option("--out", f.out, "output directory");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proxy-variable causal learning: data, training, evaluation and benchmarks", "dfpv"};
  app.require_subcommand(1);

  CommonFlags gen_f, train_f, tune_f, bench_f;
  std::size_t gen_ope = 0;
  auto* gen = app.add_subcommand("gen", "write a dataset CSV and JSON sidecar");
  add_common(gen, gen_f, true);
  gen->add_option("--n-ope", gen_ope, "policy-evaluation records (demand only)");

  auto* train = app.add_subcommand("train", "fit one model and write its JSON");
  add_common(train, train_f, true);
  train->add_option("--estimator", train_f.estimator, "dfpv, fixed_feature or direct_ridge")->required();

  std::string eval_model, eval_truth;
  auto* eval = app.add_subcommand("eval", "score a model against a truth CSV");
  eval->add_option("--model", eval_model, "model JSON")->required();
  eval->add_option("--truth", eval_truth, "truth CSV (default: recomputed from the model's DGP)");

  std::string ope_model, ope_config, ope_out;
  std::vector<std::string> ope_policies;
  std::optional<std::size_t> ope_n;
  auto* ope = app.add_subcommand("ope", "policy evaluation for one model or a full study");
  ope->add_option("--model", ope_model, "model JSON trained on the demand design");
  ope->add_option("--policy", ope_policies, "cost, price or constant:<a>");
  ope->add_option("--n-ope", ope_n, "evaluation records (default: the model's size)");
  ope->add_option("--config", ope_config, "experiment config; runs the OPE study");
  ope->add_option("--out", ope_out, "output directory for the study");

  auto* tune = app.add_subcommand("tune", "lambda grid search on one dataset");
  add_common(tune, tune_f, true);
  tune->add_option("--estimator", tune_f.estimator, "dfpv or fixed_feature")->required();

  auto* bench = app.add_subcommand("bench", "run the full experiment described by a config");
  bench->add_option("--config", bench_f.config, "TOML or JSON experiment config")->required();
  bench->add_option("--out", bench_f.out, "override output_dir");

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && app.get_subcommand_no_throw(args[0]) == nullptr) {
    err << "error: unknown subcommand '" << args[0] << "'\n" << app.help();
    return 1;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*gen) {
      const auto cfg = resolve_config(gen_f);
      const std::uint64_t seed = gen_f.seed.value_or(cfg.base_seed);
      const std::size_t n = cfg.sizes.front();
      const auto data = datagen::generate(cfg.dgp, n, seed, cfg.dgp_options, gen_ope);
      const fs::path dir = gen_f.out.empty() ? fs::path(".") : fs::path(gen_f.out);
      fs::create_directories(dir);
      const std::string stem = datagen::to_string(cfg.dgp) + "_n" + std::to_string(n) + "_s" + std::to_string(seed);
      datagen::write_dataset_csv((dir / (stem + ".csv")).string(), data);
      datagen::DatasetMeta meta{datagen::to_string(cfg.dgp), seed, n, n, gen_ope,
                                datagen::to_string(cfg.dgp_options.noise)};
      datagen::write_dataset_sidecar((dir / (stem + ".json")).string(), meta, data);
      out << (dir / (stem + ".csv")).string() << "\n";
    } else if (*train) {
      const auto cfg = resolve_config(train_f);
      const auto kind = estimator_from_string(train_f.estimator);
      const std::uint64_t seed = train_f.seed.value_or(cfg.base_seed);
      const std::size_t n = cfg.sizes.front();
      auto fit = fit_cell(cfg, kind, n, seed);
      const auto truth = datagen::ground_truth(cfg.dgp, cfg.dgp_options);
      const FittedModel model = model_from_json(model_to_json(fit.model));
      const double mse = datagen::grid_mse(predict_structural(model, truth.grid), truth);
      const std::string dgp = datagen::to_string(cfg.dgp);
      RunResult r{dgp, to_string(kind), n, seed, mse, 0.0, fit.stage1_loss, fit.stage2_loss, fit.lambda1, fit.lambda2};
      const fs::path dir = train_f.out.empty() ? fs::path(".") : fs::path(train_f.out);
      const fs::path path = dir / (run_id(dgp, r.estimator, n, seed) + ".json");
      write_text(path, run_model_document(model, r, cfg).dump(1) + "\n");
      datagen::write_truth_csv((dir / "truth.csv").string(), truth);
      out << path.string() << "\noos_mse " << g17(mse) << "\n";
    } else if (*eval) {
      const auto doc = read_json_file(eval_model);
      const FittedModel model = model_from_json(doc);
      datagen::GroundTruth truth;
      if (!eval_truth.empty()) {
        if (!fs::exists(eval_truth)) throw InvalidArgument("file not found: " + eval_truth);
        truth = datagen::read_truth_csv(eval_truth);
      } else {
        if (!doc.contains("run")) throw InvalidArgument("eval: model has no run metadata; pass --truth");
        truth = datagen::ground_truth(datagen::dgp_from_string(doc["run"]["dgp"].get<std::string>()), options_of(doc));
      }
      out << "oos_mse " << g17(datagen::grid_mse(predict_structural(model, truth.grid), truth)) << "\n";
    } else if (*ope) {
      if (!ope_config.empty()) {
        auto doc = load_config_document(ope_config);
        if (!ope_policies.empty()) doc["policies"] = ope_policies;
        if (!ope_out.empty()) doc["output_dir"] = ope_out;
        const auto cfg = config_from_json(doc);
        const auto report = run_ope_experiment(cfg);
        write_ope_outputs(report, cfg);
        out << "wrote " << report.runs.size() << " rows to " << cfg.output_dir << "\n";
        return report.failures.empty() ? 0 : 2;
      }
      if (ope_model.empty()) throw InvalidArgument("ope: pass --model or --config");
      if (ope_policies.empty()) throw InvalidArgument("ope: pass at least one --policy");
      const auto doc = read_json_file(ope_model);
      const FittedModel model = model_from_json(doc);
      if (!doc.contains("run")) throw InvalidArgument("ope: model has no run metadata");
      const auto& run = doc["run"];
      if (run["dgp"].get<std::string>() != "demand") throw InvalidArgument("ope: policies are defined for demand only");
      const auto opts = options_of(doc);
      const std::size_t n = run["size"].get<std::size_t>();
      const auto data =
          datagen::generate(datagen::DgpKind::demand, n, run["seed"].get<std::uint64_t>(), opts, ope_n.value_or(n));
      const double ey = datagen::observational_mean_mc(1000000, opts.truth_seed).value;
      for (const auto& name : ope_policies) {
        const auto policy = causal::policy_from_name(name);
        const double v = estimate_policy_value(model, policy, *data.ope);
        const double truth = datagen::ope_truth_mc(policy, 1000000, opts.truth_seed).value;
        out << name << " v_hat " << g17(v) << " v_true " << g17(truth) << " sq_error " << g17((v - truth) * (v - truth))
            << " constant_sq_error " << g17((ey - truth) * (ey - truth)) << "\n";
      }
    } else if (*tune) {
      auto cfg = resolve_config(tune_f);
      const auto kind = estimator_from_string(tune_f.estimator);
      const std::uint64_t seed = tune_f.seed.value_or(cfg.base_seed);
      const auto data = datagen::generate(cfg.dgp, cfg.sizes.front(), seed, cfg.dgp_options);
      const auto grid = cfg.tune ? *cfg.tune : two_stage::default_lambda_grid();
      two_stage::TuningResult res;
      if (kind == EstimatorKind::fixed_feature) {
        res = two_stage::tune_fixed_feature(data, two_stage::make_fixed_dictionaries(data, cfg.fixed_centers, seed), grid);
      } else if (kind == EstimatorKind::dfpv) {
        auto tc = cfg.train;
        tc.seed = seed;
        res = two_stage::tune_dfpv(data, tc, cfg.architecture, grid);
      } else {
        throw InvalidArgument("tune: estimator must be dfpv or fixed_feature");
      }
      std::string table = "lambda1,lambda2,stage1_oos,stage2_oos\n";
      for (const auto& row : res.table)
        table += format_g6(row.lambdas.lambda1) + "," + format_g6(row.lambdas.lambda2) + "," +
                 format_g6(row.score.stage1_oos) + "," + format_g6(row.score.stage2_oos) + "\n";
      if (!tune_f.out.empty()) write_text(fs::path(tune_f.out) / "tuning.csv", table);
      out << table << "best lambda1 " << g17(res.best.lambda1) << " lambda2 " << g17(res.best.lambda2) << "\n";
    } else if (*bench) {
      auto doc = load_config_document(bench_f.config);
      if (!bench_f.out.empty()) doc["output_dir"] = bench_f.out;
      const auto cfg = config_from_json(doc);
      const auto report = run_structural_experiment(cfg);
      write_structural_outputs(report, cfg);
      std::size_t failures = report.failures.size();
      if (!cfg.policies.empty()) {
        const auto ope_report = run_ope_experiment(cfg);
        write_ope_outputs(ope_report, cfg);
        failures += ope_report.failures.size();
      }
      out << summary_csv(report.summary);
      if (failures > 0) {
        err << failures << " run(s) failed; see failures.csv\n";
        return 2;
      }
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dfpv::bench
