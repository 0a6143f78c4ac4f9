#include "dfpv/bench/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "dfpv/bench/plot.hpp"
#include "dfpv/datagen/demand.hpp"
#include "dfpv/errors.hpp"

namespace dfpv::bench {

namespace fs = std::filesystem;

namespace {

struct Job {
  std::size_t size;
  std::uint64_t seed;
  EstimatorKind kind;
};

std::vector<Job> make_jobs(const ExperimentConfig& c) {
  std::vector<EstimatorKind> kinds = c.estimators;
  if (c.baseline) kinds.push_back(EstimatorKind::direct_ridge);
  std::vector<Job> jobs;
  for (std::size_t n : c.sizes)
    for (std::size_t i = 0; i < c.n_sims; ++i)
      for (auto k : kinds) jobs.push_back({n, c.base_seed + i, k});
  return jobs;
}

RunFailure failure_from(const std::exception_ptr& ep, const std::string& dgp, const Job& job) {
  RunFailure f{dgp, to_string(job.kind), job.size, job.seed, "error", "unknown exception"};
  try {
    std::rethrow_exception(ep);
  } catch (const InvalidArgument& e) {
    f.kind = "invalid_argument";
    f.message = e.what();
  } catch (const NumericalError& e) {
    f.kind = "numerical";
    f.message = e.what();
  } catch (const std::exception& e) {
    f.message = e.what();
  } catch (...) {
  }
  return f;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + p.string());
  out << content;
}

}  // namespace

std::string run_id(const std::string& dgp, const std::string& estimator, std::size_t size, std::uint64_t seed) {
  return dgp + "_" + estimator + "_n" + std::to_string(size) + "_s" + std::to_string(seed);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  for (auto& th : pool) th.join();
}

FitOutcome fit_cell(const ExperimentConfig& config, EstimatorKind kind, std::size_t size, std::uint64_t seed) {
  const auto data = datagen::generate(config.dgp, size, seed, config.dgp_options);
  return fit_estimator(kind, data, config.fit_settings(), seed);
}

nlohmann::json run_model_document(const FittedModel& model, const RunResult& run, const ExperimentConfig& config) {
  nlohmann::json j = model_to_json(model);
  j["run"] = {{"dgp", run.dgp},         {"estimator", run.estimator}, {"size", run.size},
              {"seed", run.seed},       {"oos_mse", run.oos_mse},     {"lambda1", run.lambda1},
              {"lambda2", run.lambda2}, {"dgp_options", config.dgp_options}};
  return j;
}

StructuralReport run_structural_experiment(const ExperimentConfig& config) {
  config.validate();
  StructuralReport report;
  report.truth = datagen::ground_truth(config.dgp, config.dgp_options);
  const std::string dgp = datagen::to_string(config.dgp);
  const auto jobs = make_jobs(config);

  struct Slot {
    std::optional<RunResult> run;
    std::optional<RunFailure> failure;
    double seconds = 0.0;
    std::string model;
  };
  std::vector<Slot> slots(jobs.size());
  const auto& truth = report.truth;
  parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto fit = fit_cell(config, job.kind, job.size, job.seed);
      // Score the model as it will be read back from disk, so `eval` reproduces this number.
      const nlohmann::json doc = model_to_json(fit.model);
      const FittedModel reloaded = model_from_json(doc);
      const double mse = datagen::grid_mse(predict_structural(reloaded, truth.grid), truth);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      RunResult r{dgp, to_string(job.kind), job.size, job.seed, mse,
                  config.record_wall_time ? secs : 0.0, fit.stage1_loss, fit.stage2_loss, fit.lambda1, fit.lambda2};
      if (config.save_models) slots[i].model = run_model_document(reloaded, r, config).dump(1);
      slots[i].run = r;
      slots[i].seconds = secs;
    } catch (...) {
      slots[i].failure = failure_from(std::current_exception(), dgp, job);
      slots[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  });
  for (auto& s : slots) {
    if (s.run) {
      report.runs.push_back(*s.run);
      report.timings.push_back(s.seconds);
      if (config.save_models) report.model_json.push_back(std::move(s.model));
    } else {
      report.failures.push_back(*s.failure);
    }
  }
  report.summary = summarize_runs(report.runs);
  return report;
}

OpeReport run_ope_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.dgp != datagen::DgpKind::demand) throw InvalidArgument("OPE experiments need the demand design");
  if (config.policies.empty()) throw InvalidArgument("OPE experiment: no policies configured");
  OpeReport report;
  const std::string dgp = datagen::to_string(config.dgp);
  std::vector<causal::Policy> policies;
  std::vector<double> v_true;
  for (const auto& name : config.policies) {
    policies.push_back(causal::policy_from_name(name));
    v_true.push_back(datagen::ope_truth_mc(policies.back(), config.ope_truth_mc, config.dgp_options.truth_seed).value);
  }
  report.observational_mean = datagen::observational_mean_mc(config.ope_truth_mc, config.dgp_options.truth_seed).value;

  const auto jobs = make_jobs(config);
  struct Slot {
    std::vector<OpeResult> rows;
    std::optional<RunFailure> failure;
  };
  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    try {
      const auto data = datagen::generate(config.dgp, job.size, job.seed, config.dgp_options, job.size);
      const auto fit = fit_estimator(job.kind, data, config.fit_settings(), job.seed);
      for (std::size_t p = 0; p < policies.size(); ++p) {
        const double v = estimate_policy_value(fit.model, policies[p], *data.ope);
        const double c = report.observational_mean - v_true[p];
        slots[i].rows.push_back({dgp, to_string(job.kind), config.policies[p], job.size, job.seed, v, v_true[p],
                                 (v - v_true[p]) * (v - v_true[p]), c * c});
      }
    } catch (...) {
      slots[i].rows.clear();
      slots[i].failure = failure_from(std::current_exception(), dgp, job);
    }
  });
  for (auto& s : slots) {
    if (s.failure) {
      report.failures.push_back(*s.failure);
    } else {
      report.runs.insert(report.runs.end(), s.rows.begin(), s.rows.end());
    }
  }
  report.summary = summarize_ope(report.runs);
  return report;
}

void write_structural_outputs(const StructuralReport& report, const ExperimentConfig& config) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  write_file(dir / "results.csv", results_csv(report.runs));
  write_file(dir / "summary.csv", summary_csv(report.summary));
  write_file(dir / "failures.csv", failures_csv(report.failures));
  std::string timings = "dgp,estimator,size,seed,wall_time_s\n";
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& r = report.runs[i];
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", report.timings[i]);
    timings += r.dgp + "," + r.estimator + "," + std::to_string(r.size) + "," + std::to_string(r.seed) + "," + buf + "\n";
  }
  write_file(dir / "timings.csv", timings);
  datagen::write_truth_csv((dir / "truth.csv").string(), report.truth);
  for (const auto& plot : render_plots(report.summary)) write_file(dir / plot.filename, plot.svg);
  if (config.save_models) {
    fs::create_directories(dir / "models");
    for (std::size_t i = 0; i < report.model_json.size(); ++i) {
      const auto& r = report.runs[i];
      write_file(dir / "models" / (run_id(r.dgp, r.estimator, r.size, r.seed) + ".json"), report.model_json[i] + "\n");
    }
  }
  nlohmann::json cfg = config;
  write_file(dir / "config.json", cfg.dump(2) + "\n");
}

void write_ope_outputs(const OpeReport& report, const ExperimentConfig& config) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  write_file(dir / "ope_results.csv", ope_results_csv(report.runs));
  write_file(dir / "ope_summary.csv", summary_csv(report.summary));
  write_file(dir / "ope_failures.csv", failures_csv(report.failures));
  for (const auto& plot : render_plots(report.summary)) write_file(dir / plot.filename, plot.svg);
}

}  // namespace dfpv::bench
