#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dfpv/bench/config.hpp"
#include "dfpv/bench/report.hpp"
#include "dfpv/datagen/ground_truth.hpp"

namespace dfpv::bench {

std::string run_id(const std::string& dgp, const std::string& estimator, std::size_t size, std::uint64_t seed);

struct StructuralReport {
  datagen::GroundTruth truth;
  std::vector<RunResult> runs;  // ordered by size, seed, estimator (config order, baseline last)
  std::vector<RunFailure> failures;
  std::vector<SummaryRow> summary;
  std::vector<double> timings;  // measured seconds, aligned with runs
  // Serialized models with their run metadata, aligned with runs; empty unless save_models.
  std::vector<std::string> model_json;
};

struct OpeReport {
  std::vector<OpeResult> runs;  // ordered by size, seed, estimator, policy
  std::vector<RunFailure> failures;
  std::vector<SummaryRow> summary;
  double observational_mean = 0.0;
};

// Runs every (size, seed, estimator) cell and scores it on the DGP's truth grid. A failing run
// becomes a failure record; the others still complete.
StructuralReport run_structural_experiment(const ExperimentConfig& config);

// Three-way split per seed: stage 1, stage 2 and an evaluation block of the same size. Demand only.
OpeReport run_ope_experiment(const ExperimentConfig& config);

// results.csv, summary.csv, failures.csv, timings.csv, truth.csv, one SVG per plot, models/.
void write_structural_outputs(const StructuralReport& report, const ExperimentConfig& config);
// ope_results.csv, ope_summary.csv, ope_failures.csv and the OPE plots.
void write_ope_outputs(const OpeReport& report, const ExperimentConfig& config);

// Model plus run metadata in the form written to models/.
nlohmann::json run_model_document(const FittedModel& model, const RunResult& run, const ExperimentConfig& config);

// Fit one (size, seed, estimator) cell exactly as the bench does.
FitOutcome fit_cell(const ExperimentConfig& config, EstimatorKind kind, std::size_t size, std::uint64_t seed);

// Runs jobs 0..n-1 on `threads` workers; each job writes only its own slot.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job);

}  // namespace dfpv::bench
