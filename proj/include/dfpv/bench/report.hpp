#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dfpv::bench {

struct RunResult {
  std::string dgp;
  std::string estimator;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  double oos_mse = 0.0;
  double wall_time_s = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

struct OpeResult {
  std::string dgp;
  std::string estimator;
  std::string policy;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  double v_hat = 0.0;
  double v_true = 0.0;
  double sq_error = 0.0;
  // (E[Y] - v_true)^2: what predicting the observational mean would score.
  double constant_sq_error = 0.0;
};

struct RunFailure {
  std::string dgp;
  std::string estimator;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::string kind;  // invalid_argument, numerical, error
  std::string message;
};

struct SummaryRow {
  std::string dgp;
  std::string metric;  // oos_mse, or ope_sq_error:<policy>
  std::string estimator;
  std::size_t size = 0;
  std::size_t n_runs = 0;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
};

// Linear interpolation between order statistics at position q (n - 1); q in [0, 1].
double percentile(std::vector<double> values, double q);

// One row per (metric, estimator, size), rows in first-appearance order of the estimator.
std::vector<SummaryRow> summarize_runs(const std::vector<RunResult>& runs);
std::vector<SummaryRow> summarize_ope(const std::vector<OpeResult>& runs);

// Fixed %.6g formatting throughout so reruns are byte-identical.
std::string results_csv(const std::vector<RunResult>& runs);
std::string ope_results_csv(const std::vector<OpeResult>& runs);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string failures_csv(const std::vector<RunFailure>& failures);

std::string format_g6(double x);
std::string csv_escape(const std::string& s);

}  // namespace dfpv::bench
