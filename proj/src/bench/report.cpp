#include "dfpv/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "dfpv/errors.hpp"

namespace dfpv::bench {

std::string format_g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("percentile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

struct Cell {
  std::string dgp, metric, estimator;
  std::size_t size;
};

std::vector<SummaryRow> summarize(const std::vector<std::pair<Cell, double>>& obs) {
  // Estimators and metrics keep first-appearance order; sizes sort ascending.
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  std::map<std::tuple<std::string, std::string, std::string>, std::map<std::size_t, std::vector<double>>> groups;
  for (const auto& [c, v] : obs) {
    auto key = std::make_tuple(c.dgp, c.metric, c.estimator);
    if (!groups.count(key)) order.push_back(key);
    groups[key][c.size].push_back(v);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    for (const auto& [size, vals] : groups[key]) {
      rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), size, vals.size(), percentile(vals, 0.5),
                      percentile(vals, 0.25), percentile(vals, 0.75)});
    }
  }
  return rows;
}

}  // namespace

std::vector<SummaryRow> summarize_runs(const std::vector<RunResult>& runs) {
  std::vector<std::pair<Cell, double>> obs;
  for (const auto& r : runs) obs.push_back({{r.dgp, "oos_mse", r.estimator, r.size}, r.oos_mse});
  return summarize(obs);
}

std::vector<SummaryRow> summarize_ope(const std::vector<OpeResult>& runs) {
  std::vector<std::pair<Cell, double>> obs;
  for (const auto& r : runs) obs.push_back({{r.dgp, "ope_sq_error:" + r.policy, r.estimator, r.size}, r.sq_error});
  return summarize(obs);
}

std::string results_csv(const std::vector<RunResult>& runs) {
  std::string out = "dgp,estimator,size,seed,oos_mse,wall_time_s,l1,l2,lambda1,lambda2\n";
  for (const auto& r : runs) {
    out += csv_escape(r.dgp) + "," + csv_escape(r.estimator) + "," + std::to_string(r.size) + "," +
           std::to_string(r.seed) + "," + format_g6(r.oos_mse) + "," + format_g6(r.wall_time_s) + "," +
           format_g6(r.l1) + "," + format_g6(r.l2) + "," + format_g6(r.lambda1) + "," + format_g6(r.lambda2) + "\n";
  }
  return out;
}

std::string ope_results_csv(const std::vector<OpeResult>& runs) {
  std::string out = "dgp,estimator,policy,size,seed,v_hat,v_true,sq_error,constant_sq_error\n";
  for (const auto& r : runs) {
    out += csv_escape(r.dgp) + "," + csv_escape(r.estimator) + "," + csv_escape(r.policy) + "," +
           std::to_string(r.size) + "," + std::to_string(r.seed) + "," + format_g6(r.v_hat) + "," +
           format_g6(r.v_true) + "," + format_g6(r.sq_error) + "," + format_g6(r.constant_sq_error) + "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "dgp,metric,estimator,size,n_runs,median,p25,p75\n";
  for (const auto& r : rows) {
    out += csv_escape(r.dgp) + "," + csv_escape(r.metric) + "," + csv_escape(r.estimator) + "," +
           std::to_string(r.size) + "," + std::to_string(r.n_runs) + "," + format_g6(r.median) + "," +
           format_g6(r.p25) + "," + format_g6(r.p75) + "\n";
  }
  return out;
}

std::string failures_csv(const std::vector<RunFailure>& failures) {
  std::string out = "dgp,estimator,size,seed,kind,message\n";
  for (const auto& f : failures) {
    out += csv_escape(f.dgp) + "," + csv_escape(f.estimator) + "," + std::to_string(f.size) + "," +
           std::to_string(f.seed) + "," + csv_escape(f.kind) + "," + csv_escape(f.message) + "\n";
  }
  return out;
}

}  // namespace dfpv::bench
