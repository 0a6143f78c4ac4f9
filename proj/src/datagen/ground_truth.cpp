#include "dfpv/datagen/ground_truth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dfpv/errors.hpp"

namespace dfpv::datagen {

void GroundTruth::validate() const {
  if (grid.rows() == 0) throw InvalidArgument("GroundTruth: empty grid");
  if (values.size() != grid.rows() || mc_stderr.size() != grid.rows())
    throw InvalidArgument("GroundTruth: grid, values and mc_stderr lengths differ");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw InvalidArgument("GroundTruth: nonfinite value");
    if (!(mc_stderr[i] >= 0.0)) throw InvalidArgument("GroundTruth: negative standard error");
  }
}

DenseMatrix evenly_spaced(double lo, double hi, std::size_t k) {
  if (k == 0) throw InvalidArgument("evenly_spaced: need at least one point");
  DenseMatrix g(k, 1);
  for (std::size_t i = 0; i < k; ++i)
    g(i, 0) = k == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
  return g;
}

double grid_mse(std::span<const double> predictions, const GroundTruth& truth) {
  if (predictions.size() != truth.values.size() || predictions.empty())
    throw InvalidArgument("grid_mse: prediction count differs from the truth grid");
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - truth.values[i];
    s += e * e;
  }
  return s / static_cast<double>(predictions.size());
}

double constant_predictor_mse(const GroundTruth& truth) {
  const auto& v = truth.values;
  if (v.empty()) throw InvalidArgument("constant_predictor_mse: empty truth");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

void write_truth_csv(const std::string& path, const GroundTruth& truth) {
  truth.validate();
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write truth file " + path);
  out << "# n_mc=" << truth.n_mc << "\n";
  for (std::size_t j = 0; j < truth.grid.cols(); ++j) out << "a_" << j << ",";
  out << "value,mc_stderr\n";
  char buf[32];
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = 0; j < truth.grid.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", truth.grid(i, j));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", truth.values[i]);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", truth.mc_stderr[i]);
    out << buf << "\n";
  }
}

GroundTruth read_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("truth file not found: " + path);
  GroundTruth t;
  std::string line;
  std::size_t cols = 0;
  std::vector<Vector> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("n_mc=");
      if (pos != std::string::npos) t.n_mc = std::stoull(line.substr(pos + 5));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      header_seen = true;
      if (cells.size() < 3 || cells[cells.size() - 2] != "value" || cells.back() != "mc_stderr")
        throw InvalidArgument("truth file " + path + ": unexpected header");
      cols = cells.size() - 2;
      continue;
    }
    if (cells.size() != cols + 2) throw InvalidArgument("truth file " + path + ": ragged row");
    Vector r;
    for (const auto& c : cells) {
      try {
        r.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw InvalidArgument("truth file " + path + ": bad number '" + c + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  t.grid = DenseMatrix(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) t.grid(i, j) = rows[i][j];
    t.values.push_back(rows[i][cols]);
    t.mc_stderr.push_back(rows[i][cols + 1]);
  }
  t.validate();
  return t;
}

}  // namespace dfpv::datagen
