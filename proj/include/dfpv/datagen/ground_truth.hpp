#pragma once

#include <cstddef>
#include <string>

#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::datagen {

using numkit::DenseMatrix;
using numkit::Vector;

// Structural-function values on a treatment grid; one grid point per row.
struct GroundTruth {
  DenseMatrix grid;
  Vector values;
  Vector mc_stderr;  // 0 for closed-form entries
  std::size_t n_mc = 0;

  std::size_t size() const noexcept { return grid.rows(); }
  void validate() const;
};

// k points from lo to hi inclusive, as a k x 1 grid.
DenseMatrix evenly_spaced(double lo, double hi, std::size_t k);

// Mean squared difference between predictions and truth values.
double grid_mse(std::span<const double> predictions, const GroundTruth& truth);

// Variance of the truth values over the grid: the MSE of the best constant predictor.
double constant_predictor_mse(const GroundTruth& truth);

// Columns a_0..a_{d-1}, value, mc_stderr; header row first. Values are written with 17
// significant digits so a reread is exact. n_mc is stored in a leading comment line.
void write_truth_csv(const std::string& path, const GroundTruth& truth);
GroundTruth read_truth_csv(const std::string& path);

}  // namespace dfpv::datagen
