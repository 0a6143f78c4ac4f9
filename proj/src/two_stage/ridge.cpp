#include "dfpv/two_stage/ridge.hpp"

#include <cmath>
#include <string>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/linalg.hpp"

namespace dfpv::two_stage {

namespace {

void check_lambda(double lambda, const char* name) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument(std::string(name) + " must be finite and nonnegative");
}

DenseMatrix regularized_gram(const DenseMatrix& phi, double lambda) {
  DenseMatrix gram = numkit::gram(phi);
  return numkit::add_diagonal(gram, static_cast<double>(phi.rows()) * lambda);
}

}  // namespace

DenseMatrix fit_stage1_weights(const DenseMatrix& psi1, const DenseMatrix& phi1, double lambda1) {
  check_lambda(lambda1, "lambda1");
  if (phi1.rows() == 0) throw InvalidArgument("fit_stage1_weights: no samples");
  if (psi1.rows() != phi1.rows()) throw InvalidArgument("fit_stage1_weights: row counts differ");
  const DenseMatrix vt = numkit::solve_spd(regularized_gram(phi1, lambda1), numkit::matmul_tn(phi1, psi1));
  return vt.transpose();
}

Vector fit_stage2_weights(const DenseMatrix& phi2, std::span<const double> y, double lambda2) {
  check_lambda(lambda2, "lambda2");
  if (phi2.rows() == 0) throw InvalidArgument("fit_stage2_weights: no samples");
  if (y.size() != phi2.rows()) throw InvalidArgument("fit_stage2_weights: y length differs from rows");
  const DenseMatrix rhs = numkit::matmul_tn(phi2, DenseMatrix::column(y));
  const DenseMatrix u = numkit::solve_spd(regularized_gram(phi2, lambda2), rhs);
  return Vector(u.data().begin(), u.data().end());
}

DenseMatrix stage1_projection(const DenseMatrix& phi1, double lambda1) {
  check_lambda(lambda1, "lambda1");
  if (phi1.rows() == 0) throw InvalidArgument("stage1_projection: no samples");
  return numkit::solve_spd(regularized_gram(phi1, lambda1), phi1.transpose());
}

double mean_squared_residual(const DenseMatrix& targets, const DenseMatrix& inputs, const DenseMatrix& weights) {
  const DenseMatrix pred = numkit::matmul_nt(inputs, weights);
  if (pred.rows() != targets.rows() || pred.cols() != targets.cols())
    throw InvalidArgument("mean_squared_residual: shape mismatch");
  double s = 0.0;
  auto p = pred.data();
  auto t = targets.data();
  for (std::size_t i = 0; i < p.size(); ++i) s += (t[i] - p[i]) * (t[i] - p[i]);
  return s / static_cast<double>(targets.rows());
}

}  // namespace dfpv::two_stage
