#pragma once

#include <span>

#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::two_stage {

using numkit::DenseMatrix;
using numkit::Vector;

// Stage-1 weights V = Psi1^T Phi1 (Phi1^T Phi1 + m lambda1 I)^{-1}, m = rows.
// Psi1: m x d_W targets, Phi1: m x d_1 inputs. Returns d_W x d_1.
DenseMatrix fit_stage1_weights(const DenseMatrix& psi1, const DenseMatrix& phi1, double lambda1);

// Stage-2 weights u = (Phi2^T Phi2 + n lambda2 I)^{-1} Phi2^T y, n = rows.
Vector fit_stage2_weights(const DenseMatrix& phi2, std::span<const double> y, double lambda2);

// (Phi1^T Phi1 + m lambda1 I)^{-1} Phi1^T, the d_1 x m operator with V^T = P Psi1.
DenseMatrix stage1_projection(const DenseMatrix& phi1, double lambda1);

// Mean squared residual (1/rows) ||targets - inputs W^T||_F^2, without the penalty.
double mean_squared_residual(const DenseMatrix& targets, const DenseMatrix& inputs, const DenseMatrix& weights);

}  // namespace dfpv::two_stage
