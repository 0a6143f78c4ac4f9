#pragma once

#include <cstdint>
#include <span>

#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::numkit {

// vec(a b^T) flattened row-major: out[i * b.size() + j] = a[i] * b[j].
Vector kron_vec(std::span<const double> a, std::span<const double> b);

// Row-wise Kronecker product: row i of the result is kron_vec(a.row(i), b.row(i)).
DenseMatrix row_kron(const DenseMatrix& a, const DenseMatrix& b);

struct SpdSolveOptions {
  // First jitter is initial_jitter_scale * trace(A) / n, multiplied by 10 per retry.
  double initial_jitter_scale = 1e-12;
  int max_retries = 4;
};

// Solves A X = B for symmetric positive (semi)definite A via Cholesky. When the plain
// factorization fails a growing diagonal jitter is added; exhausting the retries throws
// SingularMatrixError.
DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b, const SpdSolveOptions& opts = {});

// Median Euclidean distance over all unordered pairs of rows of `points`. Above
// `max_points` rows the median is taken over a seeded subsample of that many rows.
// Throws DegenerateBandwidthError when the median is zero.
double median_heuristic(const DenseMatrix& points, std::uint64_t seed = 0,
                        std::size_t max_points = 2000);

}  // namespace dfpv::numkit
