#include "dfpv/numkit/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/random.hpp"

namespace dfpv::numkit {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMajor = Eigen::MatrixXd;

bool is_symmetric(const DenseMatrix& a) {
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double tol = 1e-10 * std::max(1.0, scale);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

}  // namespace

Vector kron_vec(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("kron_vec: empty input");
  Vector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

DenseMatrix row_kron(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("row_kron: row counts differ");
  if (a.cols() == 0 || b.cols() == 0) throw InvalidArgument("row_kron: empty feature dimension");
  const std::size_t da = a.cols();
  const std::size_t db = b.cols();
  DenseMatrix out(a.rows(), da * db);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    auto br = b.row(r);
    auto o = out.row(r);
    for (std::size_t i = 0; i < da; ++i) {
      const double ai = ar[i];
      double* dst = o.data() + i * db;
      for (std::size_t j = 0; j < db; ++j) dst[j] = ai * br[j];
    }
  }
  return out;
}

DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b, const SpdSolveOptions& opts) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw InvalidArgument("solve_spd: matrix is not square");
  if (b.rows() != n) {
    throw InvalidArgument("solve_spd: right-hand side has " + std::to_string(b.rows()) +
                          " rows, expected " + std::to_string(n));
  }
  if (n == 0) return DenseMatrix(0, b.cols());
  if (!a.all_finite() || !b.all_finite()) throw InvalidArgument("solve_spd: nonfinite input");
  if (!is_symmetric(a)) throw InvalidArgument("solve_spd: matrix is not symmetric");

  const Eigen::Map<const RowMajor> amap(a.data().data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
  const Eigen::Map<const RowMajor> bmap(b.data().data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(b.cols()));
  ColMajor work = amap;
  const double base = std::max(trace(a) / static_cast<double>(n), 0.0);
  double jitter = opts.initial_jitter_scale * (base > 0.0 ? base : 1.0);

  for (int attempt = 0; attempt <= opts.max_retries + 1; ++attempt) {
    if (attempt > 0) {
      work = amap;
      work.diagonal().array() += jitter;
      jitter *= 10.0;
    }
    Eigen::LLT<ColMajor> llt(work);
    if (llt.info() != Eigen::Success) continue;
    RowMajor x = llt.solve(bmap);
    if (!x.allFinite()) continue;
    DenseMatrix out(n, b.cols());
    Eigen::Map<RowMajor>(out.data().data(), static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(b.cols())) = x;
    return out;
  }
  throw SingularMatrixError("solve_spd: Cholesky failed after " + std::to_string(opts.max_retries) +
                            " jitter retries (n=" + std::to_string(n) + ")");
}

double median_heuristic(const DenseMatrix& points, std::uint64_t seed, std::size_t max_points) {
  if (points.rows() < 2) throw InvalidArgument("median_heuristic: need at least two points");
  if (max_points < 2) throw InvalidArgument("median_heuristic: max_points must be >= 2");

  std::vector<std::size_t> rows;
  if (points.rows() > max_points) {
    CounterRng rng(seed, 0x6d656469616eULL);
    rows = sample_without_replacement(points.rows(), max_points, rng);
    std::sort(rows.begin(), rows.end());
  } else {
    rows.resize(points.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }

  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t p = 0; p < rows.size(); ++p) {
    auto xp = points.row(rows[p]);
    for (std::size_t q = p + 1; q < rows.size(); ++q) {
      auto xq = points.row(rows[q]);
      double s = 0.0;
      for (std::size_t k = 0; k < xp.size(); ++k) {
        const double d = xp[k] - xq[k];
        s += d * d;
      }
      dist.push_back(std::sqrt(s));
    }
  }

  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) throw DegenerateBandwidthError("median_heuristic: median pairwise distance is zero");
  return median;
}

}  // namespace dfpv::numkit
