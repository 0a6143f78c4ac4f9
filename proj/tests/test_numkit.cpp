#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/grad_tape.hpp"
#include "dfpv/numkit/linalg.hpp"
#include "support/oracles.hpp"

using namespace dfpv;
using numkit::CounterRng;
using numkit::DenseMatrix;
using numkit::GradTape;
using numkit::Vector;

TEST_CASE("products agree with triple loops") {
  CounterRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng.below(9), k = 1 + rng.below(9), m = 1 + rng.below(9);
    const auto a = oracle::random_matrix(n, k, rng);
    const auto b = oracle::random_matrix(k, m, rng);
    CHECK(oracle::max_abs_diff(numkit::matmul(a, b), oracle::naive_matmul(a, b)) < 1e-12);
    CHECK(oracle::max_abs_diff(numkit::matmul_tn(a.transpose(), b), oracle::naive_matmul(a, b)) < 1e-12);
    CHECK(oracle::max_abs_diff(numkit::matmul_nt(a, b.transpose()), oracle::naive_matmul(a, b)) < 1e-12);
    CHECK(oracle::max_abs_diff(numkit::gram(a), oracle::naive_matmul(oracle::transpose(a), a)) < 1e-12);
    const Vector x(b.data().begin(), b.data().begin() + static_cast<std::ptrdiff_t>(k));
    const auto mv = numkit::matvec(a, x);
    const auto ref = oracle::naive_matmul(a, DenseMatrix::column(x));
    for (std::size_t i = 0; i < n; ++i) CHECK(mv[i] == doctest::Approx(ref(i, 0)).epsilon(1e-12));
  }
}

TEST_CASE("gram is exactly symmetric") {
  CounterRng rng(3);
  const auto a = oracle::random_matrix(57, 13, rng);
  const auto g = numkit::gram(a);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) CHECK(g(i, j) == g(j, i));
}

TEST_CASE("shape mismatches throw") {
  DenseMatrix a(2, 3), b(2, 3);
  CHECK_THROWS_AS(numkit::matmul(a, b), InvalidArgument);
  CHECK_THROWS_AS(numkit::hadamard(a, DenseMatrix(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(numkit::solve_spd(DenseMatrix(2, 3), DenseMatrix(2, 1)), InvalidArgument);
}

TEST_CASE("row-major storage and transpose") {
  DenseMatrix a{{1, 2, 3}, {4, 5, 6}};
  CHECK(a.data()[1] == 2);
  CHECK(a.data()[3] == 4);
  const auto t = a.transpose();
  CHECK(t.rows() == 3);
  CHECK(t(2, 1) == 6);
  CHECK(numkit::trace(DenseMatrix{{1, 9}, {9, 4}}) == 5);
}

TEST_CASE("kron_vec: (a kron b)[i*len(b)+j] = a_i b_j") {
  const Vector a{1, 2}, b{3, 4, 5};
  const Vector k = numkit::kron_vec(a, b);
  REQUIRE(k.size() == 6);
  CHECK(k == Vector{3, 4, 5, 6, 8, 10});
}

TEST_CASE("row_kron matches kron_vec row by row") {
  CounterRng rng(5);
  const auto a = oracle::random_matrix(7, 3, rng);
  const auto b = oracle::random_matrix(7, 4, rng);
  const auto k = numkit::row_kron(a, b);
  REQUIRE(k.cols() == 12);
  for (std::size_t i = 0; i < 7; ++i) {
    const auto row = numkit::kron_vec(a.row(i), b.row(i));
    for (std::size_t j = 0; j < 12; ++j) CHECK(k(i, j) == row[j]);
  }
}

TEST_CASE("solve_spd matches Gaussian elimination") {
  CounterRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    const auto x = oracle::random_matrix(n + 5, n, rng);
    const auto a = numkit::add_diagonal(numkit::gram(x), 0.1);
    const auto b = oracle::random_matrix(n, 1 + rng.below(4), rng);
    const auto mine = numkit::solve_spd(a, b);
    const auto ref = oracle::gauss_solve(a, b);
    CHECK(oracle::max_abs_diff(mine, ref) < 1e-9 * (1.0 + oracle::max_abs_diff(ref, DenseMatrix(ref.rows(), ref.cols()))));
  }
}

TEST_CASE("solve_spd jitters a singular PSD matrix, refuses an indefinite one") {
  const DenseMatrix rank1{{1, 1}, {1, 1}};
  CHECK_NOTHROW(numkit::solve_spd(rank1, DenseMatrix{{1}, {1}}));
  const DenseMatrix indefinite{{1, 0}, {0, -1}};
  CHECK_THROWS_AS(numkit::solve_spd(indefinite, DenseMatrix{{1}, {1}}), SingularMatrixError);
}

TEST_CASE("median heuristic equals the sorted-distance median") {
  CounterRng rng(23);
  for (std::size_t n : {2u, 3u, 10u, 41u}) {
    const auto p = oracle::random_matrix(n, 2, rng);
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        d.push_back(std::hypot(p(i, 0) - p(j, 0), p(i, 1) - p(j, 1)));
    std::sort(d.begin(), d.end());
    const double med = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
    CHECK(numkit::median_heuristic(p) == doctest::Approx(med).epsilon(1e-14));
  }
  CHECK_THROWS_AS(numkit::median_heuristic(DenseMatrix{{1.0}, {1.0}, {1.0}}), DegenerateBandwidthError);
}

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
  CounterRng a(42, 1), b(42, 1), c(42, 2), d(43, 1);
  const auto x = a(), y = b();
  CHECK(x == y);
  CHECK(x != c());
  CHECK(x != d());
  CHECK(a.counter() == 1);
}

TEST_CASE("uniform and normal moments") {
  CounterRng rng(99);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
}

TEST_CASE("sampling without replacement is a set of distinct in-range indices") {
  CounterRng rng(1);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.below(40), k = rng.below(n + 1);
    const auto idx = numkit::sample_without_replacement(n, k, rng);
    CHECK(idx.size() == k);
    std::set<std::size_t> s(idx.begin(), idx.end());
    CHECK(s.size() == k);
    for (auto i : idx) CHECK(i < n);
  }
  CHECK_THROWS_AS(numkit::sample_without_replacement(3, 4, rng), InvalidArgument);
}

// Every tape primitive against central differences of a recomputed forward pass.
namespace {

using Builder = std::function<numkit::NodeRef(GradTape&, numkit::NodeRef)>;

void check_op(const DenseMatrix& x0, const Builder& build, double tol = 1e-6) {
  GradTape tape;
  const auto x = tape.parameter(x0);
  const auto out = build(tape, x);
  const auto g = tape.backward(out).of(x);
  auto f = [&](const Vector& flat) {
    GradTape t2;
    const auto p = t2.parameter(DenseMatrix(x0.rows(), x0.cols(), flat));
    return t2.value(build(t2, p))(0, 0);
  };
  const Vector fd = oracle::central_diff(f, x0.storage(), 1e-6);
  CHECK(oracle::rel_diff(g.storage(), fd) < tol);
}

}  // namespace

TEST_CASE("tape primitives match finite differences") {
  CounterRng rng(7);
  const auto x0 = oracle::random_matrix(5, 3, rng);
  const auto w = oracle::random_matrix(4, 3, rng);
  const auto bias = oracle::random_matrix(1, 4, rng);
  const auto other = oracle::random_matrix(5, 2, rng);
  const auto left = oracle::random_matrix(6, 5, rng);
  const auto right = oracle::random_matrix(3, 2, rng);
  const auto target6x2 = oracle::random_matrix(6, 2, rng);

  SUBCASE("affine in the input, weight and bias") {
    check_op(x0, [&](GradTape& t, numkit::NodeRef x) {
      return t.squared_error(t.affine(x, t.constant(w), t.constant(bias)), DenseMatrix(5, 4, 0.3), 0.5);
    });
    check_op(w, [&](GradTape& t, numkit::NodeRef p) {
      return t.squared_error(t.affine(t.constant(x0), p, t.constant(bias)), DenseMatrix(5, 4, 0.3));
    });
    check_op(bias, [&](GradTape& t, numkit::NodeRef p) {
      return t.squared_error(t.affine(t.constant(x0), t.constant(w), p), DenseMatrix(5, 4, -1.0));
    });
  }
  SUBCASE("relu away from the kink") {
    check_op(x0, [&](GradTape& t, numkit::NodeRef x) {
      return t.squared_error(t.relu(x), DenseMatrix(5, 3, 0.2));
    });
  }
  SUBCASE("row_kron in both arguments") {
    check_op(x0, [&](GradTape& t, numkit::NodeRef x) {
      return t.squared_error(t.row_kron(x, t.constant(other)), DenseMatrix(5, 6, 0.1));
    });
    check_op(other, [&](GradTape& t, numkit::NodeRef p) {
      return t.squared_error(t.row_kron(t.constant(x0), p), DenseMatrix(5, 6, 0.1));
    });
    check_op(x0, [&](GradTape& t, numkit::NodeRef x) {
      return t.squared_error(t.row_kron(x, x), DenseMatrix(5, 9, 0.1));
    });
  }
  SUBCASE("constant products and appended ones") {
    check_op(x0, [&](GradTape& t, numkit::NodeRef x) {
      return t.squared_error(t.matmul_const_right(t.matmul_const_left(left, x), right), target6x2);
    });
    check_op(x0, [&](GradTape& t, numkit::NodeRef x) {
      return t.squared_error(t.append_ones(x), DenseMatrix(5, 4, 0.5), 2.0, 3.0);
    });
  }
}

TEST_CASE("squared_error value") {
  GradTape t;
  const auto x = t.parameter(DenseMatrix{{1, 2}});
  const auto l = t.squared_error(x, DenseMatrix{{0, 0}}, 0.5, 1.0);
  CHECK(t.value(l)(0, 0) == doctest::Approx(0.5 * 5 + 1.0));
  CHECK_THROWS_AS(t.backward(x), InvalidArgument);
}
