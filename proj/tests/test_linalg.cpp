#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracext/error.hpp"
#include "fracext/linalg.hpp"

using namespace fracext;

namespace {

CsrMatrix laplacian_1d(std::size_t n) {
  CsrBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.add(i, i, 2.0);
    if (i > 0) b.add(i, i - 1, -1.0);
    if (i + 1 < n) b.add(i, i + 1, -1.0);
  }
  return b.build();
}

DenseMatrix random_spd(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix g(n);
  for (auto& v : g.data) v = dist(gen);
  DenseMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += g(i, k) * g(j, k);
      a(i, j) = s + (i == j ? static_cast<double>(n) : 0.0);
    }
  return a;
}

}  // namespace

TEST_CASE("builder sums duplicates and sorts columns") {
  CsrBuilder b(3);
  b.add(0, 2, 1.0);
  b.add(0, 0, 2.0);
  b.add(0, 2, 0.5);
  b.add(2, 1, -1.0);
  const auto a = b.build();
  CHECK(a.size() == 3);
  CHECK(a.nonzeros() == 3);
  CHECK(a.at(0, 0) == 2.0);
  CHECK(a.at(0, 2) == 1.5);
  CHECK(a.at(2, 1) == -1.0);
  CHECK(a.at(1, 1) == 0.0);
  CHECK(a.columns()[0] == 0);
  CHECK(a.columns()[1] == 2);
}

TEST_CASE("matvec matches dense product for any thread count") {
  const auto a = laplacian_1d(1000);
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.01 * static_cast<double>(i * i));
  std::vector<double> y1(1000), y4(1000);
  a.multiply(x, y1, 1);
  a.multiply(x, y4, 4);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double ref = 2.0 * x[i];
    if (i > 0) ref -= x[i - 1];
    if (i + 1 < x.size()) ref -= x[i + 1];
    CHECK(y1[i] == doctest::Approx(ref).epsilon(1e-15));
    CHECK(y1[i] == y4[i]);
  }
}

TEST_CASE("asymmetry and max_abs") {
  CsrBuilder b(2);
  b.add(0, 1, 1.0);
  b.add(1, 0, 1.25);
  b.add(1, 1, -3.0);
  const auto a = b.build();
  CHECK(a.asymmetry() == doctest::Approx(0.25));
  CHECK(a.max_abs() == 3.0);
  CHECK(laplacian_1d(5).asymmetry() == 0.0);
}

TEST_CASE("cg solves the identity in one step") {
  CsrBuilder b(4);
  for (std::size_t i = 0; i < 4; ++i) b.add(i, i, 1.0);
  const std::vector<double> rhs{1, -2, 3, 0.5};
  std::vector<double> x;
  const auto rep = cg_solve(b.build(), rhs, x);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(rhs[i]));
}

TEST_CASE("cg on a 2x2 system") {
  CsrBuilder b(2);
  b.add(0, 0, 4.0);
  b.add(0, 1, 1.0);
  b.add(1, 0, 1.0);
  b.add(1, 1, 3.0);
  const std::vector<double> rhs{1, 2};
  for (auto pc : {Preconditioner::none, Preconditioner::jacobi}) {
    std::vector<double> x;
    const auto rep = cg_solve(b.build(), rhs, x, {1e-14, 0, pc, 1});
    CHECK(rep.converged);
    CHECK(x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-14));
  }
}

TEST_CASE("cg zero rhs gives zero") {
  std::vector<double> x(10, 3.0);
  const std::vector<double> rhs(10, 0.0);
  const auto rep = cg_solve(laplacian_1d(10), rhs, x);
  CHECK(rep.converged);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("cg meets the true residual on a 1-D Laplacian") {
  const std::size_t n = 400;
  const auto a = laplacian_1d(n);
  std::vector<double> rhs(n, 1.0);
  std::vector<double> x;
  const auto rep = cg_solve(a, rhs, x, {1e-12, 0, Preconditioner::jacobi, 2});
  CHECK(rep.converged);
  std::vector<double> r(n);
  a.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  CHECK(norm2(r) <= 1e-12 * norm2(rhs));
  // exact solution x_i = (i+1)(n-i)/2
  for (std::size_t i = 0; i < n; i += 37)
    CHECK(x[i] == doctest::Approx(0.5 * static_cast<double>((i + 1) * (n - i))).epsilon(1e-9));
}

TEST_CASE("cg reports non-convergence at the iteration limit") {
  std::vector<double> rhs(200, 1.0), x;
  const auto rep = cg_solve(laplacian_1d(200), rhs, x, {1e-12, 3, Preconditioner::none, 1});
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 3);
}

TEST_CASE("cg A-norm error decreases monotonically") {
  const std::size_t n = 60;
  const auto a = laplacian_1d(n);
  std::vector<double> exact(n);
  for (std::size_t i = 0; i < n; ++i) exact[i] = std::cos(0.3 * static_cast<double>(i));
  std::vector<double> rhs(n);
  a.multiply(exact, rhs);
  double prev = INFINITY;
  for (std::size_t k = 1; k <= 30; ++k) {
    std::vector<double> x;
    cg_solve(a, rhs, x, {1e-300, k, Preconditioner::none, 1});
    std::vector<double> e(n), ae(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = x[i] - exact[i];
    a.multiply(e, ae);
    const double err = std::sqrt(dot(e, ae));
    CHECK(err <= prev * (1 + 1e-12));
    prev = err;
  }
}

TEST_CASE("cg rejects a non-positive diagonal") {
  CsrBuilder b(2);
  b.add(0, 0, 1.0);
  b.add(1, 1, -1.0);
  std::vector<double> rhs{1, 1}, x;
  CHECK_THROWS_AS(cg_solve(b.build(), rhs, x), SolverError);
}

TEST_CASE("cholesky against Eigen") {
  const auto a = random_spd(12, 7);
  const auto l = cholesky(a);
  Eigen::MatrixXd ea(12, 12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) ea(i, j) = a(i, j);
  const Eigen::MatrixXd el = ea.llt().matrixL();
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) CHECK(l(i, j) == doctest::Approx(el(i, j)).epsilon(1e-12));
  std::vector<double> b(12);
  for (std::size_t i = 0; i < 12; ++i) b[i] = static_cast<double>(i) - 4.0;
  const auto x = cholesky_solve(l, b);
  for (std::size_t i = 0; i < 12; ++i) {
    double r = -b[i];
    for (std::size_t j = 0; j < 12; ++j) r += a(i, j) * x[j];
    CHECK(std::abs(r) < 1e-12);
  }
}

TEST_CASE("cholesky rejects indefinite matrices") {
  DenseMatrix a(2);
  a(0, 0) = 1;
  a(0, 1) = a(1, 0) = 2;
  a(1, 1) = 1;
  CHECK_THROWS_AS(cholesky(a), SolverError);
}

TEST_CASE("sym_eig on a diagonal matrix") {
  DenseMatrix a(3);
  a(0, 0) = 3;
  a(1, 1) = -1;
  a(2, 2) = 2;
  const auto e = sym_eig(a);
  CHECK(e.values[0] == -1);
  CHECK(e.values[1] == 2);
  CHECK(e.values[2] == 3);
}

TEST_CASE("sym_eig residuals and orthonormality") {
  const auto a = random_spd(15, 3);
  const auto e = sym_eig(a);
  for (std::size_t k = 0; k + 1 < 15; ++k) CHECK(e.values[k] <= e.values[k + 1]);
  for (std::size_t k = 0; k < 15; ++k) {
    for (std::size_t i = 0; i < 15; ++i) {
      double av = 0.0;
      for (std::size_t j = 0; j < 15; ++j) av += a(i, j) * e.vectors(j, k);
      CHECK(std::abs(av - e.values[k] * e.vectors(i, k)) < 1e-10);
    }
    for (std::size_t q = 0; q < 15; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < 15; ++i) s += e.vectors(i, k) * e.vectors(i, q);
      CHECK(std::abs(s - (k == q ? 1.0 : 0.0)) < 1e-12);
    }
  }
  // trace is the eigenvalue sum
  double tr = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < 15; ++i) tr += a(i, i), sum += e.values[i];
  CHECK(sum == doctest::Approx(tr).epsilon(1e-13));
}

TEST_CASE("generalized eigenvectors are B-orthonormal; P1 Laplacian eigenvalues approach pi^2 from above") {
  double prev = INFINITY;
  for (std::size_t cells : {4u, 8u, 16u, 32u}) {
    const std::size_t n = cells - 1;
    const double h = 1.0 / static_cast<double>(cells);
    DenseMatrix k(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      k(i, i) = 2.0 / h;
      m(i, i) = 4.0 * h / 6.0;
      if (i + 1 < n) {
        k(i, i + 1) = k(i + 1, i) = -1.0 / h;
        m(i, i + 1) = m(i + 1, i) = h / 6.0;
      }
    }
    const auto e = sym_eig_dense(k, m);
    // lambda_j = (6 / h^2) (1 - cos(j pi h)) / (2 + cos(j pi h))
    for (std::size_t j = 1; j <= n; ++j) {
      const double c = std::cos(static_cast<double>(j) * std::numbers::pi * h);
      CHECK(e.values[j - 1] == doctest::Approx(6.0 / (h * h) * (1.0 - c) / (2.0 + c)).epsilon(1e-12));
    }
    const double l1 = e.values[0];
    CHECK(l1 > std::numbers::pi * std::numbers::pi);
    CHECK(l1 < prev);
    prev = l1;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) s += e.vectors(i, p) * m(i, j) * e.vectors(j, q);
        CHECK(std::abs(s - (p == q ? 1.0 : 0.0)) < 1e-11);
      }
  }
  CHECK(prev == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(2e-3));
}

TEST_CASE("matrix market output") {
  const auto path = std::filesystem::temp_directory_path() / "fracext_mm_test.mtx";
  laplacian_1d(3).write_matrix_market(path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  std::size_t r, c, nnz;
  in >> r >> c >> nnz;
  CHECK(r == 3);
  CHECK(c == 3);
  CHECK(nnz == 7);
  std::filesystem::remove(path);
}
