#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fracext {

/// Square sparse matrix in compressed sparse row layout.  Column indices are
/// sorted within each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
            std::vector<std::size_t> columns, std::vector<double> values);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }

  /// Entry (i, j), zero when outside the pattern.  Binary search in row i.
  double at(std::size_t i, std::size_t j) const;

  std::vector<double> diagonal() const;

  /// y = A x.  Rows are split into contiguous blocks over `threads` workers;
  /// every row is summed by a single thread so the result does not depend on
  /// the thread count.
  void multiply(std::span<const double> x, std::span<double> y, int threads = 1) const;

  /// max |a_ij - a_ji|, visiting every stored entry.
  double asymmetry() const;
  double max_abs() const;

  /// Row-major dense copy; intended for small matrices only.
  std::vector<double> to_dense() const;

  /// Matrix Market coordinate format ("general", 1-based).
  void write_matrix_market(const std::string& path) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> columns_;
  std::vector<double> values_;
};

/// Accumulates (i, j, value) triplets and compresses them into a CsrMatrix,
/// summing duplicates in insertion order.
class CsrBuilder {
 public:
  explicit CsrBuilder(std::size_t n) : n_(n), rows_(n) {}
  void add(std::size_t i, std::size_t j, double v);
  CsrMatrix build() const;

 private:
  std::size_t n_;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
};

enum class Preconditioner { none, jacobi };

struct SolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;  ///< ||b - A x|| / ||b||
  double scaled_residual = 0.0;    ///< ||b - A x|| / max(||b||, || |A| |x| ||)
  bool converged = false;
};

/// z = P^{-1} r for a symmetric positive definite P.
using PreconditionerFn = std::function<void(std::span<const double> r, std::span<double> z)>;

struct CgOptions {
  double tol = 1e-12;
  std::size_t max_iterations = 0;  ///< 0 selects 10 * size + 100
  Preconditioner precond = Preconditioner::jacobi;
  int threads = 1;
  PreconditionerFn custom;  ///< overrides `precond` when set
};

/// Preconditioned conjugate gradients for an SPD matrix.  On entry x holds the
/// initial guess (resized and zeroed if its size does not match).  Stops when
/// ||b - A x||_2 <= tol * max(||b||_2, || |A| |x| ||_2), checked on the true
/// residual.  The second term is the rounding level of the product A x; it only
/// takes over when cancellation inside rows exceeds the size of b.  When the
/// iteration limit is hit, x is the last iterate and report.converged is false.
SolveReport cg_solve(const CsrMatrix& a, std::span<const double> b, std::vector<double>& x,
                     const CgOptions& options = {});

/// Dense row-major square matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
  static DenseMatrix identity(std::size_t size);

  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Lower Cholesky factor L with A = L L^T.  Throws SolverError if A is not
/// numerically positive definite.
DenseMatrix cholesky(const DenseMatrix& a);

/// Solves A x = b given the Cholesky factor of A.
std::vector<double> cholesky_solve(const DenseMatrix& lower, std::span<const double> b);

struct EigenDecomposition {
  std::vector<double> values;  ///< ascending
  DenseMatrix vectors;         ///< column k is the eigenvector of values[k]
};

/// Symmetric eigenproblem A v = mu v (Eigen's self-adjoint solver).  Throws
/// SolverError if the iteration fails.
EigenDecomposition sym_eig(const DenseMatrix& a);

/// Generalized symmetric-definite eigenproblem A v = mu B v, B SPD.
/// Eigenvectors are B-orthonormal.  Throws SolverError if B is not SPD.
EigenDecomposition sym_eig_dense(const DenseMatrix& a, const DenseMatrix& b);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

}  // namespace fracext
