#include "fracext/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <Eigen/Dense>

#include "fracext/error.hpp"
#include "parallel.hpp"

namespace fracext {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                     std::vector<std::size_t> columns, std::vector<double> values)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      columns_(std::move(columns)),
      values_(std::move(values)) {
  if (row_offsets_.size() != n_ + 1 || columns_.size() != values_.size() ||
      row_offsets_.back() != values_.size()) {
    throw ConfigError("CsrMatrix: inconsistent compressed row arrays");
  }
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y, int threads) const {
  detail::parallel_for(n_, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        sum += values_[k] * x[columns_[k]];
      }
      y[i] = sum;
    }
  });
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      worst = std::max(worst, std::abs(values_[k] - at(columns_[k], i)));
    }
  }
  return worst;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      dense[i * n_ + columns_[k]] = values_[k];
    }
  }
  return dense;
}

void CsrMatrix::write_matrix_market(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << n_ << ' ' << n_ << ' ' << values_.size() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      out << i + 1 << ' ' << columns_[k] + 1 << ' ' << values_[k] << '\n';
    }
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

void CsrBuilder::add(std::size_t i, std::size_t j, double v) {
  auto& row = rows_[i];
  for (auto& entry : row) {
    if (entry.first == j) {
      entry.second += v;
      return;
    }
  }
  row.emplace_back(j, v);
}

CsrMatrix CsrBuilder::build() const {
  std::vector<std::size_t> offsets(n_ + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n_; ++i) {
    auto row = rows_[i];
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [j, v] : row) {
      cols.push_back(j);
      vals.push_back(v);
    }
    offsets[i + 1] = cols.size();
  }
  return CsrMatrix(n_, std::move(offsets), std::move(cols), std::move(vals));
}

double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

SolveReport cg_solve(const CsrMatrix& a, std::span<const double> b, std::vector<double>& x,
                     const CgOptions& options) {
  const std::size_t n = a.size();
  if (b.size() != n) throw ConfigError("cg_solve: right-hand side has wrong length");
  if (x.size() != n) x.assign(n, 0.0);
  const std::size_t max_it = options.max_iterations ? options.max_iterations : 10 * n + 100;

  std::vector<double> inv_diag(n, 1.0);
  if (!options.custom && options.precond == Preconditioner::jacobi) {
    const auto d = a.diagonal();
    for (std::size_t i = 0; i < n; ++i) {
      if (!(d[i] > 0.0)) throw SolverError("cg_solve: non-positive diagonal entry in row " + std::to_string(i));
      inv_diag[i] = 1.0 / d[i];
    }
  }

  SolveReport report;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    return report;
  }

  std::vector<double> r(n), z(n), p(n), ap(n);
  const auto offsets = a.row_offsets();
  const auto cols = a.columns();
  const auto vals = a.values();
  // ||b - A x|| and ||(|A| |x|)||, the scale of rounding in the product.
  double scale = bnorm;
  auto true_residual = [&] {
    a.multiply(x, ap, options.threads);
    double abs_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = b[i] - ap[i];
      double row = 0.0;
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) row += std::abs(vals[k] * x[cols[k]]);
      abs_sq += row * row;
    }
    scale = std::max(bnorm, std::sqrt(abs_sq));
    return norm2(r);
  };
  auto precondition = [&] {
    if (options.custom) {
      options.custom(r, z);
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    }
  };
  auto restart = [&] {
    precondition();
    p = z;
    return dot(r, z);
  };
  auto finish = [&](double rnorm) {
    report.relative_residual = rnorm / bnorm;
    report.scaled_residual = rnorm / scale;
  };

  double rnorm = true_residual();
  double rz = restart();
  finish(rnorm);
  while (report.scaled_residual > options.tol && report.iterations < max_it) {
    a.multiply(p, ap, options.threads);
    const double curvature = dot(p, ap);
    if (!(curvature > 0.0)) {
      throw SolverError("cg_solve: non-positive curvature, matrix is not SPD");
    }
    const double step = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    ++report.iterations;
    rnorm = norm2(r);
    if (rnorm <= options.tol * scale) {
      // The recursively updated residual drifts; confirm with the true one.
      rnorm = true_residual();
      finish(rnorm);
      if (report.scaled_residual <= options.tol) break;
      rz = restart();
      continue;
    }
    report.relative_residual = rnorm / bnorm;
    report.scaled_residual = rnorm / scale;
    precondition();
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  report.converged = report.scaled_residual <= options.tol;
  return report;
}

DenseMatrix DenseMatrix::identity(std::size_t size) {
  DenseMatrix m(size);
  for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix cholesky(const DenseMatrix& a) {
  const std::size_t n = a.n;
  DenseMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw SolverError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

namespace {

// Solves L y = b in place.
void forward_subst(const DenseMatrix& l, std::span<double> b) {
  for (std::size_t i = 0; i < l.n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * b[k];
    b[i] = v / l(i, i);
  }
}

// Solves L^T y = b in place.
void backward_subst(const DenseMatrix& l, std::span<double> b) {
  for (std::size_t ii = l.n; ii-- > 0;) {
    double v = b[ii];
    for (std::size_t k = ii + 1; k < l.n; ++k) v -= l(k, ii) * b[k];
    b[ii] = v / l(ii, ii);
  }
}

}  // namespace

std::vector<double> cholesky_solve(const DenseMatrix& lower, std::span<const double> b) {
  std::vector<double> x(b.begin(), b.end());
  forward_subst(lower, x);
  backward_subst(lower, x);
  return x;
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const DenseMatrix& m) {
  return Eigen::Map<const RowMajor>(m.data.data(), static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
}

template <class Solver>
EigenDecomposition unpack(const Solver& es, std::size_t n) {
  EigenDecomposition result;
  result.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  result.vectors = DenseMatrix(n);
  Eigen::Map<RowMajor>(result.vectors.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
      es.eigenvectors();
  return result;
}

}  // namespace

EigenDecomposition sym_eig(const DenseMatrix& a) {
  Eigen::SelfAdjointEigenSolver<RowMajor> es(view(a));
  if (es.info() != Eigen::Success) throw SolverError("sym_eig: eigensolver did not converge");
  return unpack(es, a.n);
}

EigenDecomposition sym_eig_dense(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n != b.n) throw ConfigError("sym_eig_dense: dimension mismatch");
  cholesky(b);  // SPD check with a pivot diagnostic
  Eigen::GeneralizedSelfAdjointEigenSolver<RowMajor> es(view(a), view(b));
  if (es.info() != Eigen::Success) throw SolverError("sym_eig_dense: eigensolver did not converge");
  return unpack(es, a.n);
}

}  // namespace fracext
