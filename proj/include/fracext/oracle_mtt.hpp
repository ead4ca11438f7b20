#pragma once

#include <functional>
#include <vector>

#include "fracext/linalg.hpp"

namespace fracext {

/// L w = -(a w')' + c w on (0, 1) with homogeneous Dirichlet conditions.
/// An empty `a` means a = 1, an empty `c` means c = 0.
struct Operator1D {
  std::function<double(double)> a;
  std::function<double(double)> c;
};

/// Matrix transference: P1 stiffness K (with a and c) and mass M on N uniform
/// cells, generalized eigenpairs K Phi = M Phi Lambda, and
///   u_h = Phi Lambda^{-s} Phi^T b,   b_i = int f phi_i,
/// i.e. the s-th power of the discrete operator applied to the L2 projection of f.
class MttOracle {
 public:
  /// Throws ConfigError for N < 2 or N > 2000, SolverError when a <= 0 or c < 0
  /// at a quadrature point or the eigensolver fails.
  MttOracle(const Operator1D& op, std::size_t cells);

  std::size_t cells() const { return cells_; }

  /// Discrete eigenvalues, ascending.
  const std::vector<double>& eigenvalues() const { return eig_.values; }

  /// Nodal values (N + 1 entries, zero at both ends) for the source f and power s in [0, 1].
  std::vector<double> solve(const std::function<double(double)>& f, double s) const;

  /// b_i = int f phi_i over interior nodes.
  std::vector<double> load(const std::function<double(double)>& f) const;

  const DenseMatrix& stiffness() const { return k_; }
  const DenseMatrix& mass() const { return m_; }

 private:
  std::size_t cells_;
  DenseMatrix k_, m_;
  EigenDecomposition eig_;
};

/// One-shot form of MttOracle(op, N).solve(f, s).
std::vector<double> mtt_solve(const Operator1D& op, const std::function<double(double)>& f, double s,
                              std::size_t cells);

}  // namespace fracext
