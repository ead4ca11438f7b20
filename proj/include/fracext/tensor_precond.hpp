#pragma once

#include <span>
#include <vector>

#include "fracext/assembly.hpp"
#include "fracext/linalg.hpp"

namespace fracext {

/// Fast-diagonalization preconditioner for the extension system.
///
/// With coefficients depending on x' only, the free-dof matrix factors as
///   A = M_y (x) K_x + S_y (x) M_x     (layers outer, base nodes inner)
/// where K_x includes the reaction term.  Solving K_x Phi = M_x Phi Lambda with
/// Phi^T M_x Phi = I reduces A^{-1} to one tridiagonal solve (lambda_j M_y + S_y)
/// per x-mode.  On the interval K_x is used as assembled, so the inverse is
/// exact.  On the square the x-problem is replaced by its separable
/// constant-coefficient part (cell-averaged a_1, a_2, c); this is exact for
/// constant coefficients and a preconditioner otherwise.
class TensorPreconditioner {
 public:
  TensorPreconditioner(const CylinderMesh& mesh, const FracParams& params, const OperatorCoeffs& coeffs = {},
                       const AssemblyOptions& options = {});

  /// z = P^{-1} r on the free dofs.
  void apply(std::span<const double> r, std::span<double> z) const;

  /// True when P equals the assembled matrix up to rounding.
  bool exact() const { return exact_; }

  /// Callable for CgOptions::custom; refers to this object.
  PreconditionerFn function() const {
    return [this](std::span<const double> r, std::span<double> z) { apply(r, z); };
  }

 private:
  void to_modes(std::span<const double> in, std::span<double> out) const;
  void from_modes(std::span<const double> in, std::span<double> out) const;

  std::size_t layers_ = 0;
  std::size_t line_ = 0;   // interior nodes per direction
  std::size_t base_ = 0;   // interior base nodes
  int dimension_ = 1;
  bool exact_ = false;
  int threads_ = 1;
  DenseMatrix phi_;              // line_ x line_ on the square, base_ x base_ on the interval
  std::vector<double> diag_;     // LDL^T of each tridiagonal system, mode-major
  std::vector<double> lower_;
};

}  // namespace fracext
