#pragma once

#include <array>
#include <functional>
#include <variant>
#include <vector>

#include "fracext/linalg.hpp"
#include "fracext/mesh.hpp"
#include "fracext/spectral.hpp"
#include "fracext/specfun.hpp"

namespace fracext {

/// Function of the base-domain point x' (second coordinate unused on the interval).
using ScalarField = std::function<double(std::array<double, 2>)>;

/// Coefficients of L w = -div(A grad w) + c w with A = diag(a_1, ..., a_n).
/// An empty `diffusion` means A = I; an empty `reaction` means c = 0.
struct OperatorCoeffs {
  std::vector<ScalarField> diffusion;
  ScalarField reaction;

  bool constant() const { return diffusion.empty() && !reaction; }
};

/// Right-hand side f: either a closure or a finite eigenexpansion.
using RhsSource = std::variant<ScalarField, std::vector<SpectralMode>>;

struct AssemblyOptions {
  int x_order = 0;   ///< Gauss points per direction; 0 selects 2 (constant data) or 3
  int rhs_order = 4; ///< Gauss points per direction for int f phi_i
  int threads = 1;
};

/// Free-dof system for the truncated extension problem (Dirichlet dofs eliminated).
struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

/// int_a^b y^{alpha + j} dy = (b^p - a^p) / p with p = alpha + j + 1.
double weighted_moment(double a, double b, double alpha, int j);

/// I_j = int_0^1 (a + h t)^alpha t^j dt for j = 0, 1, 2 with h = b - a.
/// Evaluated without the cancellation that the raw moments suffer when a >> h.
std::array<double, 3> shifted_weighted_moments(double a, double b, double alpha);

/// Exact weighted 1-D element matrices on [a, b] for the linear shape
/// functions (b - y)/h and (y - a)/h:
///   mass(i, j)  = int y^alpha chi_i chi_j,   stiff(i, j) = int y^alpha chi_i' chi_j'.
struct YElement {
  std::array<std::array<double, 2>, 2> mass;
  std::array<std::array<double, 2>, 2> stiff;
};
YElement weighted_y_element(double a, double b, double alpha);

/// Base-cell matrices: stiffness int a grad phi_i . grad phi_j, mass int phi_i phi_j
/// and reaction int c phi_i phi_j, each nloc x nloc row-major (nloc = 2 or 4).
struct XElement {
  std::vector<double> stiff;
  std::vector<double> mass;
  std::vector<double> reaction;
};
XElement base_element(const CylinderMesh& mesh, std::size_t cell, const OperatorCoeffs& coeffs, int order);

/// Assembles int y^alpha (A grad V . grad W + c V W) = d_s int_Omega f tr W on the
/// free dofs.  Throws SolverError if a diffusion coefficient is not positive (or
/// the reaction coefficient negative) at a quadrature point.
SparseSystem assemble_extension_system(const CylinderMesh& mesh, const FracParams& params, const RhsSource& f,
                                       const OperatorCoeffs& coeffs = {}, const AssemblyOptions& options = {});

/// Full nodal vector (Dirichlet entries zero) from free-dof values.
std::vector<double> expand_free(const CylinderMesh& mesh, std::span<const double> free_values);

/// Bottom-face values U = V(., 0), in base-node order.
std::vector<double> bottom_trace(const CylinderMesh& mesh, std::span<const double> nodal);

}  // namespace fracext
