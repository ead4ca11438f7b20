#pragma once

#include <array>
#include <span>
#include <vector>

#include "fracext/mesh.hpp"
#include "fracext/specfun.hpp"

namespace fracext {

/// One Dirichlet eigenpair of -Laplace on the unit interval (n == 0) or the
/// unit square, with an expansion coefficient.  Eigenfunctions are
/// L2-normalized: sqrt(2) sin(m pi x) and 2 sin(m pi x1) sin(n pi x2).
struct SpectralMode {
  int m = 1;
  int n = 0;
  double lambda = 0.0;
  double coeff = 0.0;

  static SpectralMode interval(int m, double coeff);
  static SpectralMode square(int m, int n, double coeff);

  int dimension() const { return n == 0 ? 1 : 2; }
  double eigenfunction(std::array<double, 2> x) const;
  std::array<double, 2> eigenfunction_gradient(std::array<double, 2> x) const;
};

/// u = sum_k u_k phi_k together with its extension sum_k u_k phi_k(x') psi_k(y).
struct SpectralSolution {
  std::vector<SpectralMode> modes;
  FracParams params;
};

/// u_k = lambda_k^{-s} f_k.
SpectralSolution spectral_fractional_solve(std::span<const SpectralMode> f_modes, double s);

/// f_k = lambda_k^{s} u_k, the inverse of spectral_fractional_solve.
std::vector<SpectralMode> apply_fractional_power(std::span<const SpectralMode> u_modes, double s);

/// sum_k c_k phi_k(x').
double evaluate_modes(std::span<const SpectralMode> modes, std::array<double, 2> x);

struct ExtensionValue {
  double value = 0.0;
  std::array<double, 3> grad{};  ///< (d/dx1, d/dx2, d/dy); d/dx2 is zero on the interval
};

/// Exact extension and its gradient at (x', y).  Throws DomainError for a
/// gradient request at y = 0 when s != 1/2 (singular there); use
/// exact_trace for values on the bottom face.
ExtensionValue exact_extension_eval(const SpectralSolution& sol, std::array<double, 2> x, double y);

/// Value of the extension at y = 0, i.e. u(x').
double exact_trace(const SpectralSolution& sol, std::array<double, 2> x);

/// (sum_k lambda_k^sigma c_k^2)^{1/2}.
double hs_norm(std::span<const SpectralMode> modes, double sigma);

/// Squared weighted energy of the exact extension on the full cylinder,
/// d_s sum_k lambda_k^s u_k^2 (for L2-orthonormal modes).
double extension_energy_squared(const SpectralSolution& sol);

/// Squared weighted energy on Omega x (Y, inf), from the boundary term
/// -Y^alpha psi_k(Y) psi_k'(Y) of each mode.
double tail_energy_squared(const SpectralSolution& sol, double Y);

/// Coefficients int_Omega U phi_k of the piecewise multilinear interpolant of
/// nodal values U on the base grid, for all modes with 1 <= m[, n] <= cutoff.
/// Per-cell Gauss quadrature (closed form for high frequencies), tensorized over directions.
std::vector<SpectralMode> project_trace(const OmegaSpec& omega, std::span<const double> nodal, int cutoff);

}  // namespace fracext
