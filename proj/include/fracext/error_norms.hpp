#pragma once

#include <array>
#include <functional>
#include <span>

#include "fracext/mesh.hpp"
#include "fracext/spectral.hpp"

namespace fracext {

/// Per-cell quadrature for the weighted energy error.
///
/// Interior cells use Gauss-Legendre in y (y_order points) with the weight y^alpha
/// evaluated at the nodes.  The first y-interval [0, y_1] is split at y_1/2.  On
/// [0, y_1/2] the squared y-derivative error is expanded as
///   y^alpha (u_y - V_y)^2 = y^{-alpha} (y^alpha u_y)^2 - 2 (y^alpha u_y) V_y + y^alpha V_y^2
/// and each term is integrated with the Gauss-Jacobi rule matching its weight
/// (y^{-alpha}, 1 and y^alpha; jacobi_order points).  The x-derivative terms use
/// the y^alpha Jacobi rule.  [y_1/2, y_1] is handled like an interior cell.
struct QuadRule {
  int x_order = 4;
  int y_order = 4;
  int jacobi_order = 6;
};

/// Gradient (d/dx1, d/dx2, d/dy) of a reference field at (x', y), y > 0.
using GradientField = std::function<std::array<double, 3>(std::array<double, 2>, double)>;

/// ||grad(u - V)||_{L2(C_Y, y^alpha)} for the exact spectral extension u and the
/// discrete solution V given by its full nodal vector.
double weighted_h1_error(const CylinderMesh& mesh, std::span<const double> nodal, const SpectralSolution& exact,
                         const QuadRule& rule = {}, int threads = 1);

/// Same functional against a gradient field that is smooth up to y = 0; its part of
/// the first interval below y_1/2 uses the y^alpha Jacobi rule for the whole integrand.
double weighted_h1_error(const CylinderMesh& mesh, std::span<const double> nodal, const GradientField& exact,
                         double alpha, const QuadRule& rule = {}, int threads = 1);

/// ||u - U||_{H^s(Omega)} with U the bottom-face nodal values: U is projected onto
/// the eigenbasis up to `cutoff` per direction (0 selects 4 M_Omega).
double trace_hs_error(const OmegaSpec& omega, std::span<const double> trace, std::span<const SpectralMode> u_modes,
                      double s, int cutoff = 0);

/// L2(Omega) distance between two piecewise-linear functions on uniform grids of
/// (0, 1) with possibly different resolutions (nodal values including endpoints).
double l2_distance_p1(std::span<const double> a, std::span<const double> b);

}  // namespace fracext
