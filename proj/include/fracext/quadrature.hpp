#pragma once

#include <vector>

namespace fracext {

/// Quadrature rule on the reference interval [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1]; exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight t^beta (beta > -1):
///   int_0^1 t^beta p(t) dt = sum_i w_i p(t_i)   for deg p <= 2n - 1.
/// Built with the Golub-Welsch algorithm.
GaussRule gauss_jacobi(int n, double beta);

}  // namespace fracext
