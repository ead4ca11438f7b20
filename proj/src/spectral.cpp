#include "fracext/spectral.hpp"

#include <cmath>
#include <numbers>

#include "fracext/error.hpp"
#include "fracext/quadrature.hpp"

namespace fracext {

namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);
}  // namespace

SpectralMode SpectralMode::interval(int m, double coeff) {
  if (m < 1) throw DomainError("mode index must be positive");
  return {m, 0, kPi * kPi * m * m, coeff};
}

SpectralMode SpectralMode::square(int m, int n, double coeff) {
  if (m < 1 || n < 1) throw DomainError("mode indices must be positive");
  return {m, n, kPi * kPi * (m * m + n * n), coeff};
}

double SpectralMode::eigenfunction(std::array<double, 2> x) const {
  if (n == 0) return kSqrt2 * std::sin(m * kPi * x[0]);
  return 2.0 * std::sin(m * kPi * x[0]) * std::sin(n * kPi * x[1]);
}

std::array<double, 2> SpectralMode::eigenfunction_gradient(std::array<double, 2> x) const {
  if (n == 0) return {kSqrt2 * m * kPi * std::cos(m * kPi * x[0]), 0.0};
  return {2.0 * m * kPi * std::cos(m * kPi * x[0]) * std::sin(n * kPi * x[1]),
          2.0 * n * kPi * std::sin(m * kPi * x[0]) * std::cos(n * kPi * x[1])};
}

SpectralSolution spectral_fractional_solve(std::span<const SpectralMode> f_modes, double s) {
  SpectralSolution sol{{}, FracParams::from_s(s)};
  sol.modes.reserve(f_modes.size());
  for (auto mode : f_modes) {
    if (!(mode.lambda > 0.0)) throw DomainError("eigenvalues must be positive");
    mode.coeff *= std::pow(mode.lambda, -s);
    sol.modes.push_back(mode);
  }
  return sol;
}

std::vector<SpectralMode> apply_fractional_power(std::span<const SpectralMode> u_modes, double s) {
  std::vector<SpectralMode> out(u_modes.begin(), u_modes.end());
  for (auto& mode : out) mode.coeff *= std::pow(mode.lambda, s);
  return out;
}

double evaluate_modes(std::span<const SpectralMode> modes, std::array<double, 2> x) {
  double v = 0.0;
  for (const auto& mode : modes) v += mode.coeff * mode.eigenfunction(x);
  return v;
}

ExtensionValue exact_extension_eval(const SpectralSolution& sol, std::array<double, 2> x, double y) {
  if (!(y >= 0.0)) throw DomainError("exact_extension_eval: y must be nonnegative");
  if (y == 0.0 && !sol.params.is_half()) {
    throw DomainError("exact_extension_eval: gradient is singular at the bottom face for s != 1/2");
  }
  ExtensionValue out;
  for (const auto& mode : sol.modes) {
    const auto pp = psi_pair(sol.params, mode.lambda, y);
    const double phi = mode.eigenfunction(x);
    const auto dphi = mode.eigenfunction_gradient(x);
    out.value += mode.coeff * phi * pp.psi;
    out.grad[0] += mode.coeff * dphi[0] * pp.psi;
    out.grad[1] += mode.coeff * dphi[1] * pp.psi;
    out.grad[2] += mode.coeff * phi * pp.dpsi;
  }
  return out;
}

double exact_trace(const SpectralSolution& sol, std::array<double, 2> x) { return evaluate_modes(sol.modes, x); }

double hs_norm(std::span<const SpectralMode> modes, double sigma) {
  double sum = 0.0;
  for (const auto& mode : modes) sum += std::pow(mode.lambda, sigma) * mode.coeff * mode.coeff;
  return std::sqrt(sum);
}

double extension_energy_squared(const SpectralSolution& sol) {
  return sol.params.d_s * hs_norm(sol.modes, sol.params.s) * hs_norm(sol.modes, sol.params.s);
}

double tail_energy_squared(const SpectralSolution& sol, double Y) {
  if (!(Y > 0.0)) throw DomainError("tail_energy_squared: Y must be positive");
  double sum = 0.0;
  for (const auto& mode : sol.modes) {
    const auto pp = psi_pair(sol.params, mode.lambda, Y);
    sum += -std::pow(Y, sol.params.alpha) * pp.psi * pp.dpsi * mode.coeff * mode.coeff;
  }
  return sum;
}

std::vector<SpectralMode> project_trace(const OmegaSpec& omega, std::span<const double> nodal, int cutoff) {
  if (cutoff < 1) throw ConfigError("project_trace: cutoff must be positive");
  if (nodal.size() != omega.node_count()) throw ConfigError("project_trace: nodal vector has wrong length");
  const std::size_t cells = omega.subdivisions;
  const std::size_t nodes = cells + 1;
  const double h = omega.width();
  const auto rule = gauss_legendre(12);
  const std::size_t k_max = static_cast<std::size_t>(cutoff);

  // b(m, i) = int_0^1 hat_i(x) sqrt(2) sin(m pi x) dx
  std::vector<double> b(k_max * nodes, 0.0);
  for (std::size_t m = 1; m <= k_max; ++m) {
    double* row = &b[(m - 1) * nodes];
    const double k = static_cast<double>(m) * kPi;
    for (std::size_t c = 0; c < cells; ++c) {
      const double x0 = static_cast<double>(c) * h;
      if (k * h > 4.0) {
        // closed form; no cancellation at this k h
        const double x1 = x0 + h;
        const double i0 = (std::cos(k * x0) - std::cos(k * x1)) / k;
        const double i1 = -h * std::cos(k * x1) / k + (std::sin(k * x1) - std::sin(k * x0)) / (k * k);
        row[c] += kSqrt2 * (i0 - i1 / h);
        row[c + 1] += kSqrt2 * i1 / h;
        continue;
      }
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.nodes[q];
        const double w = h * rule.weights[q] * kSqrt2 * std::sin(k * (x0 + h * t));
        row[c] += w * (1.0 - t);
        row[c + 1] += w * t;
      }
    }
  }

  std::vector<SpectralMode> out;
  if (omega.kind == DomainKind::unit_interval) {
    out.reserve(k_max);
    for (std::size_t m = 1; m <= k_max; ++m) {
      double sum = 0.0;
      for (std::size_t i = 0; i < nodes; ++i) sum += b[(m - 1) * nodes + i] * nodal[i];
      out.push_back(SpectralMode::interval(static_cast<int>(m), sum));
    }
    return out;
  }

  // Separable: first contract over x1 (index i), then over x2 (index j).
  std::vector<double> partial(k_max * nodes, 0.0);  // partial(m, j)
  for (std::size_t m = 0; m < k_max; ++m) {
    for (std::size_t j = 0; j < nodes; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < nodes; ++i) sum += b[m * nodes + i] * nodal[j * nodes + i];
      partial[m * nodes + j] = sum;
    }
  }
  out.reserve(k_max * k_max);
  for (std::size_t m = 1; m <= k_max; ++m) {
    for (std::size_t n = 1; n <= k_max; ++n) {
      double sum = 0.0;
      for (std::size_t j = 0; j < nodes; ++j) sum += partial[(m - 1) * nodes + j] * b[(n - 1) * nodes + j];
      // product of two sqrt(2) factors matches the square's normalization 2 sin sin
      out.push_back(SpectralMode::square(static_cast<int>(m), static_cast<int>(n), sum));
    }
  }
  return out;
}

}  // namespace fracext
