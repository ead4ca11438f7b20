#include "fracext/oracle_mtt.hpp"

#include <cmath>
#include <string>

#include "fracext/error.hpp"
#include "fracext/quadrature.hpp"

namespace fracext {

MttOracle::MttOracle(const Operator1D& op, std::size_t cells) : cells_(cells) {
  if (cells < 2 || cells > 2000) throw ConfigError("MttOracle: grid size must lie in [2, 2000]");
  const std::size_t n = cells - 1;
  const double h = 1.0 / static_cast<double>(cells);
  const auto rule = gauss_legendre(3);
  k_ = DenseMatrix(n);
  m_ = DenseMatrix(n);
  for (std::size_t c = 0; c < cells; ++c) {
    double kl[2][2] = {}, ml[2][2] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.nodes[q];
      const double x = (static_cast<double>(c) + t) * h;
      const double w = h * rule.weights[q];
      const double a = op.a ? op.a(x) : 1.0;
      const double r = op.c ? op.c(x) : 0.0;
      if (!(a > 0.0)) throw SolverError("MttOracle: a(x) is not positive at x = " + std::to_string(x));
      if (!(r >= 0.0)) throw SolverError("MttOracle: c(x) is negative at x = " + std::to_string(x));
      const double phi[2] = {1.0 - t, t};
      const double dphi[2] = {-1.0 / h, 1.0 / h};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          kl[i][j] += w * (a * dphi[i] * dphi[j] + r * phi[i] * phi[j]);
          ml[i][j] += w * phi[i] * phi[j];
        }
    }
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        const std::size_t gi = c + i, gj = c + j;
        if (gi == 0 || gj == 0 || gi == cells || gj == cells) continue;
        k_(gi - 1, gj - 1) += kl[i][j];
        m_(gi - 1, gj - 1) += ml[i][j];
      }
  }
  eig_ = sym_eig_dense(k_, m_);
  for (double v : eig_.values)
    if (!(v > 0.0)) throw SolverError("MttOracle: non-positive discrete eigenvalue");
}

std::vector<double> MttOracle::load(const std::function<double(double)>& f) const {
  const std::size_t n = cells_ - 1;
  const double h = 1.0 / static_cast<double>(cells_);
  const auto rule = gauss_legendre(4);
  std::vector<double> b(n, 0.0);
  for (std::size_t c = 0; c < cells_; ++c) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.nodes[q];
      const double w = h * rule.weights[q] * f((static_cast<double>(c) + t) * h);
      if (c > 0) b[c - 1] += w * (1.0 - t);
      if (c + 1 < cells_) b[c] += w * t;
    }
  }
  return b;
}

std::vector<double> MttOracle::solve(const std::function<double(double)>& f, double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("MttOracle: s must lie in [0, 1]");
  const std::size_t n = cells_ - 1;
  const auto b = load(f);
  std::vector<double> coeff(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += eig_.vectors(i, k) * b[i];
    coeff[k] = sum * std::pow(eig_.values[k], -s);
  }
  std::vector<double> u(cells_ + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += eig_.vectors(i, k) * coeff[k];
    u[i + 1] = sum;
  }
  return u;
}

std::vector<double> mtt_solve(const Operator1D& op, const std::function<double(double)>& f, double s,
                              std::size_t cells) {
  return MttOracle(op, cells).solve(f, s);
}

}  // namespace fracext
