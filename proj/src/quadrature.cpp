#include "fracext/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "fracext/error.hpp"
#include "fracext/linalg.hpp"

namespace fracext {

namespace {

// Golub-Welsch for the Jacobi weight (1+x)^beta on [-1, 1], mapped to t^beta on [0, 1].
GaussRule build_jacobi(int n, double beta) {
  const double a = 0.0;
  const double b = beta;
  DenseMatrix jac(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double kk = k;
    double diag;
    if (k == 0) {
      diag = (b - a) / (a + b + 2.0);
    } else {
      diag = (b * b - a * a) / ((2.0 * kk + a + b) * (2.0 * kk + a + b + 2.0));
    }
    jac(k, k) = diag;
    if (k + 1 < n) {
      const double m = kk + 1.0;
      const double s = 2.0 * m + a + b;
      const double beta_m = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0));
      jac(k, k + 1) = jac(k + 1, k) = std::sqrt(beta_m);
    }
  }
  const auto eig = sym_eig(jac);
  const double mu0 = 1.0 / (b + 1.0);  // int_0^1 t^beta dt
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
    rule.nodes[k] = 0.5 * (1.0 + eig.values[k]);
    const double v0 = eig.vectors(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

std::mutex cache_mutex;
std::map<std::pair<int, double>, GaussRule>& cache() {
  static std::map<std::pair<int, double>, GaussRule> rules;
  return rules;
}

}  // namespace

GaussRule gauss_jacobi(int n, double beta) {
  if (n < 1) throw ConfigError("gauss_jacobi: need at least one point");
  if (!(beta > -1.0)) throw DomainError("gauss_jacobi: weight exponent must exceed -1");
  std::lock_guard lock(cache_mutex);
  auto& rules = cache();
  const auto key = std::make_pair(n, beta);
  if (auto it = rules.find(key); it != rules.end()) return it->second;
  return rules.emplace(key, build_jacobi(n, beta)).first->second;
}

GaussRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0); }

}  // namespace fracext
