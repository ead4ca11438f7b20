#include "fracext/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracext/error.hpp"
#include "fracext/quadrature.hpp"
#include "parallel.hpp"

namespace fracext {

double weighted_moment(double a, double b, double alpha, int j) {
  if (!(a >= 0.0)) throw DomainError("weighted_moment: lower limit must be nonnegative");
  if (!(b > a)) throw DomainError("weighted_moment: need b > a");
  const double p = alpha + j + 1.0;
  if (!(p > 0.0)) throw DomainError("weighted_moment: alpha + j + 1 must be positive");
  if (a == 0.0) return std::pow(b, p) / p;
  return std::pow(a, p) * std::expm1(p * std::log1p((b - a) / a)) / p;
}

std::array<double, 3> shifted_weighted_moments(double a, double b, double alpha) {
  const double h = b - a;
  if (!(h > 0.0) || !(a >= 0.0)) throw DomainError("shifted_weighted_moments: need 0 <= a < b");
  if (a == 0.0) {
    const double ha = std::pow(h, alpha);
    return {ha / (alpha + 1.0), ha / (alpha + 2.0), ha / (alpha + 3.0)};
  }
  if (a < 4.0 * h) {
    // Raw moments lose at most a factor (b/h)^2 <= 25 to cancellation here.
    const double m0 = weighted_moment(a, b, alpha, 0);
    const double m1 = weighted_moment(a, b, alpha, 1);
    const double m2 = weighted_moment(a, b, alpha, 2);
    return {m0 / h, (m1 - a * m0) / (h * h), (m2 - 2.0 * a * m1 + a * a * m0) / (h * h * h)};
  }
  // (a + h t)^alpha = a^alpha sum_m binom(alpha, m) r^m t^m with r = h/a <= 1/4.
  const double r = h / a;
  std::array<double, 3> sums{0.0, 0.0, 0.0};
  double binom = 1.0;
  double rm = 1.0;
  for (int m = 0; m < 400; ++m) {
    const double term = binom * rm;
    for (int j = 0; j < 3; ++j) sums[j] += term / (m + j + 1.0);
    if (std::abs(term) < 1e-18 * std::abs(sums[0])) break;
    binom *= (alpha - m) / (m + 1.0);
    rm *= r;
    if (binom == 0.0) break;
  }
  const double aa = std::pow(a, alpha);
  return {aa * sums[0], aa * sums[1], aa * sums[2]};
}

YElement weighted_y_element(double a, double b, double alpha) {
  const double h = b - a;
  const auto m = shifted_weighted_moments(a, b, alpha);
  YElement e;
  // chi_0 = 1 - t, chi_1 = t on y = a + h t.
  e.mass[0][0] = h * (m[0] - 2.0 * m[1] + m[2]);
  e.mass[0][1] = e.mass[1][0] = h * (m[1] - m[2]);
  e.mass[1][1] = h * m[2];
  const double k = m[0] / h;
  e.stiff[0][0] = e.stiff[1][1] = k;
  e.stiff[0][1] = e.stiff[1][0] = -k;
  return e;
}

namespace {

int default_order(const OperatorCoeffs& coeffs, int requested) {
  if (requested > 0) return requested;
  return coeffs.constant() ? 2 : 3;
}

[[noreturn]] void bad_coefficient(const char* what, std::size_t cell, std::array<double, 2> x) {
  throw SolverError(std::string("assembly: ") + what + " in base cell " + std::to_string(cell) + " at x = (" +
                    std::to_string(x[0]) + ", " + std::to_string(x[1]) + ")");
}

}  // namespace

XElement base_element(const CylinderMesh& mesh, std::size_t cell, const OperatorCoeffs& coeffs, int order) {
  const auto rule = gauss_legendre(order);
  const double h = mesh.omega().width();
  const auto origin = mesh.base_cell_origin(cell);
  const bool square = mesh.dimension() == 2;
  const std::size_t nloc = square ? 4 : 2;
  XElement e{std::vector<double>(nloc * nloc, 0.0), std::vector<double>(nloc * nloc, 0.0),
             std::vector<double>(nloc * nloc, 0.0)};

  auto accumulate = [&](std::array<double, 2> x, double w, const double* phi, const double (*grad)[2]) {
    std::array<double, 2> a{1.0, 1.0};
    for (std::size_t d = 0; d < coeffs.diffusion.size() && d < 2; ++d) {
      a[d] = coeffs.diffusion[d](x);
      if (!(a[d] > 0.0)) bad_coefficient("diffusion coefficient is not positive", cell, x);
    }
    if (coeffs.diffusion.size() == 1) a[1] = a[0];
    double c = 0.0;
    if (coeffs.reaction) {
      c = coeffs.reaction(x);
      if (!(c >= 0.0)) bad_coefficient("reaction coefficient is negative", cell, x);
    }
    for (std::size_t i = 0; i < nloc; ++i) {
      for (std::size_t j = 0; j < nloc; ++j) {
        e.stiff[i * nloc + j] += w * (a[0] * grad[i][0] * grad[j][0] + a[1] * grad[i][1] * grad[j][1]);
        e.mass[i * nloc + j] += w * phi[i] * phi[j];
        e.reaction[i * nloc + j] += w * c * phi[i] * phi[j];
      }
    }
  };

  if (!square) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.nodes[q];
      const double phi[2] = {1.0 - t, t};
      const double grad[2][2] = {{-1.0 / h, 0.0}, {1.0 / h, 0.0}};
      accumulate({origin[0] + h * t, 0.0}, h * rule.weights[q], phi, grad);
    }
    return e;
  }
  for (std::size_t qu = 0; qu < rule.size(); ++qu) {
    for (std::size_t qt = 0; qt < rule.size(); ++qt) {
      const double t = rule.nodes[qt];
      const double u = rule.nodes[qu];
      const double phi[4] = {(1 - t) * (1 - u), t * (1 - u), (1 - t) * u, t * u};
      const double grad[4][2] = {{-(1 - u) / h, -(1 - t) / h},
                                 {(1 - u) / h, -t / h},
                                 {-u / h, (1 - t) / h},
                                 {u / h, t / h}};
      accumulate({origin[0] + h * t, origin[1] + h * u}, h * h * rule.weights[qt] * rule.weights[qu], phi, grad);
    }
  }
  return e;
}

namespace {

// Free-dof sparsity pattern: node (b, k) couples to base neighbors of b on layers k-1..k+1.
CsrMatrix build_pattern(const CylinderMesh& mesh) {
  const std::size_t layers = mesh.ypart().intervals() + 1;
  const std::size_t n = mesh.omega().nodes_per_direction();
  const bool square = mesh.dimension() == 2;
  const auto& free_index = mesh.free_index();
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> cols;
  offsets.reserve(mesh.free_count() + 1);
  cols.reserve(mesh.free_count() * (square ? 27 : 9));
  for (std::size_t g : mesh.free_nodes()) {
    const std::size_t layer = g / mesh.base_node_count();
    const std::size_t base = g % mesh.base_node_count();
    const std::size_t bi = square ? base % n : base;
    const std::size_t bj = square ? base / n : 0;
    for (std::size_t kl = (layer == 0 ? 0 : layer - 1); kl <= std::min(layer + 1, layers - 1); ++kl) {
      const std::size_t j_lo = (square && bj > 0) ? bj - 1 : bj;
      const std::size_t j_hi = square ? std::min(bj + 1, n - 1) : bj;
      for (std::size_t jj = j_lo; jj <= j_hi; ++jj) {
        for (std::size_t ii = (bi == 0 ? 0 : bi - 1); ii <= std::min(bi + 1, n - 1); ++ii) {
          const std::size_t nb = square ? jj * n + ii : ii;
          const std::size_t f = free_index[mesh.node_index(nb, kl)];
          if (f != CylinderMesh::npos) cols.push_back(f);
        }
      }
    }
    offsets.push_back(cols.size());
  }
  std::vector<double> vals(cols.size(), 0.0);
  return CsrMatrix(mesh.free_count(), std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace

SparseSystem assemble_extension_system(const CylinderMesh& mesh, const FracParams& params, const RhsSource& f,
                                       const OperatorCoeffs& coeffs, const AssemblyOptions& options) {
  const std::size_t base_cells = mesh.omega().cell_count();
  const std::size_t intervals = mesh.ypart().intervals();
  const bool square = mesh.dimension() == 2;
  const std::size_t nloc = square ? 4 : 2;
  const int order = default_order(coeffs, options.x_order);

  std::vector<XElement> xel(base_cells);
  detail::parallel_for(base_cells, options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) xel[c] = base_element(mesh, c, coeffs, order);
  });
  std::vector<YElement> yel(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    yel[k] = weighted_y_element(mesh.ypart().points()[k], mesh.ypart().points()[k + 1], params.alpha);
  }

  CsrMatrix pattern = build_pattern(mesh);
  const auto offsets = pattern.row_offsets();
  const auto columns = pattern.columns();
  std::vector<double> values(pattern.nonzeros(), 0.0);
  const auto& free_index = mesh.free_index();

  std::vector<std::size_t> local(2 * nloc);
  for (std::size_t k = 0; k < intervals; ++k) {
    const auto& ye = yel[k];
    for (std::size_t c = 0; c < base_cells; ++c) {
      const auto nodes = mesh.base_cell_nodes(c);
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t i = 0; i < nloc; ++i) local[a * nloc + i] = free_index[mesh.node_index(nodes[i], k + a)];
      const auto& xe = xel[c];
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < nloc; ++i) {
          const std::size_t row = local[a * nloc + i];
          if (row == CylinderMesh::npos) continue;
          const auto first = columns.begin() + static_cast<std::ptrdiff_t>(offsets[row]);
          const auto last = columns.begin() + static_cast<std::ptrdiff_t>(offsets[row + 1]);
          for (std::size_t b = 0; b < 2; ++b) {
            for (std::size_t j = 0; j < nloc; ++j) {
              const std::size_t col = local[b * nloc + j];
              if (col == CylinderMesh::npos) continue;
              const std::size_t ij = i * nloc + j;
              const double v = (xe.stiff[ij] + xe.reaction[ij]) * ye.mass[a][b] + xe.mass[ij] * ye.stiff[a][b];
              const auto pos = std::lower_bound(first, last, col);
              values[static_cast<std::size_t>(pos - columns.begin())] += v;
            }
          }
        }
      }
    }
  }

  SparseSystem sys;
  sys.matrix = CsrMatrix(mesh.free_count(), std::vector<std::size_t>(offsets.begin(), offsets.end()),
                         std::vector<std::size_t>(columns.begin(), columns.end()), std::move(values));
  sys.rhs.assign(mesh.free_count(), 0.0);

  // rhs_i = d_s int_Omega f phi_i on the bottom face.
  const auto rule = gauss_legendre(options.rhs_order);
  const double h = mesh.omega().width();
  auto eval_f = [&f](std::array<double, 2> x) {
    if (const auto* field = std::get_if<ScalarField>(&f)) return (*field)(x);
    return evaluate_modes(std::get<std::vector<SpectralMode>>(f), x);
  };
  for (std::size_t c = 0; c < base_cells; ++c) {
    const auto nodes = mesh.base_cell_nodes(c);
    const auto origin = mesh.base_cell_origin(c);
    std::array<double, 4> load{};
    if (!square) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.nodes[q];
        const double w = h * rule.weights[q] * eval_f({origin[0] + h * t, 0.0});
        load[0] += w * (1 - t);
        load[1] += w * t;
      }
    } else {
      for (std::size_t qu = 0; qu < rule.size(); ++qu) {
        for (std::size_t qt = 0; qt < rule.size(); ++qt) {
          const double t = rule.nodes[qt];
          const double u = rule.nodes[qu];
          const double w =
              h * h * rule.weights[qt] * rule.weights[qu] * eval_f({origin[0] + h * t, origin[1] + h * u});
          load[0] += w * (1 - t) * (1 - u);
          load[1] += w * t * (1 - u);
          load[2] += w * (1 - t) * u;
          load[3] += w * t * u;
        }
      }
    }
    for (std::size_t i = 0; i < nloc; ++i) {
      const std::size_t row = free_index[mesh.node_index(nodes[i], 0)];
      if (row != CylinderMesh::npos) sys.rhs[row] += params.d_s * load[i];
    }
  }
  return sys;
}

std::vector<double> expand_free(const CylinderMesh& mesh, std::span<const double> free_values) {
  if (free_values.size() != mesh.free_count()) throw ConfigError("expand_free: wrong vector length");
  std::vector<double> full(mesh.node_count(), 0.0);
  for (std::size_t f = 0; f < free_values.size(); ++f) full[mesh.free_nodes()[f]] = free_values[f];
  return full;
}

std::vector<double> bottom_trace(const CylinderMesh& mesh, std::span<const double> nodal) {
  if (nodal.size() != mesh.node_count()) throw ConfigError("bottom_trace: wrong vector length");
  return {nodal.begin(), nodal.begin() + static_cast<std::ptrdiff_t>(mesh.base_node_count())};
}

}  // namespace fracext
