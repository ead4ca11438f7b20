#include "fracext/error_norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "fracext/error.hpp"
#include "fracext/quadrature.hpp"
#include "parallel.hpp"

namespace fracext {

namespace {

enum class Term {
  full,      // w * |grad e|^2, w includes y^alpha or the rule absorbs it
  x_and_vy,  // w * (|grad_x e|^2 + V_y^2), weight y^alpha absorbed by the rule
  uy_sq,     // w * (y^alpha u_y)^2, weight y^{-alpha} absorbed
  cross,     // -2 w * (y^alpha u_y) V_y
};

struct YPoint {
  double y;
  double t;  // local coordinate (y - a) / h in the cell
  double w;
  Term term;
};

// split_flux: expand the y-derivative term on [0, y_1/2] around y^alpha u_y, which
// stays bounded for extension solutions.  Otherwise the whole integrand is taken as
// smooth times y^alpha.
std::vector<YPoint> y_points(double a, double b, double alpha, const QuadRule& rule, bool split_flux) {
  std::vector<YPoint> pts;
  const double h = b - a;
  auto add_full = [&](double lo, double hi) {
    const auto gl = gauss_legendre(rule.y_order);
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double y = lo + (hi - lo) * gl.nodes[i];
      pts.push_back({y, (y - a) / h, (hi - lo) * gl.weights[i] * std::pow(y, alpha), Term::full});
    }
  };
  if (a > 0.0) {
    add_full(a, b);
    return pts;
  }
  const double c = 0.5 * b;
  const auto plus = gauss_jacobi(rule.jacobi_order, alpha);
  if (!split_flux) {
    for (std::size_t i = 0; i < plus.size(); ++i) {
      const double y = c * plus.nodes[i];
      pts.push_back({y, y / h, std::pow(c, 1.0 + alpha) * plus.weights[i], Term::full});
    }
    add_full(c, b);
    return pts;
  }
  const auto minus = gauss_jacobi(rule.jacobi_order, -alpha);
  const auto plain = gauss_legendre(rule.jacobi_order);
  for (std::size_t i = 0; i < plus.size(); ++i) {
    const double y = c * plus.nodes[i];
    pts.push_back({y, y / h, std::pow(c, 1.0 + alpha) * plus.weights[i], Term::x_and_vy});
  }
  for (std::size_t i = 0; i < minus.size(); ++i) {
    const double y = c * minus.nodes[i];
    pts.push_back({y, y / h, std::pow(c, 1.0 - alpha) * minus.weights[i], Term::uy_sq});
  }
  for (std::size_t i = 0; i < plain.size(); ++i) {
    const double y = c * plain.nodes[i];
    pts.push_back({y, y / h, c * plain.weights[i], Term::cross});
  }
  add_full(c, b);
  return pts;
}

struct SpectralEval {
  static constexpr bool split_flux = true;
  const SpectralSolution& sol;

  struct Cache {
    std::vector<double> psi, dpsi, wdpsi;
  };

  Cache prepare(double y) const {
    Cache c;
    for (const auto& mode : sol.modes) {
      const auto pp = psi_pair(sol.params, mode.lambda, y);
      c.psi.push_back(pp.psi);
      c.dpsi.push_back(pp.dpsi);
      c.wdpsi.push_back(weighted_dpsi(sol.params, mode.lambda, y));
    }
    return c;
  }

  // Returns (u_x1, u_x2, u_y, y^alpha u_y).
  std::array<double, 4> eval(std::array<double, 2> x, const Cache& c) const {
    std::array<double, 4> g{};
    for (std::size_t k = 0; k < sol.modes.size(); ++k) {
      const auto& mode = sol.modes[k];
      const double phi = mode.eigenfunction(x);
      const auto dphi = mode.eigenfunction_gradient(x);
      g[0] += mode.coeff * dphi[0] * c.psi[k];
      g[1] += mode.coeff * dphi[1] * c.psi[k];
      g[2] += mode.coeff * phi * c.dpsi[k];
      g[3] += mode.coeff * phi * c.wdpsi[k];
    }
    return g;
  }
};

struct FieldEval {
  static constexpr bool split_flux = false;
  const GradientField& field;
  double alpha;

  struct Cache {
    double y;
    double ya;
  };

  Cache prepare(double y) const { return {y, std::pow(y, alpha)}; }

  std::array<double, 4> eval(std::array<double, 2> x, const Cache& c) const {
    const auto g = field(x, c.y);
    return {g[0], g[1], g[2], c.ya * g[2]};
  }
};

template <class Eval>
double h1_error_impl(const CylinderMesh& mesh, std::span<const double> nodal, const Eval& exact, double alpha,
                     const QuadRule& rule, int threads) {
  if (nodal.size() != mesh.node_count()) throw ConfigError("weighted_h1_error: nodal vector has wrong length");
  const auto& ys = mesh.ypart().points();
  const std::size_t intervals = mesh.ypart().intervals();
  const std::size_t base_cells = mesh.omega().cell_count();
  const bool square = mesh.dimension() == 2;
  const std::size_t nloc = square ? 4 : 2;
  const double hx = mesh.omega().width();

  // Reference shape data at the x quadrature points.
  const auto gx = gauss_legendre(rule.x_order);
  struct XPoint {
    std::array<double, 2> ref;
    double w;
    std::array<double, 4> phi;
    std::array<std::array<double, 2>, 4> grad;
  };
  std::vector<XPoint> xpts;
  if (!square) {
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double t = gx.nodes[q];
      xpts.push_back({{t, 0.0}, hx * gx.weights[q], {1 - t, t, 0, 0}, {{{-1 / hx, 0}, {1 / hx, 0}, {0, 0}, {0, 0}}}});
    }
  } else {
    for (std::size_t qu = 0; qu < gx.size(); ++qu) {
      for (std::size_t qt = 0; qt < gx.size(); ++qt) {
        const double t = gx.nodes[qt];
        const double u = gx.nodes[qu];
        xpts.push_back({{t, u},
                        hx * hx * gx.weights[qt] * gx.weights[qu],
                        {(1 - t) * (1 - u), t * (1 - u), (1 - t) * u, t * u},
                        {{{-(1 - u) / hx, -(1 - t) / hx},
                          {(1 - u) / hx, -t / hx},
                          {-u / hx, (1 - t) / hx},
                          {u / hx, t / hx}}}});
      }
    }
  }

  std::vector<double> partial(intervals, 0.0);
  detail::parallel_for(intervals, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double a = ys[k];
      const double b = ys[k + 1];
      const double hy = b - a;
      const auto pts = y_points(a, b, alpha, rule, Eval::split_flux);
      std::vector<typename Eval::Cache> caches;
      caches.reserve(pts.size());
      for (const auto& p : pts) caches.push_back(exact.prepare(p.y));

      double sum = 0.0;
      for (std::size_t c = 0; c < base_cells; ++c) {
        const auto nodes = mesh.base_cell_nodes(c);
        const auto origin = mesh.base_cell_origin(c);
        std::array<double, 4> v0{}, v1{};
        for (std::size_t i = 0; i < nloc; ++i) {
          v0[i] = nodal[mesh.node_index(nodes[i], k)];
          v1[i] = nodal[mesh.node_index(nodes[i], k + 1)];
        }
        for (const auto& xp : xpts) {
          const std::array<double, 2> x{origin[0] + hx * xp.ref[0], origin[1] + hx * xp.ref[1]};
          double val0 = 0, val1 = 0;
          std::array<double, 2> g0{}, g1{};
          for (std::size_t i = 0; i < nloc; ++i) {
            val0 += v0[i] * xp.phi[i];
            val1 += v1[i] * xp.phi[i];
            for (int d = 0; d < 2; ++d) {
              g0[d] += v0[i] * xp.grad[i][d];
              g1[d] += v1[i] * xp.grad[i][d];
            }
          }
          const double vy = (val1 - val0) / hy;
          for (std::size_t p = 0; p < pts.size(); ++p) {
            const auto& yp = pts[p];
            const auto u = exact.eval(x, caches[p]);
            const double ex0 = u[0] - (g0[0] * (1 - yp.t) + g1[0] * yp.t);
            const double ex1 = u[1] - (g0[1] * (1 - yp.t) + g1[1] * yp.t);
            double contrib = 0.0;
            switch (yp.term) {
              case Term::full: {
                const double ey = u[2] - vy;
                contrib = ex0 * ex0 + ex1 * ex1 + ey * ey;
                break;
              }
              case Term::x_and_vy:
                contrib = ex0 * ex0 + ex1 * ex1 + vy * vy;
                break;
              case Term::uy_sq:
                contrib = u[3] * u[3];
                break;
              case Term::cross:
                contrib = -2.0 * u[3] * vy;
                break;
            }
            sum += xp.w * yp.w * contrib;
          }
        }
      }
      partial[k] = sum;
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return std::sqrt(std::max(total, 0.0));
}

}  // namespace

double weighted_h1_error(const CylinderMesh& mesh, std::span<const double> nodal, const SpectralSolution& exact,
                         const QuadRule& rule, int threads) {
  return h1_error_impl(mesh, nodal, SpectralEval{exact}, exact.params.alpha, rule, threads);
}

double weighted_h1_error(const CylinderMesh& mesh, std::span<const double> nodal, const GradientField& exact,
                         double alpha, const QuadRule& rule, int threads) {
  return h1_error_impl(mesh, nodal, FieldEval{exact, alpha}, alpha, rule, threads);
}

double trace_hs_error(const OmegaSpec& omega, std::span<const double> trace, std::span<const SpectralMode> u_modes,
                      double s, int cutoff) {
  if (cutoff <= 0) cutoff = 4 * static_cast<int>(omega.subdivisions);
  auto diff = project_trace(omega, trace, cutoff);
  std::map<std::pair<int, int>, std::size_t> where;
  for (std::size_t i = 0; i < diff.size(); ++i) where[{diff[i].m, diff[i].n}] = i;
  for (const auto& mode : u_modes) {
    if (auto it = where.find({mode.m, mode.n}); it != where.end()) {
      diff[it->second].coeff -= mode.coeff;
    } else {
      auto outside = mode;
      outside.coeff = -mode.coeff;
      diff.push_back(outside);
    }
  }
  return hs_norm(diff, s);
}

double l2_distance_p1(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ConfigError("l2_distance_p1: need at least two nodes");
  const std::size_t na = a.size() - 1;
  const std::size_t nb = b.size() - 1;
  std::vector<double> breaks;
  for (std::size_t i = 0; i <= na; ++i) breaks.push_back(static_cast<double>(i) / na);
  for (std::size_t i = 0; i <= nb; ++i) breaks.push_back(static_cast<double>(i) / nb);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-14; }),
               breaks.end());
  auto eval = [](std::span<const double> v, double x) {
    const std::size_t n = v.size() - 1;
    const double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(n);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 1);
    const double t = pos - static_cast<double>(i);
    return v[i] * (1 - t) + v[i + 1] * t;
  };
  // The difference is linear between merged breakpoints; 2-point Gauss is exact for its square.
  const auto gl = gauss_legendre(2);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k];
    const double hi = breaks[k + 1];
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double x = lo + (hi - lo) * gl.nodes[q];
      const double d = eval(a, x) - eval(b, x);
      sum += (hi - lo) * gl.weights[q] * d * d;
    }
  }
  return std::sqrt(sum);
}

}  // namespace fracext
