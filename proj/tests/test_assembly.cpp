#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracext/assembly.hpp"
#include "fracext/error.hpp"
#include "fracext/quadrature.hpp"
#include "oracles.hpp"

using namespace fracext;

namespace {

constexpr double kPi = std::numbers::pi;

// Dense reference matrix on the free dofs of the cylinder for -div(y^alpha grad) with A = I,
// integrated cell by cell.  The y-integral of y^alpha q(y), q a polynomial of degree <= 2,
// is taken as int_0^b - int_0^a with Gauss-Jacobi rules, so it is exact up to rounding.
DenseMatrix reference_matrix(const CylinderMesh& mesh, double alpha) {
  const auto& ys = mesh.ypart().points();
  const bool square = mesh.dimension() == 2;
  const std::size_t nloc = square ? 4 : 2;
  const double hx = mesh.omega().width();
  const auto gl = gauss_legendre(3);
  const auto gj = gauss_jacobi(3, alpha);
  DenseMatrix a(mesh.free_count());

  auto y_integral = [&](double lo, double hi, const std::function<double(double)>& q) {
    auto from_zero = [&](double top) {
      double s = 0.0;
      for (std::size_t i = 0; i < gj.size(); ++i) s += gj.weights[i] * q(top * gj.nodes[i]);
      return std::pow(top, alpha + 1.0) * s;
    };
    return from_zero(hi) - (lo > 0.0 ? from_zero(lo) : 0.0);
  };

  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const double y0 = ys[k], y1 = ys[k + 1], hy = y1 - y0;
    for (std::size_t c = 0; c < mesh.omega().cell_count(); ++c) {
      const auto nodes = mesh.base_cell_nodes(c);
      for (std::size_t p = 0; p < 2 * nloc; ++p) {
        for (std::size_t q = 0; q < 2 * nloc; ++q) {
          const std::size_t gp = mesh.node_index(nodes[p % nloc], k + p / nloc);
          const std::size_t gq = mesh.node_index(nodes[q % nloc], k + q / nloc);
          const std::size_t fp = mesh.free_index()[gp], fq = mesh.free_index()[gq];
          if (fp == CylinderMesh::npos || fq == CylinderMesh::npos) continue;
          // shape function = X_i(x') * Y_a(y)
          auto yshape = [&](std::size_t a, double y) { return a == 0 ? (y1 - y) / hy : (y - y0) / hy; };
          auto dyshape = [&](std::size_t a) { return a == 0 ? -1.0 / hy : 1.0 / hy; };
          double total = 0.0;
          const std::size_t nq = square ? gl.size() * gl.size() : gl.size();
          for (std::size_t iq = 0; iq < nq; ++iq) {
            const double t = gl.nodes[iq % gl.size()];
            const double u = square ? gl.nodes[iq / gl.size()] : 0.0;
            const double w = square ? hx * hx * gl.weights[iq % gl.size()] * gl.weights[iq / gl.size()]
                                    : hx * gl.weights[iq];
            auto xs = [&](std::size_t i) {
              const double ft = (i & 1) ? t : 1 - t;
              const double fu = square ? ((i & 2) ? u : 1 - u) : 1.0;
              return ft * fu;
            };
            auto dxs = [&](std::size_t i) -> std::array<double, 2> {
              const double ft = (i & 1) ? t : 1 - t;
              const double dt = ((i & 1) ? 1.0 : -1.0) / hx;
              if (!square) return {dt, 0.0};
              const double fu = (i & 2) ? u : 1 - u;
              const double du = ((i & 2) ? 1.0 : -1.0) / hx;
              return {dt * fu, ft * du};
            };
            const std::size_t i = p % nloc, j = q % nloc, ap = p / nloc, aq = q / nloc;
            const auto gi = dxs(i), gj2 = dxs(j);
            const double xgrad = gi[0] * gj2[0] + gi[1] * gj2[1];
            const double xmass = xs(i) * xs(j);
            total += w * (xgrad * y_integral(y0, y1, [&](double y) { return yshape(ap, y) * yshape(aq, y); }) +
                          xmass * y_integral(y0, y1, [&](double) { return dyshape(ap) * dyshape(aq); }));
          }
          a(fp, fq) += total;
        }
      }
    }
  }
  return a;
}

}  // namespace

TEST_CASE("weighted_moment examples") {
  CHECK(weighted_moment(0.0, 1.0, 0.0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(weighted_moment(0.0, 1.0, 1.5, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(weighted_moment(1.0, 2.0, -0.5, 0) == doctest::Approx(2.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(weighted_moment(1.0, 1.0, 0.2, 0), DomainError);
  CHECK_THROWS_AS(weighted_moment(-1.0, 1.0, 0.2, 0), DomainError);
}

TEST_CASE("shifted weighted moments match quadrature in every branch") {
  for (double alpha : {-0.8, -0.3, 0.0, 0.4, 0.9}) {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.0, 0.3}, {0.1, 0.3}, {1.0, 1.2}, {5.0, 5.001}, {100.0, 101.0}}) {
      const auto m = shifted_weighted_moments(a, b, alpha);
      const double h = b - a;
      for (int j = 0; j < 3; ++j) {
        double ref;
        if (a == 0.0) {
          ref = std::pow(h, alpha) / (alpha + j + 1.0);
        } else {
          ref = oracle::integrate([&](double t) { return std::pow(a + h * t, alpha) * std::pow(t, j); }, 0.0, 1.0, 16, 20);
        }
        CHECK(m[j] == doctest::Approx(ref).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("rhs for f = 1 is d_s h on interior bottom nodes") {
  const auto params = FracParams::from_s(0.3);
  CylinderMesh mesh({DomainKind::unit_interval, 8}, make_y_partition(4, 2.0, 1.0));
  const auto sys = assemble_extension_system(mesh, params, ScalarField([](std::array<double, 2>) { return 1.0; }));
  for (std::size_t f = 0; f < mesh.free_count(); ++f) {
    const std::size_t g = mesh.free_nodes()[f];
    if (g < mesh.base_node_count())
      CHECK(sys.rhs[f] == doctest::Approx(params.d_s / 8.0).epsilon(1e-14));
    else
      CHECK(sys.rhs[f] == 0.0);
  }
}

TEST_CASE("alpha = 0 reproduces the classical Q1 stiffness matrix") {
  for (auto kind : {DomainKind::unit_interval, DomainKind::unit_square}) {
    CylinderMesh mesh({kind, 4}, make_y_partition(5, 1.5, 2.0));
    const auto sys = assemble_extension_system(mesh, FracParams::from_s(0.5),
                                               ScalarField([](std::array<double, 2>) { return 0.0; }));
    const auto ref = reference_matrix(mesh, 0.0);
    const auto dense = sys.matrix.to_dense();
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) worst = std::max(worst, std::abs(dense[i] - ref.data[i]));
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("weighted assembly matches a Gauss-Jacobi reference") {
  const double alpha = FracParams::from_s(0.3).alpha;
  for (auto kind : {DomainKind::unit_interval, DomainKind::unit_square}) {
    CylinderMesh mesh({kind, 3}, make_y_partition(3, 2.0, default_grading(alpha)));
    const auto sys = assemble_extension_system(mesh, FracParams::from_s(0.3),
                                               ScalarField([](std::array<double, 2>) { return 0.0; }));
    const auto ref = reference_matrix(mesh, alpha);
    const auto dense = sys.matrix.to_dense();
    double scale = 0.0, worst = 0.0;
    for (double v : ref.data) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < ref.data.size(); ++i) worst = std::max(worst, std::abs(dense[i] - ref.data[i]));
    CHECK(worst / scale < 1e-10);
  }
}

TEST_CASE("assembled matrices are symmetric positive definite") {
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto params = FracParams::from_s(s);
    for (auto kind : {DomainKind::unit_interval, DomainKind::unit_square}) {
      for (std::size_t m : {2u, 4u, 8u}) {
        CylinderMesh mesh({kind, m}, make_y_partition(m, 3.0, default_grading(params.alpha)));
        const auto sys = assemble_extension_system(mesh, params, std::vector<SpectralMode>{});
        CHECK(sys.matrix.asymmetry() <= 1e-12 * sys.matrix.max_abs());
        const auto d = sys.matrix.to_dense();
        DenseMatrix a(sys.matrix.size());
        a.data = d;
        CHECK_NOTHROW(cholesky(a));
      }
    }
  }
}

TEST_CASE("rhs is linear in f and matrix is independent of f") {
  const auto params = FracParams::from_s(0.4);
  CylinderMesh mesh({DomainKind::unit_square, 4}, make_y_partition(4, 2.0, 2.0));
  const auto one = assemble_extension_system(mesh, params, std::vector{SpectralMode::square(1, 2, 1.0)});
  const auto three = assemble_extension_system(mesh, params, std::vector{SpectralMode::square(1, 2, 3.0)});
  for (std::size_t i = 0; i < one.rhs.size(); ++i) CHECK(three.rhs[i] == doctest::Approx(3.0 * one.rhs[i]));
  for (std::size_t i = 0; i < one.matrix.nonzeros(); ++i) CHECK(one.matrix.values()[i] == three.matrix.values()[i]);
}

TEST_CASE("assembly does not depend on the thread count") {
  const auto params = FracParams::from_s(0.2);
  CylinderMesh mesh({DomainKind::unit_square, 20}, make_y_partition(20, 2.0, default_grading(params.alpha)));
  OperatorCoeffs coeffs{{[](std::array<double, 2> x) { return 1.0 + x[0] * x[1]; }},
                        [](std::array<double, 2> x) { return x[0]; }};
  const RhsSource f = ScalarField([](std::array<double, 2> x) { return x[0] * (1 - x[1]); });
  const auto a = assemble_extension_system(mesh, params, f, coeffs, {0, 4, 1});
  const auto b = assemble_extension_system(mesh, params, f, coeffs, {0, 4, 4});
  REQUIRE(a.matrix.nonzeros() == b.matrix.nonzeros());
  for (std::size_t i = 0; i < a.matrix.nonzeros(); ++i) CHECK(a.matrix.values()[i] == b.matrix.values()[i]);
}

TEST_CASE("variable coefficients: constant closures agree with the default operator") {
  const auto params = FracParams::from_s(0.6);
  CylinderMesh mesh({DomainKind::unit_interval, 6}, make_y_partition(6, 2.0, 3.0));
  const RhsSource f = std::vector{SpectralMode::interval(1, 1.0)};
  const auto plain = assemble_extension_system(mesh, params, f);
  OperatorCoeffs unit{{[](std::array<double, 2>) { return 1.0; }}, [](std::array<double, 2>) { return 0.0; }};
  const auto closure = assemble_extension_system(mesh, params, f, unit);
  for (std::size_t i = 0; i < plain.matrix.nonzeros(); ++i)
    CHECK(closure.matrix.values()[i] == doctest::Approx(plain.matrix.values()[i]).epsilon(1e-14));
}

TEST_CASE("reaction term adds the weighted mass matrix") {
  const auto params = FracParams::from_s(0.35);
  CylinderMesh mesh({DomainKind::unit_interval, 5}, make_y_partition(4, 2.0, 3.0));
  const RhsSource f = std::vector<SpectralMode>{};
  const auto base = assemble_extension_system(mesh, params, f);
  OperatorCoeffs c2{{}, [](std::array<double, 2>) { return 2.0; }};
  const auto shifted = assemble_extension_system(mesh, params, f, c2);
  // 1-D mass entries h/6 [2 1; 1 2] times the weighted y-mass.
  const double h = mesh.omega().width();
  for (std::size_t r = 0; r < mesh.free_count(); ++r) {
    const std::size_t g = mesh.free_nodes()[r];
    const std::size_t layer = g / mesh.base_node_count();
    const auto& ys = mesh.ypart().points();
    double ymass = weighted_y_element(ys[layer], ys[layer + 1], params.alpha).mass[0][0];
    if (layer > 0) ymass += weighted_y_element(ys[layer - 1], ys[layer], params.alpha).mass[1][1];
    CHECK(shifted.matrix.at(r, r) - base.matrix.at(r, r) == doctest::Approx(2.0 * (2.0 * h / 3.0) * ymass).epsilon(1e-12));
  }
}

TEST_CASE("non-positive diffusion is reported with its cell") {
  CylinderMesh mesh({DomainKind::unit_interval, 4}, make_y_partition(3, 1.0, 1.0));
  OperatorCoeffs bad{{[](std::array<double, 2> x) { return x[0] > 0.5 ? -1.0 : 1.0; }}, {}};
  try {
    assemble_extension_system(mesh, FracParams::from_s(0.5), std::vector<SpectralMode>{}, bad);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("base cell 2") != std::string::npos);
  }
  OperatorCoeffs neg{{}, [](std::array<double, 2>) { return -0.1; }};
  CHECK_THROWS_AS(assemble_extension_system(mesh, FracParams::from_s(0.5), std::vector<SpectralMode>{}, neg),
                  SolverError);
}

TEST_CASE("Galerkin energy stays below the exact truncated energy and converges") {
  // s = 1/2: v = c sin(pi x) sinh(pi (Y - y)) solves the truncated problem with f = sqrt(2) sin(pi x) phi-coefficient 1.
  const double Y = 1.0;
  const double f1 = 1.0;
  const double exact = f1 * f1 * std::tanh(kPi * Y) / kPi;
  double prev_gap = INFINITY;
  for (std::size_t m : {4u, 8u, 16u, 32u}) {
    CylinderMesh mesh({DomainKind::unit_interval, m}, make_y_partition(m, Y, 1.0));
    const auto sys = assemble_extension_system(mesh, FracParams::from_s(0.5), std::vector{SpectralMode::interval(1, f1)},
                                               {}, {0, 8, 1});
    std::vector<double> x;
    REQUIRE(cg_solve(sys.matrix, sys.rhs, x).converged);
    const double energy = dot(x, sys.rhs);
    const double gap = exact - energy;
    CHECK(gap > 0.0);
    if (std::isfinite(prev_gap)) CHECK(gap / prev_gap == doctest::Approx(0.25).epsilon(0.1));
    prev_gap = gap;
  }
}

TEST_CASE("expand_free and bottom_trace") {
  CylinderMesh mesh({DomainKind::unit_interval, 2}, make_y_partition(2, 1.0, 1.0));
  const std::vector<double> free{7.0, 9.0};
  const auto full = expand_free(mesh, free);
  CHECK(full.size() == 9);
  CHECK(full[1] == 7.0);
  CHECK(full[4] == 9.0);
  const auto tr = bottom_trace(mesh, full);
  CHECK(tr == std::vector<double>{0.0, 7.0, 0.0});
  CHECK_THROWS_AS(expand_free(mesh, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("discrete solution satisfies the Galerkin equations") {
  for (auto kind : {DomainKind::unit_interval, DomainKind::unit_square}) {
    const auto params = FracParams::from_s(0.35);
    CylinderMesh mesh({kind, 8}, make_y_partition(8, 2.5, default_grading(params.alpha)));
    const auto sys = assemble_extension_system(mesh, params, std::vector{kind == DomainKind::unit_interval ? SpectralMode::interval(1, 1.0)
                                                                                        : SpectralMode::square(1, 2, 1.0)});
    std::vector<double> x;
    CgOptions opts;
    opts.tol = 1e-13;
    REQUIRE(cg_solve(sys.matrix, sys.rhs, x, opts).converged);
    std::vector<double> ax(x.size());
    sys.matrix.multiply(x, ax);
    // <rhs - A V, e_j> for every test function
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) worst = std::max(worst, std::abs(sys.rhs[j] - ax[j]));
    CHECK(worst <= 1e-11 * std::max(1.0, *std::max_element(sys.rhs.begin(), sys.rhs.end())));
  }
}
