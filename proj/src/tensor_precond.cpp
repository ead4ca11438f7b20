#include "fracext/tensor_precond.hpp"

#include <cmath>

#include "fracext/error.hpp"
#include "parallel.hpp"

namespace fracext {

namespace {

// Tridiagonal weighted y-matrices on the free layers 0..M-1.
struct YTridiag {
  std::vector<double> mass_d, mass_o, stiff_d, stiff_o;
};

YTridiag y_matrices(const YPartition& ypart, double alpha, std::size_t layers) {
  YTridiag t{std::vector<double>(layers, 0.0), std::vector<double>(layers, 0.0),
             std::vector<double>(layers, 0.0), std::vector<double>(layers, 0.0)};
  const auto& ys = ypart.points();
  for (std::size_t k = 0; k < ypart.intervals(); ++k) {
    const auto e = weighted_y_element(ys[k], ys[k + 1], alpha);
    t.mass_d[k] += e.mass[0][0];
    t.stiff_d[k] += e.stiff[0][0];
    if (k + 1 < layers) {
      t.mass_d[k + 1] += e.mass[1][1];
      t.stiff_d[k + 1] += e.stiff[1][1];
      t.mass_o[k] = e.mass[0][1];
      t.stiff_o[k] = e.stiff[0][1];
    }
  }
  return t;
}

}  // namespace

TensorPreconditioner::TensorPreconditioner(const CylinderMesh& mesh, const FracParams& params,
                                           const OperatorCoeffs& coeffs, const AssemblyOptions& options)
    : layers_(mesh.ypart().intervals()),
      line_(mesh.omega().subdivisions - 1),
      dimension_(mesh.dimension()),
      threads_(options.threads) {
  base_ = dimension_ == 1 ? line_ : line_ * line_;
  if (mesh.free_count() != layers_ * base_) throw ConfigError("TensorPreconditioner: unexpected free-dof layout");
  std::vector<double> lambda(base_);

  if (dimension_ == 1) {
    const int order = options.x_order > 0 ? options.x_order : (coeffs.constant() ? 2 : 3);
    DenseMatrix k(base_), m(base_);
    for (std::size_t c = 0; c < mesh.omega().cell_count(); ++c) {
      const auto e = base_element(mesh, c, coeffs, order);
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          const std::size_t gi = c + i, gj = c + j;
          if (gi == 0 || gj == 0 || gi > base_ || gj > base_) continue;
          k(gi - 1, gj - 1) += e.stiff[i * 2 + j] + e.reaction[i * 2 + j];
          m(gi - 1, gj - 1) += e.mass[i * 2 + j];
        }
      }
    }
    auto eig = sym_eig_dense(k, m);
    lambda = eig.values;
    phi_ = std::move(eig.vectors);
    exact_ = true;
  } else {
    // Cell averages of the coefficients.
    double a1 = 0.0, a2 = 0.0, c = 0.0;
    const std::size_t cells = mesh.omega().cell_count();
    const double h = mesh.omega().width();
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const auto o = mesh.base_cell_origin(cell);
      const std::array<double, 2> mid{o[0] + 0.5 * h, o[1] + 0.5 * h};
      const double d1 = coeffs.diffusion.empty() ? 1.0 : coeffs.diffusion[0](mid);
      const double d2 = coeffs.diffusion.size() > 1 ? coeffs.diffusion[1](mid) : d1;
      a1 += d1;
      a2 += d2;
      c += coeffs.reaction ? coeffs.reaction(mid) : 0.0;
    }
    a1 /= static_cast<double>(cells);
    a2 /= static_cast<double>(cells);
    c /= static_cast<double>(cells);
    if (!(a1 > 0.0) || !(a2 > 0.0) || !(c >= 0.0)) throw SolverError("TensorPreconditioner: invalid mean coefficients");
    DenseMatrix k(line_), m(line_);
    for (std::size_t i = 0; i < line_; ++i) {
      k(i, i) = 2.0 / h;
      m(i, i) = 4.0 * h / 6.0;
      if (i + 1 < line_) {
        k(i, i + 1) = k(i + 1, i) = -1.0 / h;
        m(i, i + 1) = m(i + 1, i) = h / 6.0;
      }
    }
    auto eig = sym_eig_dense(k, m);
    for (std::size_t j = 0; j < line_; ++j)
      for (std::size_t i = 0; i < line_; ++i) lambda[j * line_ + i] = a1 * eig.values[i] + a2 * eig.values[j] + c;
    phi_ = std::move(eig.vectors);
    exact_ = coeffs.constant() && (options.x_order == 0 || options.x_order >= 2);
  }

  const auto y = y_matrices(mesh.ypart(), params.alpha, layers_);
  diag_.assign(base_ * layers_, 0.0);
  lower_.assign(base_ * layers_, 0.0);
  for (std::size_t q = 0; q < base_; ++q) {
    double* d = &diag_[q * layers_];
    double* l = &lower_[q * layers_];
    for (std::size_t k = 0; k < layers_; ++k) {
      double dk = lambda[q] * y.mass_d[k] + y.stiff_d[k];
      if (k > 0) {
        const double off = lambda[q] * y.mass_o[k - 1] + y.stiff_o[k - 1];
        l[k] = off / d[k - 1];
        dk -= l[k] * off;
      }
      if (!(dk > 0.0)) throw SolverError("TensorPreconditioner: tridiagonal factor is not positive definite");
      d[k] = dk;
    }
  }
}

void TensorPreconditioner::to_modes(std::span<const double> in, std::span<double> out) const {
  // out_layer = Phi^T in_layer
  detail::parallel_for(layers_, threads_, [&](std::size_t begin, std::size_t end) {
    std::vector<double> tmp(base_);
    for (std::size_t k = begin; k < end; ++k) {
      const double* r = &in[k * base_];
      double* w = &out[k * base_];
      if (dimension_ == 1) {
        for (std::size_t q = 0; q < base_; ++q) {
          double s = 0.0;
          for (std::size_t i = 0; i < base_; ++i) s += phi_(i, q) * r[i];
          w[q] = s;
        }
        continue;
      }
      for (std::size_t j = 0; j < line_; ++j)
        for (std::size_t q = 0; q < line_; ++q) {
          double s = 0.0;
          for (std::size_t i = 0; i < line_; ++i) s += phi_(i, q) * r[j * line_ + i];
          tmp[j * line_ + q] = s;
        }
      for (std::size_t p = 0; p < line_; ++p)
        for (std::size_t q = 0; q < line_; ++q) {
          double s = 0.0;
          for (std::size_t j = 0; j < line_; ++j) s += phi_(j, p) * tmp[j * line_ + q];
          w[p * line_ + q] = s;
        }
    }
  });
}

void TensorPreconditioner::from_modes(std::span<const double> in, std::span<double> out) const {
  // out_layer = Phi in_layer
  detail::parallel_for(layers_, threads_, [&](std::size_t begin, std::size_t end) {
    std::vector<double> tmp(base_);
    for (std::size_t k = begin; k < end; ++k) {
      const double* w = &in[k * base_];
      double* z = &out[k * base_];
      if (dimension_ == 1) {
        for (std::size_t i = 0; i < base_; ++i) {
          double s = 0.0;
          for (std::size_t q = 0; q < base_; ++q) s += phi_(i, q) * w[q];
          z[i] = s;
        }
        continue;
      }
      for (std::size_t j = 0; j < line_; ++j)
        for (std::size_t q = 0; q < line_; ++q) {
          double s = 0.0;
          for (std::size_t p = 0; p < line_; ++p) s += phi_(j, p) * w[p * line_ + q];
          tmp[j * line_ + q] = s;
        }
      for (std::size_t j = 0; j < line_; ++j)
        for (std::size_t i = 0; i < line_; ++i) {
          double s = 0.0;
          for (std::size_t q = 0; q < line_; ++q) s += phi_(i, q) * tmp[j * line_ + q];
          z[j * line_ + i] = s;
        }
    }
  });
}

void TensorPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != layers_ * base_ || z.size() != r.size())
    throw ConfigError("TensorPreconditioner: vector has wrong length");
  std::vector<double> w(r.size());
  to_modes(r, w);
  detail::parallel_for(base_, threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const double* d = &diag_[q * layers_];
      const double* l = &lower_[q * layers_];
      for (std::size_t k = 1; k < layers_; ++k) w[k * base_ + q] -= l[k] * w[(k - 1) * base_ + q];
      for (std::size_t k = 0; k < layers_; ++k) w[k * base_ + q] /= d[k];
      for (std::size_t k = layers_ - 1; k-- > 0;) w[k * base_ + q] -= l[k + 1] * w[(k + 1) * base_ + q];
    }
  });
  from_modes(w, z);
}

}  // namespace fracext
