#pragma once

// Special functions needed by the extension solver: Gamma, the modified Bessel
// function of the second kind K_nu for 0 < nu <= 1, and the one-dimensional
// extension profile psi(y) = c_s (sqrt(lambda) y)^s K_s(sqrt(lambda) y).

namespace fracext {

/// Fractional order s together with the constants derived from it.
struct FracParams {
  double s = 0.5;
  double alpha = 0.0;  ///< 1 - 2s, exponent of the weight y^alpha
  double d_s = 1.0;    ///< 2^{1-2s} Gamma(1-s) / Gamma(s)
  double c_s = 1.0;    ///< 2^{1-s} / Gamma(s), normalizes psi(0) = 1

  /// Throws DomainError unless 0 < s < 1.
  static FracParams from_s(double s);

  bool is_half() const { return s == 0.5; }
};

/// Gamma(x) for x > 0.
double gamma_fn(double x);

struct KValue {
  double value = 0.0;
  bool underflow = false;  ///< true when K_nu(z) is below the smallest normal double
};

/// K_nu(z) for 0 < nu <= 1 and z > 0.  Returns 0 with the underflow flag set
/// when the result is not representable.
KValue bessel_k_checked(double nu, double z);

double bessel_k(double nu, double z);

/// log K_nu(z); finite for every z > 0, including arguments where K_nu underflows.
double log_bessel_k(double nu, double z);

/// Reference value of K_nu(z) from the integral representation
///   K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt,
/// evaluated by composite Gauss-Legendre quadrature.  Slow; used as an
/// independent check of bessel_k.
double bessel_k_integral(double nu, double z);

struct PsiPair {
  double psi = 1.0;
  double dpsi = 0.0;
  bool singular = false;  ///< raw derivative undefined at y = 0 for s != 1/2
};

/// psi(y) and psi'(y) for eigenvalue lambda.  At y = 0 with s != 1/2 the
/// derivative is reported as NaN with singular = true; use weighted_flux_limit.
PsiPair psi_pair(const FracParams& params, double lambda, double y);

/// y^alpha psi'(y) for y > 0.  Stays finite as y -> 0.
double weighted_dpsi(const FracParams& params, double lambda, double y);

/// lim_{y -> 0+} y^alpha psi'(y) = -d_s lambda^s.
double weighted_flux_limit(const FracParams& params, double lambda);

}  // namespace fracext
