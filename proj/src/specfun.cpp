#include "fracext/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracext/error.hpp"
#include "fracext/quadrature.hpp"

namespace fracext {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Taylor coefficients of 1/Gamma(1+x) about x = 0.
constexpr std::array<double, 31> kRecipGamma = {
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16,
    1.18669225475160033258e-18,
    1.412380655318031781556e-18,
    -2.298745684435370206592e-19,
    1.714406321927337433384e-20,
    1.337351730493693114865e-22,
};

// Temme's auxiliary functions for |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu),  gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2,
// summed from the even/odd parts of the 1/Gamma(1+x) series so gam1 has no cancellation at mu -> 0.
struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

TemmeGammas temme_gammas(double mu) {
  double even = 0.0;
  double odd = 0.0;
  const double mu2 = mu * mu;
  double pw = 1.0;
  for (std::size_t i = 0; i < kRecipGamma.size(); i += 2) {
    even += kRecipGamma[i] * pw;
    if (i + 1 < kRecipGamma.size()) odd += kRecipGamma[i + 1] * pw;
    pw *= mu2;
  }
  // 1/Gamma(1+mu) = even + mu * odd
  return {-odd, even, even + mu * odd, even - mu * odd};
}

struct KPair {
  double k_mu;   // K_mu(x) (scaled by e^x when from the continued fraction)
  double k_mu1;  // K_{mu+1}(x)
  bool scaled;
};

// Temme's series, x <= 2.
KPair temme_series(double mu, double x) {
  const auto g = temme_gammas(mu);
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
  const double d = -std::log(x2);
  const double e = mu * d;
  const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  const double ee = std::exp(e);
  double p = 0.5 * ee / g.gampl;
  double q = 0.5 / (ee * g.gammi);
  double c = 1.0;
  const double dd = x2 * x2;
  double sum1 = p;
  for (int i = 1; i < 500; ++i) {
    const double fi = i;
    ff = (fi * ff + p + q) / (fi * fi - mu * mu);
    c *= dd / fi;
    p /= (fi - mu);
    q /= (fi + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - fi * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return {sum, sum1 * 2.0 / x, false};
}

// Steed's continued fraction (Thompson-Barnett form), x > 2.  Returns e^x K.
KPair steed_cf2(double mu, double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h *= a1;
  const double kmu = std::sqrt(kPi / (2.0 * x)) / s;
  return {kmu, kmu * (mu + x + 0.5 - h) / x, true};
}

// K_nu for 0 < nu <= 1 through the pair (K_mu, K_{mu+1}) with |mu| <= 1/2.
KPair bessel_k_pair(double nu, double z) {
  if (!(nu > 0.0 && nu <= 1.0) || !std::isfinite(nu)) {
    throw DomainError("bessel_k: order must lie in (0, 1]");
  }
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_k: argument must be positive and finite");
  const double mu = nu <= 0.5 ? nu : nu - 1.0;
  return z <= 2.0 ? temme_series(mu, z) : steed_cf2(mu, z);
}

double select(const KPair& pair, double nu) { return nu <= 0.5 ? pair.k_mu : pair.k_mu1; }

}  // namespace

FracParams FracParams::from_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order s must lie in (0, 1)");
  FracParams p;
  p.s = s;
  p.alpha = 1.0 - 2.0 * s;
  p.d_s = std::pow(2.0, 1.0 - 2.0 * s) * gamma_fn(1.0 - s) / gamma_fn(s);
  p.c_s = std::pow(2.0, 1.0 - s) / gamma_fn(s);
  return p;
}

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma_fn: argument must be positive and finite");
  return std::tgamma(x);
}

double log_bessel_k(double nu, double z) {
  const KPair pair = bessel_k_pair(nu, z);
  const double k = select(pair, nu);
  return pair.scaled ? std::log(k) - z : std::log(k);
}

KValue bessel_k_checked(double nu, double z) {
  const double log_k = log_bessel_k(nu, z);
  if (log_k < std::log(std::numeric_limits<double>::min())) return {0.0, true};
  return {std::exp(log_k), false};
}

double bessel_k(double nu, double z) {
  const KPair pair = bessel_k_pair(nu, z);
  const double k = select(pair, nu);
  if (!pair.scaled) return k;
  if (z > 600.0) return bessel_k_checked(nu, z).value;
  return k * std::exp(-z);
}

double bessel_k_integral(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("bessel_k_integral: argument must be positive");
  // Truncate where z (cosh t - 1) - nu t exceeds 60, i.e. the integrand is
  // e^{-60} below its value at t = 0 relative to the e^{-z} scale.
  double upper = 1.0;
  while (z * (std::cosh(upper) - 1.0) - nu * upper < 60.0) upper += 0.5;
  const auto rule = gauss_legendre(20);
  const double panel = 0.125;
  const int panels = static_cast<int>(std::ceil(upper / panel));
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * panel;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double t = a + panel * rule.nodes[i];
      // Factor e^{-z} out so large z keeps full relative precision.
      sum += panel * rule.weights[i] * std::exp(-z * (std::cosh(t) - 1.0)) * std::cosh(nu * t);
    }
  }
  return sum * std::exp(-z);
}

PsiPair psi_pair(const FracParams& params, double lambda, double y) {
  if (!(lambda > 0.0)) throw DomainError("psi_pair: eigenvalue must be positive");
  if (!(y >= 0.0)) throw DomainError("psi_pair: y must be nonnegative");
  const double root = std::sqrt(lambda);
  if (params.is_half()) {
    const double e = std::exp(-root * y);
    return {e, -root * e, false};
  }
  if (y == 0.0) return {1.0, std::numeric_limits<double>::quiet_NaN(), true};
  const double z = root * y;
  const double log_zs = params.s * std::log(z) + std::log(params.c_s);
  const double psi = std::exp(log_zs + log_bessel_k(params.s, z));
  const double dpsi = -root * std::exp(log_zs + log_bessel_k(1.0 - params.s, z));
  return {psi, dpsi, false};
}

double weighted_dpsi(const FracParams& params, double lambda, double y) {
  if (!(lambda > 0.0)) throw DomainError("weighted_dpsi: eigenvalue must be positive");
  if (!(y > 0.0)) throw DomainError("weighted_dpsi: y must be positive");
  const double root = std::sqrt(lambda);
  if (params.is_half()) return -root * std::exp(-root * y);
  const double z = root * y;
  return -root * std::exp(params.alpha * std::log(y) + params.s * std::log(z) + std::log(params.c_s) +
                          log_bessel_k(1.0 - params.s, z));
}

double weighted_flux_limit(const FracParams& params, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("weighted_flux_limit: eigenvalue must be positive");
  return -params.d_s * std::pow(lambda, params.s);
}

}  // namespace fracext
