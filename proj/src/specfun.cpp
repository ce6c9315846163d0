#include "cftdist/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>

namespace cftdist {

namespace {
constexpr double lanczos_g = 7.0;
constexpr double lanczos_p[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                 771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                 -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace

cplx lgamma_complex(cplx z) {
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
    return std::log(pi) - std::log(std::sin(pi * z)) - lgamma_complex(1.0 - z);
  }
  z -= 1.0;
  cplx x = lanczos_p[0];
  for (int k = 1; k < 9; ++k) x += lanczos_p[k] / (z + static_cast<double>(k));
  const cplx t = z + lanczos_g + 0.5;
  return 0.5 * std::log(two_pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double kappa_gamma_form(int n) {
  if (n < 1) throw Error(ErrorKind::Parameter, "kappa needs n >= 1");
  return std::tgamma(n - 0.5) / (std::tgamma(static_cast<double>(n)) * std::sqrt(pi));
}

double kappa_binomial_form(int n) {
  if (n < 1) throw Error(ErrorKind::Parameter, "kappa needs n >= 1");
  if (n == 1) return 1.0;
  // exact integer binomial to keep the comparison free of lgamma rounding
  double c = 1.0;
  for (int j = 1; j <= n - 1; ++j) c = c * (2 * n - 3 - (n - 1) + j) / j;
  return 8.0 / std::pow(4.0, n) * c;
}

double K_n_closed(int n) {
  if (n < 1) throw Error(ErrorKind::Parameter, "K_n needs n >= 1");
  return 2.0 * pi * pi * n * n / std::pow(16.0, n) * binomial(2 * n - 1, n) * binomial(2 * n + 1, n);
}

double K_gamma_closed(double gamma) {
  if (!(gamma > 1.0)) throw Error(ErrorKind::Divergence, "K_gamma diverges for gamma <= 1");
  return std::tgamma(gamma + 1.0) * std::tgamma(gamma + 3.0) / 2.0;
}

double ghat_lorentzian(int n_plus_one, double omega) {
  const int n = n_plus_one - 1;
  const double w = std::abs(omega);
  double s = 0.0, term = 1.0;
  for (int r = 0; r <= n; ++r) {
    if (r > 0) term *= 2.0 * w / r;
    s += binomial(2 * n - r, n) * term;
  }
  return pi * std::exp(-w) / std::pow(4.0, n) * s;
}

double K_n_quadrature(int n) {
  boost::math::quadrature::exp_sinh<double> q;
  auto integrand = [n](double w) {
    if (w > 700.0) return 0.0;
    const double g = ghat_lorentzian(n, w);
    return w * w * w * g * g;
  };
  return q.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

double K_gamma_quadrature(double gamma) {
  if (!(gamma > 1.0)) throw Error(ErrorKind::Divergence, "K_gamma diverges for gamma <= 1");
  // ghat(omega) on the ray x = e^{i pi/4} s, where both e^{i omega x} and
  // e^{-1/x} decay.
  const cplx ray = std::polar(1.0, pi / 4.0);
  auto ghat = [gamma, ray](double omega) {
    boost::math::quadrature::exp_sinh<double> inner;
    auto part = [&](bool imag) {
      return inner.integrate(
          [&](double s) {
            const cplx x = ray * s;
            const cplx v = std::exp(-gamma * std::log(x) - 1.0 / x + I * omega * x) * ray;
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return 0.0;
            return imag ? v.imag() : v.real();
          },
          0.0, std::numeric_limits<double>::infinity(), 1e-12);
    };
    return cplx(part(false), part(true));
  };
  boost::math::quadrature::exp_sinh<double> outer;
  return outer.integrate(
      [&](double w) {
        if (w == 0.0 || w > 1e5) return 0.0;
        return w * w * w * std::norm(ghat(w));
      },
      0.0, std::numeric_limits<double>::infinity(), 1e-9);
}

}  // namespace cftdist
