#pragma once

#include "cftdist/common.hpp"

namespace cftdist {

// Lanczos (g = 7, 9 terms) log-Gamma on the complex plane with reflection
// for Re z < 1/2. Relative error of exp(lgamma) is below 1e-13 on
// |Im z| <= 200, Re z in (0, 50].
cplx lgamma_complex(cplx z);

double binomial(int n, int k);

// kappa_n = Gamma(n - 1/2) / (Gamma(n) sqrt(pi)) and its binomial form.
double kappa_gamma_form(int n);
double kappa_binomial_form(int n);

// K_n = int_0^inf omega^3 |ghat_n(omega)|^2 d omega for g_n = (1 + u^2)^{-n}.
double K_n_closed(int n);
// K_gamma = int_0^inf omega^3 |ghat(omega)|^2 d omega for
// g(x) = x^{-gamma} e^{-1/x} on x > 0.
double K_gamma_closed(double gamma);

// Transform of (1 + u^2)^{-(n+1)} by residues, valid for omega >= 0.
double ghat_lorentzian(int n_plus_one, double omega);

// Independent quadrature oracles for the two integrals above.
double K_n_quadrature(int n);
double K_gamma_quadrature(double gamma);

}  // namespace cftdist
