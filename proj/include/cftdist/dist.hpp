#pragma once

#include <string>

#include "cftdist/charfun.hpp"
#include "cftdist/momentflow.hpp"

namespace cftdist {

// Generalized hyperbolic secant law with charfun (sech t/2)^p.
struct SecantDist {
  double p = 1.0;

  explicit SecantDist(double p_);
  // (2^{p-1} / (pi Gamma(p))) |Gamma(p/2 - i x)|^2
  double pdf(double x) const;
  double charfun(double t) const;
  double variance() const { return 0.25 * p; }
  // kappa_{2n} = -p (-1)^n (2^{2n} - 1) B_{2n} / (2n); odd ones vanish
  double cumulant(int k) const;
  double moment(int k) const;
};

rvec secant_pdf(double p, const rvec& x);
double secant_charfun(double p, double t);
// Samples of the secant charfun on the grid of a CharFunSamples record.
CharFunSamples secant_samples(double p, double t_max, int n_t);
CharFunSamples shifted_gamma_samples(const ShiftedGamma& g, double t_max, int n_t);

rvec shifted_gamma_pdf(const ShiftedGamma& g, const rvec& x);
double shifted_gamma_mgf(const ShiftedGamma& g, double mu);

// Raw moments from cumulants kappa_1..kappa_k.
double moment_from_cumulants(const rvec& kappa, int k);

struct EmpiricalDensity {
  rvec x;
  rvec pdf;
  std::string source;
  std::string window;
  double mass = 0.0;
  double support_min = 0.0;  // leftmost x where pdf reaches half its peak
  bool window_bias = false;  // the charfun had not decayed below 1e-8 at t_max
  double min_value = 0.0;

  double spacing() const { return x[1] - x[0]; }
  // linear interpolation, zero outside the grid
  double operator()(double v) const;
  cplx charfun(double t) const;
  double moment(int k) const;
  // nonnegative up to -1e-6 and mass within 1e-4 of one
  bool valid() const;
};

struct InversionOptions {
  int pad = 8;               // zero padding; the x spacing is pi / (pad t_max)
  double window_fraction = 0.1;
  double x_max = 0.0;        // keep |x| <= x_max when positive
};

// Discrete inverse Fourier transform with a raised-cosine taper on the last
// tenth of the t range. Precondition error when |phi(t_max)| > 0.999.
EmpiricalDensity invert_charfun(const CharFunSamples& cf, const InversionOptions& opts = {});

// Law of the sum of independent shifted-Gamma variables.
struct ConvolvedDist {
  ShiftedGamma first, second;
  bool closed = false;  // equal rates: the sum is again shifted Gamma
  ShiftedGamma closed_form;

  double pdf(double x) const;
  double mgf(double mu) const { return first.mgf(mu) * second.mgf(mu); }
  // int pdf by quadrature; the density itself uses a confluent hypergeometric form
  double mass() const;
  double support_min() const { return -(first.sigma + second.sigma); }
};

ConvolvedDist convolve(const ShiftedGamma& a, const ShiftedGamma& b);

}  // namespace cftdist
