#pragma once

#include <string>

#include "cftdist/welding.hpp"

namespace cftdist {

// Samples of t -> <e^{i t T(f)}> on the symmetric grid t_k = k t_max / n_t,
// k = -n_t..n_t. Negative t are filled by conjugation.
struct CharFunSamples {
  rvec t;
  cvec values;
  double c = 1.0;
  double h = 0.0;
  double beta = 0.0;  // 0 for non-thermal variants
  std::string variant;
  std::string field;

  int zero_index() const { return static_cast<int>(t.size() / 2); }
  double step() const { return t[1] - t[0]; }
  // phi at t by cubic interpolation of log phi between nodes
  cplx operator()(double tt) const;
};

struct CharFunOptions {
  double t_max = 5.0;
  int n_t = 128;
  WeldingOptions welding;
};

struct AxiomReport {
  double value_at_zero_error = 0.0;
  double hermitian_error = 0.0;
  double max_modulus = 0.0;
  double toeplitz_min_eigenvalue = 0.0;  // smallest over sampled 2x2 and 3x3 minors
  bool ok(double tol = 1e-8) const;
};

CharFunSamples vacuum_charfun(const CircleField& f, double c, const CharFunOptions& opts = {});
CharFunSamples hw_charfun(const CircleField& f, double c, double h, const CharFunOptions& opts = {});
// Cayley pullback to a circle grid of `points` nodes, then the vacuum pipeline.
CharFunSamples lightray_charfun(const LineField& g, double c, const CharFunOptions& opts = {}, int points = 256);
// Light-ray charfun of the KMS pullback in the frame of kms_normalize.
CharFunSamples kms_charfun(const LineField& g, double beta, double c, const CharFunOptions& opts = {},
                           int points = 256);

// d/dt log phi(t) at arbitrary t for the vacuum (h = 0) or highest-weight state.
cplx log_charfun_rate(const CircleField& f, double t, double c, double h, const WeldingOptions& opts = {});

// log phi(-i mu) = log <e^{mu T(f)}> by Chebyshev interpolation of the rate
// on [-t_span, t_span] with `nodes` points and evaluation off the real axis.
rvec continued_log_mgf(const CircleField& f, double c, const rvec& mu, double t_span = 3.0, int nodes = 48,
                       const WeldingOptions& opts = {});

// -phi''(0) from 5-point stencils at multiples of the grid step, choosing the
// step with the smallest Richardson difference.
double second_moment(const CharFunSamples& cf);

AxiomReport check_axioms(const CharFunSamples& cf, int random_triples = 200, unsigned seed = 1);

}  // namespace cftdist
