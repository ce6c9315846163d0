#pragma once

#include "cftdist/common.hpp"

namespace cftdist {

// Equispaced nodes theta_k = 2 pi k / N on the circle, N a power of two.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int n_points);
  int size() const { return n_; }
  double spacing() const { return two_pi / n_; }
  double theta(int k) const { return two_pi * k / n_; }
  rvec nodes() const;
  bool operator==(const PeriodicGrid& o) const { return n_ == o.n_; }

 private:
  int n_;
};

// Nodes u_k = u_min + k h, h = (u_max - u_min)/N, k = 0..N-1.
class LineGrid {
 public:
  LineGrid(int n_points, double u_min, double u_max);
  int size() const { return n_; }
  double u_min() const { return a_; }
  double u_max() const { return b_; }
  double spacing() const { return (b_ - a_) / n_; }
  double u(int k) const { return a_ + k * spacing(); }
  rvec nodes() const;

 private:
  int n_;
  double a_, b_;
};

bool is_power_of_two(int n);

// Signed mode number of FFT slot k on an N-point grid.
inline int mode_index(int k, int n) { return k <= n / 2 ? k : k - n; }

// Unnormalized forward/backward DFTs; forward uses e^{-2 pi i jk/N}.
cvec fft(const cvec& x);
cvec ifft(const cvec& x);

// Fourier coefficients a_m with x_k = sum_m a_m e^{i m theta_k}, FFT slot order.
cvec fourier_coefficients(const cvec& samples);
cvec fourier_coefficients(const rvec& samples);
cvec from_coefficients(const cvec& coeffs);

cvec periodic_derivative(const cvec& samples, int order);
rvec periodic_derivative(const rvec& samples, int order);

cplx periodic_integral(const cvec& samples);
double periodic_integral(const rvec& samples);

// Trigonometric interpolant of a coefficient vector evaluated at x.
// The Nyquist term is split symmetrically so real data stay real.
cplx trig_eval(const cvec& coeffs, double x);
double trig_eval_real(const cvec& coeffs, double x);

// Largest |a_m| among the top quarter of resolved modes.
double spectral_tail(const cvec& coeffs);

// Cumulative integral at every node of a uniform grid; each interval uses the
// cubic through its four nearest nodes. Needs at least four nodes.
cvec cumulative_cubic(const cvec& y, double h);
rvec cumulative_cubic(const rvec& y, double h);

struct LineTransform {
  rvec omega;
  cvec values;
  bool boundary_decayed = true;
};

// fhat(omega) = int f(u) e^{i omega u} du via zero-padded FFT.
LineTransform line_fourier_transform(const rvec& samples, const LineGrid& grid, int pad = 4);

}  // namespace cftdist
