#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "cftdist/common.hpp"
#include "cftdist/spectral.hpp"

namespace cftdist {

using RealFn = std::function<double(double)>;

// Real angular component f(theta) of a circle test function; 2 pi f is the
// angular velocity of the generated flow.
class CircleField {
 public:
  static CircleField from_samples(const PeriodicGrid& grid, rvec samples, std::string name = "samples");
  // Samples fn on the grid and keeps it for exact off-grid evaluation.
  static CircleField from_function(const PeriodicGrid& grid, RealFn fn, std::string name = "function");

  const PeriodicGrid& grid() const { return grid_; }
  const rvec& samples() const { return samples_; }
  const cvec& coeffs() const { return coeffs_; }
  const std::string& name() const { return name_; }
  bool has_exact() const { return static_cast<bool>(exact_); }

  double operator()(double theta) const;
  double integral() const { return periodic_integral(samples_); }
  // Largest coefficient in the top quarter of modes relative to the largest one.
  double resolution_tail() const;
  // Largest m such that only multiples of m carry non-negligible modes.
  int symmetry_order() const;
  // Same field on a different grid (exact evaluator reused when present).
  CircleField resampled(const PeriodicGrid& grid) const;

 private:
  CircleField(const PeriodicGrid& grid) : grid_(grid) {}
  PeriodicGrid grid_;
  rvec samples_;
  cvec coeffs_;
  RealFn exact_;
  std::string name_;
};

// Real test function g(u) on the light ray.
struct LineField {
  RealFn g;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  std::string name = "line";
  // Extent of the sampling grid for sampled fields; infinite for analytic ones.
  double domain_lo = -std::numeric_limits<double>::infinity();
  double domain_hi = std::numeric_limits<double>::infinity();

  double operator()(double u) const {
    return (u < support_lo || u > support_hi) ? 0.0 : g(u);
  }
  bool compact() const { return std::isfinite(support_lo) && std::isfinite(support_hi); }
  rvec sample(const LineGrid& grid) const;

  // Cubic B-spline interpolant of samples; zero outside the grid.
  static LineField from_samples(const LineGrid& grid, const rvec& values, std::string name = "samples");
};

// Orientation-preserving circle diffeomorphism given by its lift chi and the
// lift of its inverse, both sampled on a periodic grid.
class Diffeo {
 public:
  Diffeo(const PeriodicGrid& grid, rvec lift, rvec inverse_lift, double t = 0.0);
  static Diffeo identity(const PeriodicGrid& grid);

  const PeriodicGrid& grid() const { return grid_; }
  double time() const { return t_; }
  const rvec& lift() const { return chi_; }
  const rvec& derivative() const { return dchi_; }
  const rvec& second_derivative() const { return d2chi_; }
  const rvec& inverse_lift() const { return inv_; }
  const rvec& inverse_derivative() const { return dinv_; }
  const rvec& inverse_second_derivative() const { return d2inv_; }

  // chi(x) at an arbitrary point via the trigonometric interpolant of chi - theta.
  double operator()(double x) const;
  double inverse(double x) const;
  Diffeo inverted() const;
  // (this o other)(theta) = this(other(theta))
  Diffeo compose(const Diffeo& other) const;
  // max |chi(chi^{-1}(theta_k)) - theta_k|
  double inverse_residual() const;
  double min_derivative() const;
  // RK4 step-halving estimate, set by flow()
  double step_error = 0.0;

 private:
  PeriodicGrid grid_;
  double t_;
  rvec chi_, dchi_, d2chi_, inv_, dinv_, d2inv_;
  cvec per_coeffs_, inv_coeffs_;
};

Diffeo flow(const CircleField& f, double t, int steps);

// Lifts chi_t at the requested times from one RK4 sweep in each direction;
// each unit of |t| uses at least steps_per_unit steps.
std::vector<rvec> flow_lifts(const CircleField& f, const rvec& times, int steps_per_unit);

CircleField make_fn_field(int n, const PeriodicGrid& grid);
// Rotated companion cos(n theta)/(2 pi n).
CircleField make_gn_field(int n, const PeriodicGrid& grid);
// chi_t for the f_n field in closed form.
double fn_flow_closed(int n, double t, double theta);

// Cayley map C(u) = (1 + i u)/(1 - i u), theta = 2 atan u.
CircleField cayley_pull(const LineField& g, const PeriodicGrid& grid);
LineField cayley_push(const CircleField& f);
LineField kms_pull(const LineField& g, double beta);
// g(m + s x)/s with m, s the centre and half-width of the support.
LineField affine_normalize(const LineField& g);

// rho(z) = (a z + b)/(conj(b) z + conj(a)), |a|^2 - |b|^2 = 1.
struct MobiusCircle {
  cplx a{1.0, 0.0}, b{0.0, 0.0};
  static MobiusCircle make(cplx a, cplx b);  // rescales to unit determinant
  MobiusCircle inverse() const { return {std::conj(a), -b}; }
  double lift(double theta) const;
  double lift_derivative(double theta) const;
  cplx apply(cplx z) const { return (a * z + b) / (std::conj(b) * z + std::conj(a)); }
};

// rho(u) = (a u + b)/(c u + d), a d - b c = 1.
struct MobiusLine {
  double a = 1, b = 0, c = 0, d = 1;
  static MobiusLine make(double a, double b, double c, double d);
  double apply(double u) const { return (a * u + b) / (c * u + d); }
  double derivative(double u) const { return 1.0 / ((c * u + d) * (c * u + d)); }
  MobiusLine inverse() const { return {d, -b, -c, a}; }
};

Diffeo mobius_diffeo(const MobiusCircle& m, const PeriodicGrid& grid);
CircleField mobius_push(const CircleField& f, const MobiusCircle& m);
LineField mobius_push(const LineField& f, const MobiusLine& m);

// Moebius frame for a field on u > 0: u -> (u - r)/(u + r) with r the
// geometric mean of the support ends (1 if unbounded), then affine_normalize.
LineField kms_normalize(const LineField& g);

// S_z w for boundary samples w(e^{i theta_k}).
cvec schwarzian_on_circle(const cvec& w, const PeriodicGrid& grid);
// S_theta of a circle map given by its lift.
rvec lift_schwarzian(const rvec& lift, const PeriodicGrid& grid);
// S_theta of a complex function of theta from its derivatives.
cvec schwarzian_theta(const cvec& w);

}  // namespace cftdist
