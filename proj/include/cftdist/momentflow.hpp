#pragma once

#include <string>

#include "cftdist/diffeo.hpp"

namespace cftdist {

// Density of X = Y - sigma with Y ~ Gamma(shape alpha, rate beta).
struct ShiftedGamma {
  double alpha = 1.0;
  double beta = 1.0;
  double sigma = 0.0;

  double pdf(double x) const;
  // density at distance u > 0 above the support edge -sigma
  double pdf_from_edge(double u) const;
  // e^{-mu sigma} (1 - mu/beta)^{-alpha}; Divergence for mu >= beta
  double mgf(double mu) const;
  double log_mgf(double mu) const;
  cplx charfun(double t) const;
  double cumulant(int k) const;
  // E[X^k] from the cumulants
  double moment(int k) const;
  double variance() const { return alpha / (beta * beta); }
};

// Shape-matching fit from the second and third cumulants, mean fixed to zero.
ShiftedGamma fit_shifted_gamma(double kappa2, double kappa3);

enum class FamilyKind { Gaussian, Lorentzian, InvGamma, Numeric };

const char* to_string(FamilyKind k);

// Closed-form solutions of df/dlambda = f * f starting from a unit-mass density.
struct FlowFamily {
  FamilyKind kind = FamilyKind::Gaussian;
  double tau = 1.0;    // Gaussian width
  int n = 1;           // Lorentzian power
  double b0 = 1.0;     // Lorentzian width, or inverse-Gamma scale b = gamma mu
  double gamma = 2.0;  // inverse-Gamma power

  double mu0() const { return b0 / gamma; }
  // prefactor a of the profile; constant along the flow
  double amplitude() const;
  // lambda at which the solution blows up
  double blowup() const;
  // b_lambda (Lorentzian), mu(lambda) (inverse Gamma), or the Gaussian width
  double width(double lambda) const;
  LineField at(double lambda) const;
  LineField field() const { return at(0.0); }
  std::string name() const;
};

FlowFamily gaussian_family(double tau);
FlowFamily lorentzian_family(int n, double b0);
// support [mu0, inf) with mu0 = b0 / gamma
FlowFamily invgamma_family(double gamma, double b0);

ShiftedGamma shifted_gamma_params(const FlowFamily& fam, double c);

struct FlowOptions {
  int min_points = 256;
  int max_points = 8192;
  double resolve_tol = 1e-13;
  double spacing = 0.05;   // s-grid step of the Lagrangian flow
  int steps = 64;          // initial RK4 steps for mgf
  double w_tol = 1e-7;     // step halving stops once W changes by less
  int max_halvings = 6;
};

// Circle representation of a line field: the Cayley pullback of
// g(shift + scale x)/scale. Compact fields are centred on [-1, 1].
struct CayleyFrame {
  double shift = 0.0;
  double scale = 1.0;
  CircleField field;
  LineField to_line(const CircleField& f) const { return to_line(f, shift, scale); }
  static LineField to_line(const CircleField& f, double shift, double scale);
};

CayleyFrame cayley_frame(const LineField& f, const FlowOptions& opts = {});

// Line star product in the Cayley frame: the bracket of f with half its
// Hilbert transform, the latter from the circle conjugate function plus an
// sl(2) correction.
CircleField line_star_circle(const CircleField& F);
// 4 pi^2 (c/12) sum_{m >= 2} (m^3 - m) |a_m|^2, the variance of T(F).
double circle_variance(const CircleField& F, double c);
// d/dlambda of circle_variance along the flow
double circle_variance_rate(const CircleField& F, double c);

LineField star(const LineField& f, const FlowOptions& opts = {});
// (f * f)(u) by direct quadrature of the regular kernel; finite differences
// for the derivatives.
double star_direct(const LineField& f, double u);

// Chart x = X(s) of the line used by the Lagrangian flow solver.
struct FlowChart {
  enum class Kind { Linear, Sinh, Exp, ReverseExp, Tanh };
  Kind kind = Kind::Linear;
  double anchor = 0.0, width = 1.0;
  double x(double s) const;
  double dx(double s) const;
};

// f_lambda = psi_* f_0 with d psi/d lambda = (H f_lambda / 2)(psi), the
// particle paths psi sampled on a uniform s grid of the chart.
struct NumericFlow {
  FlowChart chart;
  rvec s;
  rvec lambda;
  std::vector<rvec> psi;     // particle positions
  std::vector<rvec> values;  // f_lambda(psi)
  rvec unit_variance;        // variance at c = 1

  size_t size() const { return lambda.size(); }
  // f_lambda(u) by Lagrange interpolation in the particle positions; zero
  // outside them
  double value(size_t k, double u) const;
  // image of the left end of the chart (the support start for half-line charts)
  double left_end(size_t k) const { return psi.at(k).front(); }
  LineField field(size_t k) const;
};

// RK4 from 0 to lambda_max (either sign), substepping for stability.
// Throws Divergence carrying the last safe lambda when the sup norm doubles
// within one step.
NumericFlow flow_integrate(const LineField& f0, double lambda_max, int steps, const FlowOptions& opts = {});

// (c/48 pi^2) int_0^inf omega^3 |fhat|^2 by Simpson on the padded FFT grid.
double variance(const LineField& f, double c, const LineGrid& grid, int pad = 8);
// Same quantity from the Cayley-frame mode sum; no truncation of the line.
double variance(const LineField& f, double c, const FlowOptions& opts = {});

struct MgfResult {
  rvec mu;
  rvec log_mgf;
  int steps = 0;
  double step_change = 0.0;  // |Delta W| at the last halving
  rvec mgf() const;
};

MgfResult mgf(const LineField& f, double c, const rvec& mu_grid, const FlowOptions& opts = {});

struct CumulantFit {
  ShiftedGamma fit;
  double kappa2 = 0.0, kappa3 = 0.0;
  // sup |exp W - M_fit| / M_fit over the sampled mu, when sampled
  double adequacy = 0.0;
};

CumulantFit cumulant_fit(const LineField& f, double c, const FlowOptions& opts = {});
// As above, plus the adequacy check against mgf on the given mu values.
CumulantFit cumulant_fit(const LineField& f, double c, const rvec& mu_check, const FlowOptions& opts = {});

// -(c/12 pi) int (d sqrt f/du)^2 du
double qei_bound(const LineField& f, double c);

struct GrowthReport {
  bool hamburger = false;
  bool stieltjes = false;
  double C = 0.0, D = 0.0;  // |m_k| <= C D^k k! on the sample
};

GrowthReport moment_growth_check(const rvec& moments);

}  // namespace cftdist
