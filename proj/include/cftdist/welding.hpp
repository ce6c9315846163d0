#pragma once

#include <Eigen/Dense>

#include "cftdist/diffeo.hpp"

namespace cftdist {

struct WeldingOptions {
  double junction_tol = 1e-7;
  // tail of the boundary-value spectrum that triggers grid doubling
  double resolution_tol = 1e-10;
  int max_points = 2048;
  int steps_per_unit = 256;
  bool use_symmetry = true;
  bool throw_on_residual = true;
  // reduced systems larger than this are solved by restarted GMRES
  int direct_limit = 256;
};

// Boundary values of w^- at nodes theta_j = sigma(s_j) for a uniform s-grid.
// sigma is the identity for a plain Nystrom solve and the half-time flow for
// flow-generated maps, which splits the distortion evenly between w^- and w^+.
struct WeldingSolution {
  PeriodicGrid grid{8};
  double t = 0.0;
  rvec theta;       // nodes on the w^- side
  rvec weight;      // quadrature weights sigma'(s_j) 2 pi / N
  cvec w_minus;
  cvec schwarzian;  // S_z w^- at the nodes
  cvec dlog;        // d/dz log w^- at the nodes
  double junction_residual = 0.0;
  double normalization_error = 0.0;
  double condition = 1.0;  // 1/rcond of the direct solve, -1 after GMRES
  double resolution_tail = 0.0;
  int winding = 1;

  // w^- at uniformly spaced theta via the interpolant in s; sigma^{-1} at the
  // uniform nodes must be supplied (identity for plain solves).
  cvec resample(const rvec& sigma_inverse_at_uniform) const;
};

// Nystrom matrix of K at the nodes of a plain solve (sigma = identity).
Eigen::MatrixXcd assemble_kernel(const Diffeo& rho);
// Diagonal of K from the local expansion of both cotangents.
cplx kernel_diagonal(double psi_second_over_first);

WeldingSolution solve_welding(const Diffeo& rho, const WeldingOptions& opts = {});
// Welding for rho = flow(f, t) with nodes placed by the half-time flow.
WeldingSolution solve_flow_welding(const CircleField& f, double t, const WeldingOptions& opts = {});
// Same, with half-time lifts chi_{t/2}, chi_{-t/2} on the uniform grid supplied.
WeldingSolution solve_split_welding(const PeriodicGrid& grid, const rvec& sigma, const rvec& A, double t,
                                    int symmetry, const WeldingOptions& opts);

// Split welding on the coarsest power-of-two subgrid of `fine`, starting at
// start_points, whose boundary spectrum meets resolution_tol.
WeldingSolution solve_split_adaptive(const PeriodicGrid& fine, const rvec& sigma, const rvec& A, double t,
                                     int symmetry, int start_points, const WeldingOptions& opts);

WeldingSolution closed_weld_fn(int n, double t, const PeriodicGrid& grid);
cvec closed_w_plus_fn(int n, double t, const rvec& theta);
cvec closed_w_minus_fn(int n, double t, const rvec& theta);

// (2 pi i)^{-1} contour integral of f(z) S w^-(z) dz.
cplx pair_field_schwarzian(const CircleField& f, const WeldingSolution& ws);
// Same contour pairing with (c/12) S w^- + h (d log w^-/dz)^2.
cplx pair_field_density(const CircleField& f, const WeldingSolution& ws, double c, double h);

}  // namespace cftdist
