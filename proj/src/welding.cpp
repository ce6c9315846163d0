#include "cftdist/welding.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>

namespace cftdist {

cplx kernel_diagonal(double psi_second_over_first) { return I / (4.0 * pi) * psi_second_over_first; }

namespace {

struct SplitGeometry {
  rvec theta, psi, dpsi, diag, s1, s2, s3, a1;
};

SplitGeometry geometry(const PeriodicGrid& grid, const rvec& sigma, const rvec& A) {
  const int n = grid.size();
  rvec ps(n), pa(n);
  for (int k = 0; k < n; ++k) {
    ps[k] = sigma[k] - grid.theta(k);
    pa[k] = A[k] - grid.theta(k);
  }
  SplitGeometry g;
  g.theta = sigma;
  g.psi = A;
  g.s1 = periodic_derivative(ps, 1);
  g.s2 = periodic_derivative(ps, 2);
  g.s3 = periodic_derivative(ps, 3);
  g.a1 = periodic_derivative(pa, 1);
  const rvec a2 = periodic_derivative(pa, 2);
  g.dpsi.resize(n);
  g.diag.resize(n);
  for (int k = 0; k < n; ++k) {
    g.s1[k] += 1.0;
    g.a1[k] += 1.0;
    if (!(g.s1[k] > 0.0) || !(g.a1[k] > 0.0))
      throw Error(ErrorKind::Degenerate, "welding map is not monotone on the grid");
    g.dpsi[k] = g.a1[k] / g.s1[k];
    // psi o sigma = A gives psi''/psi' = (A''/A' - sigma''/sigma')/sigma'
    g.diag[k] = (a2[k] / g.a1[k] - g.s2[k] / g.s1[k]) / g.s1[k];
  }
  return g;
}

inline cplx kernel_entry(double ti, double tj, double pi_, double pj, double dpj) {
  return I / (4.0 * pi) * (1.0 / std::tan(0.5 * (ti - tj)) - dpj / std::tan(0.5 * (pi_ - pj)));
}

}  // namespace

Eigen::MatrixXcd assemble_kernel(const Diffeo& rho) {
  const PeriodicGrid& grid = rho.grid();
  const int n = grid.size();
  const SplitGeometry g = geometry(grid, grid.nodes(), rho.inverse_lift());
  for (int k = 1; k < n; ++k)
    if (!(g.psi[k] > g.psi[k - 1])) throw Error(ErrorKind::Degenerate, "inverse lift is not monotone");
  const double h = grid.spacing();
  Eigen::MatrixXcd K(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      K(i, j) = (i == j ? kernel_diagonal(g.diag[i]) : kernel_entry(g.theta[i], g.theta[j], g.psi[i], g.psi[j], g.dpsi[j])) * h;
  return K;
}

WeldingSolution solve_split_welding(const PeriodicGrid& grid, const rvec& sigma, const rvec& A, double t,
                                    int symmetry, const WeldingOptions& opts) {
  const int n = grid.size();
  const SplitGeometry g = geometry(grid, sigma, A);
  const int m = (symmetry > 1 && n % symmetry == 0) ? symmetry : 1;
  const int nr = n / m;
  const double h = grid.spacing();

  // cot((a - b)/2) = i (e^{ia} + e^{ib}) / (e^{ia} - e^{ib})
  cvec et(n), ep(n);
  for (int k = 0; k < n; ++k) {
    et[k] = std::polar(1.0, g.theta[k]);
    ep[k] = std::polar(1.0, g.psi[k]);
  }
  auto cot_half = [](cplx za, cplx zb) { return (I * (za + zb) / (za - zb)).real(); };
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(nr, nr);
  for (int l = 0; l < m; ++l) {
    const cplx phase = std::polar(1.0, two_pi * l / m);
    for (int j = 0; j < nr; ++j) {
      const int jj = j + l * nr;
      const cplx wj = I / (4.0 * pi) * g.s1[jj] * h * phase;
      const cplx tj = et[jj], pj = ep[jj];
      const double dpj = g.dpsi[jj];
      for (int i = 0; i < nr; ++i) {
        if (l == 0 && i == j) {
          M(i, j) += kernel_diagonal(g.diag[i]) * g.s1[jj] * h;
          continue;
        }
        M(i, j) += wj * (cot_half(et[i], tj) - dpj * cot_half(ep[i], pj));
      }
    }
  }
  Eigen::VectorXcd rhs(nr);
  for (int i = 0; i < nr; ++i) rhs(i) = std::polar(1.0, g.theta[i]);
  Eigen::VectorXcd x;
  double condition = -1.0;
  if (nr <= opts.direct_limit) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) throw Error(ErrorKind::Fredholm, "welding system is numerically singular", rcond);
    x = lu.solve(rhs);
    condition = 1.0 / rcond;
  } else {
    Eigen::GMRES<Eigen::MatrixXcd, Eigen::IdentityPreconditioner> gmres(M);
    gmres.setTolerance(1e-15);
    gmres.set_restart(120);
    gmres.setMaxIterations(600);
    x = gmres.solve(rhs);
    const double res = (M * x - rhs).norm() / rhs.norm();
    if (!(res < 1e-12)) throw Error(ErrorKind::Fredholm, "welding iteration did not converge", res);
  }

  WeldingSolution ws;
  ws.grid = grid;
  ws.t = t;
  ws.theta = g.theta;
  ws.condition = condition;
  ws.weight.resize(n);
  ws.w_minus.resize(n);
  for (int l = 0; l < m; ++l) {
    const cplx phase = std::polar(1.0, two_pi * l / m);
    for (int i = 0; i < nr; ++i) ws.w_minus[i + l * nr] = x(i) * phase;
  }
  for (int k = 0; k < n; ++k) ws.weight[k] = g.s1[k] * h;

  const cvec W1 = periodic_derivative(ws.w_minus, 1);
  const cvec SW = schwarzian_theta(ws.w_minus);
  ws.schwarzian.resize(n);
  ws.dlog.resize(n);
  for (int k = 0; k < n; ++k) {
    const double r = g.s2[k] / g.s1[k];
    const double s_sigma = g.s3[k] / g.s1[k] - 1.5 * r * r;
    const cplx s_theta = (SW[k] - s_sigma) / (g.s1[k] * g.s1[k]);
    const cplx z = std::polar(1.0, g.theta[k]);
    ws.schwarzian[k] = (0.5 - s_theta) / (z * z);
    if (std::abs(ws.w_minus[k]) < 1e-12) throw Error(ErrorKind::Domain, "w^- vanishes on the circle");
    ws.dlog[k] = W1[k] / (g.s1[k] * I * z * ws.w_minus[k]);
  }

  const cvec coeffs = fourier_coefficients(ws.w_minus);
  ws.resolution_tail = spectral_tail(coeffs);

  // Negative modes of w^- o rho in the variable theta^+ = A(s) must vanish for w^+
  // to extend inside; modes above 1 of w^- in theta = sigma(s) must vanish outside.
  const double amax = *std::max_element(g.a1.begin(), g.a1.end());
  const double smax = *std::max_element(g.s1.begin(), g.s1.end());
  const int mp = std::max(1, static_cast<int>(n / (4.0 * amax)));
  const int mm = std::max(2, static_cast<int>(n / (4.0 * smax)));
  double junction = 0.0;
  cvec pw(n);
  for (int k = 0; k < n; ++k) pw[k] = ws.w_minus[k] * g.a1[k];
  for (int q = 1; q <= mp; ++q) {
    cplx c = 0.0;
    for (int k = 0; k < n; ++k) c += (pw[k] *= ep[k]);
    junction += std::abs(c) / n;
  }
  double norm_err = 0.0;
  for (int k = 0; k < n; ++k) pw[k] = ws.w_minus[k] * g.s1[k];
  for (int q = 1; q <= mm; ++q) {
    cplx c = 0.0;
    for (int k = 0; k < n; ++k) c += (pw[k] *= std::conj(et[k]));
    c /= static_cast<double>(n);
    norm_err += std::abs(q == 1 ? c - 1.0 : c);
  }
  ws.junction_residual = junction;
  ws.normalization_error = norm_err;

  double turn = 0.0;
  for (int k = 0; k < n; ++k) turn += std::arg(ws.w_minus[(k + 1) % n] / ws.w_minus[k]);
  ws.winding = static_cast<int>(std::lround(turn / two_pi));

  if (opts.throw_on_residual && ws.junction_residual > opts.junction_tol)
    throw Error(ErrorKind::Accuracy, "welding junction residual above tolerance", ws.junction_residual);
  return ws;
}

WeldingSolution solve_welding(const Diffeo& rho, const WeldingOptions& opts) {
  const PeriodicGrid& grid = rho.grid();
  return solve_split_welding(grid, grid.nodes(), rho.inverse_lift(), rho.time(), 1, opts);
}

WeldingSolution solve_flow_welding(const CircleField& f, double t, const WeldingOptions& opts) {
  const int sym = opts.use_symmetry ? f.symmetry_order() : 1;
  WeldingOptions inner = opts;
  inner.throw_on_residual = false;
  for (int n = f.grid().size();; n *= 2) {
    const bool last = 2 * n > opts.max_points;
    const CircleField fn = n == f.grid().size() ? f : f.resampled(PeriodicGrid(n));
    const auto lifts = flow_lifts(fn, {0.5 * t, -0.5 * t}, opts.steps_per_unit);
    WeldingSolution ws;
    try {
      ws = solve_split_welding(fn.grid(), lifts[0], lifts[1], t, sym, inner);
    } catch (const Error& e) {
      // spectral derivatives of an unresolved lift can dip below zero
      if (e.kind() == ErrorKind::Degenerate && !last) continue;
      throw;
    }
    if (ws.resolution_tail <= opts.resolution_tol || last) {
      if (opts.throw_on_residual && ws.junction_residual > opts.junction_tol)
        throw Error(ErrorKind::Accuracy, "welding junction residual above tolerance", ws.junction_residual);
      return ws;
    }
  }
}

WeldingSolution solve_split_adaptive(const PeriodicGrid& fine, const rvec& sigma, const rvec& A, double t,
                                     int symmetry, int start_points, const WeldingOptions& opts) {
  WeldingOptions inner = opts;
  inner.throw_on_residual = false;
  for (int n = std::min(start_points, fine.size());; n *= 2) {
    const bool last = n >= fine.size();
    const int stride = fine.size() / n;
    rvec s(n), a(n);
    for (int k = 0; k < n; ++k) {
      s[k] = sigma[k * stride];
      a[k] = A[k * stride];
    }
    // an unresolved lift cannot give a resolved welding
    if (!last) {
      const PeriodicGrid gn(n);
      rvec ps(n), pa(n);
      for (int k = 0; k < n; ++k) {
        ps[k] = s[k] - gn.theta(k);
        pa[k] = a[k] - gn.theta(k);
      }
      if (std::max(spectral_tail(fourier_coefficients(ps)), spectral_tail(fourier_coefficients(pa))) >
          opts.resolution_tol)
        continue;
    }
    WeldingSolution ws;
    try {
      ws = solve_split_welding(PeriodicGrid(n), s, a, t, symmetry, inner);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Degenerate && !last) continue;
      throw;
    }
    if (ws.resolution_tail <= opts.resolution_tol || last) {
      if (opts.throw_on_residual && ws.junction_residual > opts.junction_tol)
        throw Error(ErrorKind::Accuracy, "welding junction residual above tolerance", ws.junction_residual);
      return ws;
    }
  }
}

cvec WeldingSolution::resample(const rvec& sigma_inverse_at_uniform) const {
  const cvec coeffs = fourier_coefficients(w_minus);
  cvec out(sigma_inverse_at_uniform.size());
  for (size_t k = 0; k < out.size(); ++k) out[k] = trig_eval(coeffs, sigma_inverse_at_uniform[k]);
  return out;
}

cvec closed_w_minus_fn(int n, double t, const rvec& theta) {
  const double T = std::tanh(0.5 * t);
  cvec w(theta.size());
  for (size_t k = 0; k < theta.size(); ++k) {
    const cplx z = std::polar(1.0, theta[k]);
    w[k] = z * std::pow(1.0 - T * std::polar(1.0, -n * theta[k]), 1.0 / n);
  }
  return w;
}

cvec closed_w_plus_fn(int n, double t, const rvec& theta) {
  const double T = std::tanh(0.5 * t);
  const double pref = std::pow(std::cosh(0.5 * t), -2.0 / n);
  cvec w(theta.size());
  for (size_t k = 0; k < theta.size(); ++k) {
    const cplx z = std::polar(1.0, theta[k]);
    w[k] = z * pref * std::pow(1.0 + T * std::polar(1.0, n * theta[k]), -1.0 / n);
  }
  return w;
}

WeldingSolution closed_weld_fn(int n, double t, const PeriodicGrid& grid) {
  if (n < 2) throw Error(ErrorKind::Parameter, "closed welding needs n >= 2");
  const int N = grid.size();
  const double T = std::tanh(0.5 * t);
  WeldingSolution ws;
  ws.grid = grid;
  ws.t = t;
  ws.theta = grid.nodes();
  ws.weight.assign(N, grid.spacing());
  ws.w_minus = closed_w_minus_fn(n, t, ws.theta);
  ws.schwarzian.resize(N);
  ws.dlog.resize(N);
  rvec moved(N);
  for (int k = 0; k < N; ++k) {
    const cplx z = std::polar(1.0, ws.theta[k]);
    const cplx q = 1.0 - T * std::polar(1.0, -n * ws.theta[k]);
    ws.schwarzian[k] = (n * n - 1.0) / (2.0 * z * z) * (-1.0 + 1.0 / (q * q));
    // log w = log z + (1/n) log(1 - T z^{-n})
    ws.dlog[k] = 1.0 / z + T * std::pow(z, -n - 1) / q;
    moved[k] = fn_flow_closed(n, t, ws.theta[k]);
  }
  const cvec wp = closed_w_plus_fn(n, t, ws.theta);
  const cvec wm = closed_w_minus_fn(n, t, moved);
  double r = 0.0;
  for (int k = 0; k < N; ++k) r = std::max(r, std::abs(wp[k] - wm[k]));
  ws.junction_residual = r;
  return ws;
}

cplx pair_field_schwarzian(const CircleField& f, const WeldingSolution& ws) {
  cplx s = 0.0;
  for (size_t k = 0; k < ws.theta.size(); ++k) {
    const cplx z = std::polar(1.0, ws.theta[k]);
    s += f(ws.theta[k]) * z * z * ws.schwarzian[k] * ws.weight[k];
  }
  return I * s;
}

cplx pair_field_density(const CircleField& f, const WeldingSolution& ws, double c, double h) {
  cplx s = 0.0;
  for (size_t k = 0; k < ws.theta.size(); ++k) {
    const cplx z = std::polar(1.0, ws.theta[k]);
    const cplx dl = ws.dlog[k];
    s += f(ws.theta[k]) * z * z * (c / 12.0 * ws.schwarzian[k] + h * dl * dl) * ws.weight[k];
  }
  return I * s;
}

}  // namespace cftdist
