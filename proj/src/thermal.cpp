#include "cftdist/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cftdist/spectral.hpp"

namespace cftdist {

namespace {

// theta_1 without its q^{1/4} prefactor:
// 2 sum_k (-1)^k q^{k(k+1)} (2k+1)^d sin^{(d)}((2k+1) v)
double theta1_scaled(double q, double v, int d) {
  double s = 0.0;
  for (int k = 0;; ++k) {
    const double w = k == 0 ? 1.0 : std::pow(q, double(k) * (k + 1));
    if (k > 0 && w < 1e-22) break;
    const double m = 2.0 * k + 1.0;
    double trig = 0.0;
    switch (d % 4) {
      case 0: trig = std::sin(m * v); break;
      case 1: trig = std::cos(m * v); break;
      case 2: trig = -std::sin(m * v); break;
      default: trig = -std::cos(m * v); break;
    }
    s += (k % 2 ? -1.0 : 1.0) * w * std::pow(m, d) * trig;
    if (q == 0.0) break;
  }
  return 2.0 * s;
}

// star_beta on samples; Nyquist mode dropped
rvec star_beta_samples(const rvec& s, double beta) {
  const int n = static_cast<int>(s.size());
  const EllipticKernel k(beta);
  const cvec a = fourier_coefficients(s);
  cvec h(n), dh(n), df(n);
  for (int j = 0; j < n; ++j) {
    const int m = mode_index(j, n);
    if (m == 0 || 2 * m == n) {
      h[j] = dh[j] = df[j] = 0.0;
      continue;
    }
    const double sg = m > 0 ? 1.0 : -1.0;
    h[j] = -I * sg * k.coth_half(std::abs(m)) * a[j];
    dh[j] = I * double(m) * h[j];
    df[j] = I * double(m) * a[j];
  }
  const cvec H = from_coefficients(h), dH = from_coefficients(dh), D = from_coefficients(df);
  const double a0 = a[0].real();
  rvec out(n);
  for (int j = 0; j < n; ++j)
    out[j] = pi * (s[j] * dH[j].real() - D[j].real() * H[j].real()) - 0.5 * a0 * D[j].real();
  return out;
}

double log_sum_exp_moments(const std::vector<std::pair<double, double>>& lv, double beta, int which) {
  double hmin = HUGE_VAL;
  for (const auto& [h, m] : lv) hmin = std::min(hmin, h);
  double z = 0.0, e1 = 0.0, e2 = 0.0;
  for (const auto& [h, m] : lv) {
    const double w = std::isinf(beta) ? (h == hmin ? m : 0.0) : m * std::exp(-beta * (h - hmin));
    z += w;
    e1 += w * h;
    e2 += w * h * h;
  }
  e1 /= z;
  e2 /= z;
  if (which == 0) return std::log(z) - beta * hmin;
  if (which == 1) return -e1;
  return e2 - e1 * e1;
}

double lagrange4(const rvec& y, double h, double x) {
  const int last = static_cast<int>(y.size()) - 1;
  int j = static_cast<int>(std::floor(x / h)) - 1;
  j = std::clamp(j, 0, last - 3);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (x - (j + b) * h) / ((a - b) * h);
    s += w * y[j + a];
  }
  return s;
}

}  // namespace

EllipticKernel::EllipticKernel(double beta, int n_max) : beta_(beta), n_max_(n_max) {
  if (!(beta > 0.0)) throw Error(ErrorKind::Parameter, "elliptic kernel needs beta > 0");
  if (n_max < 1) throw Error(ErrorKind::Config, "elliptic kernel needs n_max >= 1");
}

double EllipticKernel::coefficient(int n) const {
  if (n == 0) return 0.0;
  return -1.0 / std::expm1(-beta_ * n);
}

double EllipticKernel::coth_half(int n) const {
  if (n == 0) return 0.0;
  return 1.0 / std::tanh(0.5 * beta_ * n);
}

double EllipticKernel::theta1(double v, int derivative) const {
  return std::pow(nome(), 0.25) * theta1_scaled(nome(), v, derivative);
}

double EllipticKernel::eta1() const {
  const double q = nome();
  return -(pi / 12.0) * theta1_scaled(q, 0.0, 3) / theta1_scaled(q, 0.0, 1);
}

double EllipticKernel::kappa(double theta) const {
  const double q = nome();
  return 0.5 * theta1_scaled(q, 0.5 * theta, 1) / theta1_scaled(q, 0.5 * theta, 0);
}

double EllipticKernel::zeta(double theta) const { return eta1() * theta / pi + kappa(theta); }

double EllipticKernel::kappa_series(double theta) const {
  double s = 0.5 / std::tan(0.5 * theta);
  for (int n = 1; n <= n_max_; ++n) {
    const double w = coth_half(n) - 1.0;
    if (w < 1e-300) break;
    s += w * std::sin(n * theta);
  }
  return s;
}

cplx phi_pair(const CircleField& f, const CircleField& g, double beta, int d) {
  if (d != 0 && d != 1 && d != 3) throw Error(ErrorKind::Config, "phi_pair supports derivative orders 0, 1, 3");
  const int n = std::max(f.grid().size(), g.grid().size());
  const CircleField fr = f.grid().size() == n ? f : f.resampled(PeriodicGrid(n));
  const CircleField gr = g.grid().size() == n ? g : g.resampled(PeriodicGrid(n));
  const cvec& a = fr.coeffs();
  const cvec& b = gr.coeffs();
  const EllipticKernel k(beta);
  cplx total = 0.0;
  double mag = 0.0, tail = 0.0;
  for (int j = 0; j < n; ++j) {
    const int m = mode_index(j, n);
    if (m == 0 || 2 * m == n) continue;
    const cplx w = std::pow(I * double(m), d) * k.coefficient(m) * a[(n - j) % n] * b[j] * (4.0 * pi * pi);
    total += w;
    mag += std::abs(w);
    if (8 * std::abs(m) > 3 * n) tail += std::abs(w);
  }
  if (mag > 0.0 && tail > 1e-10 * mag) {
    std::ostringstream msg;
    msg << "phi pairing not resolved: top-quarter modes carry " << tail / mag << " of the sum";
    throw Error(ErrorKind::Accuracy, msg.str(), tail / mag);
  }
  return total;
}

CircleField star_beta(const CircleField& f, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::Parameter, "star_beta needs beta > 0");
  return CircleField::from_samples(f.grid(), star_beta_samples(f.samples(), beta), "star_beta(" + f.name() + ")");
}

double thermal_phi(const CircleField& f, double beta, double c) {
  const cplx p = (phi_pair(f, f, beta, 3) + phi_pair(f, f, beta, 1)) / I;
  return -(c / 12.0) * p.real();
}

PartitionFunction vacuum_character() {
  PartitionFunction z;
  z.name = "vacuum";
  z.log_z = z.d1 = z.d2 = [](double) { return 0.0; };
  return z;
}

PartitionFunction spectrum_partition(std::vector<std::pair<double, double>> levels) {
  if (levels.empty()) throw Error(ErrorKind::Parameter, "spectrum needs at least one level");
  for (const auto& [h, m] : levels)
    if (!(m > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::Parameter, "spectrum levels need finite h and m > 0");
  PartitionFunction z;
  z.name = "spectrum";
  z.log_z = [levels](double b) { return log_sum_exp_moments(levels, b, 0); };
  z.d1 = [levels](double b) { return log_sum_exp_moments(levels, b, 1); };
  z.d2 = [levels](double b) { return log_sum_exp_moments(levels, b, 2); };
  return z;
}

PartitionFunction free_boson_partition(int cutoff) {
  if (cutoff < 1) throw Error(ErrorKind::Config, "free boson needs a positive level cutoff");
  // partition numbers by the product expansion
  rvec p(cutoff + 1, 0.0);
  p[0] = 1.0;
  for (int k = 1; k <= cutoff; ++k)
    for (int j = k; j <= cutoff; ++j) p[j] += p[j - k];
  std::vector<std::pair<double, double>> lv;
  for (int j = 0; j <= cutoff; ++j) lv.emplace_back(double(j), p[j]);
  PartitionFunction z = spectrum_partition(std::move(lv));
  z.name = "free-boson";
  return z;
}

bool partition_invariants_hold(const PartitionFunction& z, const rvec& betas) {
  for (double b : betas)
    if (z.d1(b) > 0.0 || z.d2(b) < 0.0) return false;
  return true;
}

std::vector<ThermalFlowState> thermal_flow(const CircleField& f, double beta, double lambda_max, int steps,
                                           const ThermalOptions& opts) {
  if (!(beta > 0.0)) throw Error(ErrorKind::Parameter, "thermal flow needs beta > 0");
  if (steps < 1) throw Error(ErrorKind::Config, "thermal flow needs at least one step");
  const int n = f.grid().size();
  const double h = lambda_max / steps;
  rvec s = f.samples();
  double b = beta;
  std::vector<ThermalFlowState> out;
  out.push_back({f, beta, 0.0});
  auto collapse = [&](int step) {
    std::ostringstream msg;
    msg << "thermal collapse after lambda = " << step * h;
    return Error(ErrorKind::Divergence, msg.str(), step * h);
  };
  auto rhs = [&](const rvec& x, double bx, rvec& dx) {
    if (!(bx > 0.0)) return false;
    dx = star_beta_samples(x, bx);
    return true;
  };
  for (int step = 0; step < steps; ++step) {
    rvec k1, k2, k3, k4, tmp(n);
    double b1, b2, b3, b4;
    bool ok = rhs(s, b, k1);
    b1 = -periodic_integral(s);
    for (int i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    ok = ok && rhs(tmp, b + 0.5 * h * b1, k2);
    b2 = -periodic_integral(tmp);
    for (int i = 0; ok && i < n; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    ok = ok && rhs(tmp, b + 0.5 * h * b2, k3);
    b3 = -periodic_integral(tmp);
    for (int i = 0; ok && i < n; ++i) tmp[i] = s[i] + h * k3[i];
    ok = ok && rhs(tmp, b + h * b3, k4);
    b4 = -periodic_integral(tmp);
    if (!ok) throw collapse(step);
    const double before = *std::max_element(s.begin(), s.end(), [](double x, double y) {
      return std::abs(x) < std::abs(y);
    });
    for (int i = 0; i < n; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    b += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    if (opts.filter > 0.0) {
      cvec a = fourier_coefficients(s);
      double top = 0.0;
      for (const auto& v : a) top = std::max(top, std::abs(v));
      for (auto& v : a)
        if (std::abs(v) < opts.filter * top) v = 0.0;
      const cvec back = from_coefficients(a);
      for (int i = 0; i < n; ++i) s[i] = back[i].real();
    }
    double after = 0.0;
    for (double v : s) after = std::max(after, std::abs(v));
    if (!(b > 0.0) || !std::isfinite(after) || after > 2.0 * std::abs(before) + 1e-300) throw collapse(step);
    out.push_back({CircleField::from_samples(f.grid(), s, f.name()), b, (step + 1) * h});
  }
  return out;
}

double thermal_connected2(const CircleField& f, double beta, const PartitionFunction& z, double c) {
  const double phi = thermal_phi(f, beta, c);
  const double m = f.integral();
  const double st = periodic_integral(star_beta_samples(f.samples(), beta));
  return phi + m * m * z.d2(beta) - st * z.d1(beta);
}

double thermal_connected2_modes(const CircleField& f, double beta, const PartitionFunction& z, double c) {
  const EllipticKernel k(beta);
  const int n = f.grid().size();
  const cvec& a = f.coeffs();
  const double l0 = -z.d1(beta);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const int m = mode_index(j, n);
    if (m == 0 || 2 * m == n) continue;
    const double w = 4.0 * pi * pi * std::norm(a[j]);
    s += w * k.coefficient(m) * (2.0 * m * l0 + (c / 12.0) * (double(m) * m * m - m));
  }
  const double mass = f.integral();
  return s + mass * mass * z.d2(beta);
}

ThermalMgf thermal_mgf(const CircleField& f, double beta, const PartitionFunction& z, double c, const rvec& mu_grid,
                       const ThermalOptions& opts) {
  if (!(c > 0.0)) throw Error(ErrorKind::Parameter, "central charge must be positive");
  if (opts.steps < 4) throw Error(ErrorKind::Config, "thermal mgf needs at least four steps");
  ThermalMgf r;
  r.mu = mu_grid;
  r.log_mgf.assign(mu_grid.size(), 0.0);
  r.mean = -f.integral() * z.d1(beta);
  r.connected2 = thermal_connected2(f, beta, z, c);
  double reach = 0.0;
  for (double m : mu_grid) reach = std::max(reach, std::abs(m));
  for (int side : {1, -1}) {
    double end = 0.0;
    for (double m : mu_grid)
      if (m * side > 0.0) end = std::max(end, std::abs(m));
    if (end == 0.0) continue;
    const int steps = std::max(4, static_cast<int>(std::ceil(opts.steps * end / reach)));
    const std::vector<ThermalFlowState> traj = thermal_flow(f, beta, side * end, steps, opts);
    const double h = end / steps;
    rvec V(traj.size()), LV(traj.size());
    for (size_t k = 0; k < traj.size(); ++k) {
      V[k] = thermal_connected2(traj[k].f, traj[k].beta, z, c);
      LV[k] = k * h * V[k];
    }
    // W(mu) = int_0^mu (mu - l) V(l) dl with l = side * |l|
    const rvec cv = cumulative_cubic(V, h), clv = cumulative_cubic(LV, h);
    rvec W(traj.size());
    for (size_t k = 0; k < traj.size(); ++k) W[k] = k * h * cv[k] - clv[k];
    for (size_t i = 0; i < mu_grid.size(); ++i)
      if (mu_grid[i] * side > 0.0) r.log_mgf[i] = mu_grid[i] * r.mean + lagrange4(W, h, std::abs(mu_grid[i]));
    if (side == 1) r.trajectory = traj;
  }
  return r;
}

}  // namespace cftdist
