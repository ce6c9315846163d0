#include "cftdist/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace cftdist {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Fredholm: return "fredholm";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Domain: return "domain";
  }
  return "unknown";
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

PeriodicGrid::PeriodicGrid(int n_points) : n_(n_points) {
  if (n_ < 8 || !is_power_of_two(n_))
    throw Error(ErrorKind::Config, "periodic grid needs a power of two >= 8, got " + std::to_string(n_));
}

rvec PeriodicGrid::nodes() const {
  rvec x(n_);
  for (int k = 0; k < n_; ++k) x[k] = theta(k);
  return x;
}

LineGrid::LineGrid(int n_points, double u_min, double u_max) : n_(n_points), a_(u_min), b_(u_max) {
  if (!(u_min < u_max)) throw Error(ErrorKind::Config, "line grid needs u_min < u_max");
  if (n_ < 16) throw Error(ErrorKind::Config, "line grid needs at least 16 points");
}

rvec LineGrid::nodes() const {
  rvec x(n_);
  for (int k = 0; k < n_; ++k) x[k] = u(k);
  return x;
}

namespace {

std::mutex planner_mutex;

cvec run_fft(const cvec& x, int sign) {
  const int n = static_cast<int>(x.size());
  cvec out(n);
  if (n == 0) return out;
  cvec in = x;
  auto* pin = reinterpret_cast<fftw_complex*>(in.data());
  auto* pout = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_1d(n, pin, pout, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

cvec fft(const cvec& x) { return run_fft(x, FFTW_FORWARD); }
cvec ifft(const cvec& x) { return run_fft(x, FFTW_BACKWARD); }

cvec fourier_coefficients(const cvec& samples) {
  cvec a = fft(samples);
  const double s = 1.0 / static_cast<double>(samples.size());
  for (auto& v : a) v *= s;
  return a;
}

cvec fourier_coefficients(const rvec& samples) {
  return fourier_coefficients(cvec(samples.begin(), samples.end()));
}

cvec from_coefficients(const cvec& coeffs) { return ifft(coeffs); }

cvec periodic_derivative(const cvec& samples, int order) {
  const int n = static_cast<int>(samples.size());
  if (!is_power_of_two(n)) throw Error(ErrorKind::Config, "periodic_derivative needs a power-of-two grid");
  if (order < 0 || order > 4) throw Error(ErrorKind::Config, "derivative order must be in 0..4");
  cvec a = fourier_coefficients(samples);
  for (int k = 0; k < n; ++k) {
    const int m = mode_index(k, n);
    if (k == n / 2 && order % 2 == 1) {
      a[k] = 0.0;
      continue;
    }
    a[k] *= std::pow(I * static_cast<double>(m), order);
  }
  return from_coefficients(a);
}

rvec periodic_derivative(const rvec& samples, int order) {
  cvec d = periodic_derivative(cvec(samples.begin(), samples.end()), order);
  rvec out(d.size());
  for (size_t k = 0; k < d.size(); ++k) out[k] = d[k].real();
  return out;
}

cplx periodic_integral(const cvec& samples) {
  cplx s = 0.0;
  for (const auto& v : samples) s += v;
  return s * (two_pi / static_cast<double>(samples.size()));
}

double periodic_integral(const rvec& samples) {
  double s = 0.0;
  for (double v : samples) s += v;
  return s * (two_pi / static_cast<double>(samples.size()));
}

cplx trig_eval(const cvec& coeffs, double x) {
  const int n = static_cast<int>(coeffs.size());
  const cplx e = std::polar(1.0, x);
  const cplx einv = std::conj(e);
  cplx sum = coeffs[0];
  cplx ep = 1.0, em = 1.0;
  for (int m = 1; m < n / 2; ++m) {
    ep *= e;
    em *= einv;
    sum += coeffs[m] * ep + coeffs[n - m] * em;
  }
  ep *= e;
  em *= einv;
  sum += 0.5 * coeffs[n / 2] * (ep + em);
  return sum;
}

double trig_eval_real(const cvec& coeffs, double x) { return trig_eval(coeffs, x).real(); }

double spectral_tail(const cvec& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  double tail = 0.0;
  for (int k = 0; k < n; ++k)
    if (std::abs(mode_index(k, n)) > 3 * n / 8) tail = std::max(tail, std::abs(coeffs[k]));
  return tail;
}

LineTransform line_fourier_transform(const rvec& samples, const LineGrid& grid, int pad) {
  const int n = grid.size();
  if (static_cast<int>(samples.size()) != n) throw Error(ErrorKind::Config, "sample count does not match line grid");
  if (pad < 1) throw Error(ErrorKind::Config, "padding factor must be positive");
  const int m = n * pad;
  const double h = grid.spacing();
  cvec buf(m, 0.0);
  for (int k = 0; k < n; ++k) buf[k] = samples[k];
  cvec sums = ifft(buf);

  LineTransform out;
  out.omega.resize(m);
  out.values.resize(m);
  for (int j = 0; j < m; ++j) {
    const int sj = j - m / 2 + 1;
    const int slot = sj >= 0 ? sj : sj + m;
    const double w = two_pi * sj / (m * h);
    out.omega[j] = w;
    out.values[j] = h * std::polar(1.0, w * grid.u_min()) * sums[slot];
  }
  out.boundary_decayed = std::abs(samples.front()) < 1e-12 && std::abs(samples.back()) < 1e-12;
  return out;
}

template <class V>
static V cumulative_cubic_impl(const V& y, double h) {
  const int n = static_cast<int>(y.size()) - 1;
  if (n < 3) throw Error(ErrorKind::Config, "cumulative rule needs at least four nodes");
  V out(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    typename V::value_type piece;
    if (k == 0)
      piece = 9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3];
    else if (k == n - 1)
      piece = y[n - 3] - 5.0 * y[n - 2] + 19.0 * y[n - 1] + 9.0 * y[n];
    else
      piece = -y[k - 1] + 13.0 * y[k] + 13.0 * y[k + 1] - y[k + 2];
    out[k + 1] = out[k] + piece * h / 24.0;
  }
  return out;
}

cvec cumulative_cubic(const cvec& y, double h) { return cumulative_cubic_impl(y, h); }
rvec cumulative_cubic(const rvec& y, double h) { return cumulative_cubic_impl(y, h); }

}  // namespace cftdist
