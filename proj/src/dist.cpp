#include "cftdist/dist.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <algorithm>
#include <cmath>

#include "cftdist/specfun.hpp"
#include "cftdist/spectral.hpp"

namespace cftdist {

SecantDist::SecantDist(double p_) : p(p_) {
  if (!(p > 0.0)) throw Error(ErrorKind::Parameter, "secant law needs p > 0");
}

double SecantDist::pdf(double x) const {
  if (std::abs(x) > 200.0) return 0.0;  // below e^{-600}
  const double lg = lgamma_complex(cplx(0.5 * p, -x)).real();
  return std::exp((p - 1.0) * std::log(2.0) - std::log(pi) - std::lgamma(p) + 2.0 * lg);
}

double SecantDist::charfun(double t) const {
  // sech^p with the large-|t| form kept finite
  const double a = 0.5 * std::abs(t);
  return std::exp(-p * (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0)));
}

double SecantDist::cumulant(int k) const {
  if (k < 1) throw Error(ErrorKind::Parameter, "cumulant order must be positive");
  if (k % 2) return 0.0;
  const int n = k / 2;
  const double b = boost::math::bernoulli_b2n<double>(n);
  return -p * (n % 2 ? -1.0 : 1.0) * (std::ldexp(1.0, 2 * n) - 1.0) * b / (2.0 * n);
}

double SecantDist::moment(int k) const {
  rvec kap(k);
  for (int j = 1; j <= k; ++j) kap[j - 1] = cumulant(j);
  return moment_from_cumulants(kap, k);
}

double moment_from_cumulants(const rvec& kappa, int k) {
  if (k < 0 || k > static_cast<int>(kappa.size())) throw Error(ErrorKind::Parameter, "not enough cumulants");
  rvec m(k + 1, 0.0);
  m[0] = 1.0;
  for (int n = 1; n <= k; ++n)
    for (int j = 1; j <= n; ++j) m[n] += binomial(n - 1, j - 1) * kappa[j - 1] * m[n - j];
  return m[k];
}

rvec secant_pdf(double p, const rvec& x) {
  const SecantDist d(p);
  rvec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = d.pdf(x[i]);
  return out;
}

double secant_charfun(double p, double t) { return SecantDist(p).charfun(t); }

namespace {

template <class F>
CharFunSamples closed_samples(F phi, double t_max, int n_t, const char* variant) {
  if (n_t < 4 || !(t_max > 0.0)) throw Error(ErrorKind::Config, "charfun grid needs n_t >= 4 and t_max > 0");
  CharFunSamples cf;
  cf.variant = variant;
  cf.field = "closed form";
  cf.t.resize(2 * n_t + 1);
  cf.values.resize(2 * n_t + 1);
  for (int k = -n_t; k <= n_t; ++k) {
    cf.t[n_t + k] = t_max * k / n_t;
    cf.values[n_t + k] = phi(cf.t[n_t + k]);
  }
  return cf;
}

}  // namespace

CharFunSamples secant_samples(double p, double t_max, int n_t) {
  const SecantDist d(p);
  return closed_samples([&](double t) { return cplx(d.charfun(t)); }, t_max, n_t, "secant");
}

CharFunSamples shifted_gamma_samples(const ShiftedGamma& g, double t_max, int n_t) {
  return closed_samples([&](double t) { return g.charfun(t); }, t_max, n_t, "shifted-gamma");
}

rvec shifted_gamma_pdf(const ShiftedGamma& g, const rvec& x) {
  rvec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = g.pdf(x[i]);
  return out;
}

double shifted_gamma_mgf(const ShiftedGamma& g, double mu) { return g.mgf(mu); }

double EmpiricalDensity::operator()(double v) const {
  if (v < x.front() || v > x.back()) return 0.0;
  const double h = spacing();
  const size_t i = std::min(static_cast<size_t>((v - x.front()) / h), x.size() - 2);
  const double s = (v - x[i]) / h;
  return (1.0 - s) * pdf[i] + s * pdf[i + 1];
}

cplx EmpiricalDensity::charfun(double t) const {
  cplx s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += pdf[i] * std::exp(I * t * x[i]);
  return s * spacing();
}

double EmpiricalDensity::moment(int k) const {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += pdf[i] * std::pow(x[i], k);
  return s * spacing();
}

bool EmpiricalDensity::valid() const { return min_value >= -1e-6 && std::abs(mass - 1.0) <= 1e-4; }

EmpiricalDensity invert_charfun(const CharFunSamples& cf, const InversionOptions& opts) {
  if (opts.pad < 1) throw Error(ErrorKind::Config, "inversion padding must be at least 1");
  if (!(opts.window_fraction > 0.0 && opts.window_fraction < 1.0))
    throw Error(ErrorKind::Config, "window fraction must lie in (0, 1)");
  const int n = cf.zero_index();
  if (n < 4) throw Error(ErrorKind::Config, "charfun grid too short to invert");
  const double tail = std::max(std::abs(cf.values.front()), std::abs(cf.values.back()));
  if (tail > 0.999)
    throw Error(ErrorKind::Precondition, "charfun does not decay on its grid; no density to recover", tail);
  const double dt = cf.step();
  const double t_max = n * dt;
  const int len = 2 * n * opts.pad;
  const double t0 = (1.0 - opts.window_fraction) * t_max;
  cvec y(len, 0.0);
  for (int k = -n; k <= n; ++k) {
    const double t = std::abs(k * dt);
    double w = 1.0;
    if (t > t0) w = 0.5 * (1.0 + std::cos(pi * (t - t0) / (t_max - t0)));
    if (std::abs(k) == n) w *= 0.5;
    y[(k + len) % len] += w * cf.values[n + k];
  }
  const cvec z = fft(y);
  const double dx = two_pi / (len * dt);
  EmpiricalDensity d;
  for (int j = -len / 2 + 1; j <= len / 2; ++j) {
    const double x = j * dx;
    if (opts.x_max > 0.0 && std::abs(x) > opts.x_max) continue;
    d.x.push_back(x);
    d.pdf.push_back(z[(j + len) % len].real() * dt / two_pi);
  }
  d.source = cf.variant + ":" + cf.field;
  d.window = "raised-cosine";
  d.window_bias = tail > 1e-8;
  double peak = 0.0;
  for (double v : d.pdf) peak = std::max(peak, v);
  d.min_value = *std::min_element(d.pdf.begin(), d.pdf.end());
  for (double v : d.pdf) d.mass += v;
  d.mass *= dx;
  d.support_min = d.x.front();
  for (size_t i = 0; i < d.x.size(); ++i)
    if (d.pdf[i] >= 0.5 * peak) {
      d.support_min = d.x[i];
      break;
    }
  return d;
}

namespace {

// The sum has density at distance l above the joint edge
//   C l^{a1 + a2 - 1} e^{-b2 l} 1F1(a1; a1 + a2; (b2 - b1) l),
// C = b1^a1 b2^a2 / Gamma(a1 + a2). Returns it without the power of l.
double convolved_reduced(const ShiftedGamma& a, const ShiftedGamma& b, double l) {
  const double s = a.alpha + b.alpha;
  const double logc = a.alpha * std::log(a.beta) + b.alpha * std::log(b.beta) - std::lgamma(s);
  if (std::min(a.beta, b.beta) * l > 745.0) return 0.0;
  // 1F1(a; c; z) = e^z 1F1(c - a; c; -z) keeps the argument nonpositive
  if (b.beta >= a.beta)
    return std::exp(logc - a.beta * l) * boost::math::hypergeometric_1F1(b.alpha, s, (a.beta - b.beta) * l);
  return std::exp(logc - b.beta * l) * boost::math::hypergeometric_1F1(a.alpha, s, (b.beta - a.beta) * l);
}

}  // namespace

double ConvolvedDist::pdf(double x) const {
  if (closed) return closed_form.pdf(x);
  const double l = x - support_min();
  if (!(l > 0.0)) return 0.0;
  return std::pow(l, first.alpha + second.alpha - 1.0) * convolved_reduced(first, second, l);
}

double ConvolvedDist::mass() const {
  // l = s^{1/alpha} removes the edge singularity
  const double alpha = first.alpha + second.alpha;
  auto f = [&](double s) { return convolved_reduced(first, second, std::pow(s, 1.0 / alpha)) / alpha; };
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  return near.integrate(f, 0.0, 1.0) + far.integrate(f, 1.0, std::numeric_limits<double>::infinity());
}

ConvolvedDist convolve(const ShiftedGamma& a, const ShiftedGamma& b) {
  for (const ShiftedGamma* g : {&a, &b})
    if (!(g->alpha > 0.0) || !(g->beta > 0.0)) throw Error(ErrorKind::Parameter, "shifted Gamma needs alpha, beta > 0");
  ConvolvedDist d;
  d.first = a;
  d.second = b;
  if (a.beta == b.beta) {
    d.closed = true;
    d.closed_form = {a.alpha + b.alpha, a.beta, a.sigma + b.sigma};
  }
  return d;
}

}  // namespace cftdist
