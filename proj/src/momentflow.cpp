#include "cftdist/momentflow.hpp"

#include <boost/math/differentiation/finite_difference.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <memory>
#include <sstream>

#include "cftdist/specfun.hpp"

namespace cftdist {

namespace {

double lagrange4(const rvec& y, double h, double x) {
  const int last = static_cast<int>(y.size()) - 1;
  int j = static_cast<int>(std::floor(x / h)) - 1;
  j = std::clamp(j, 0, last - 3);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (x - (j + b) * h) / ((j + a - j - b) * h);
    s += w * y[j + a];
  }
  return s;
}

double sup_abs(const rvec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void require_c(double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::Parameter, "central charge must be positive");
}

// integral of q over the support of f
template <class Fn>
double support_integral(const LineField& f, Fn q, double tol = 1e-12) {
  using namespace boost::math::quadrature;
  const double lo = f.support_lo, hi = f.support_hi;
  if (std::isfinite(lo) && std::isfinite(hi)) return tanh_sinh<double>().integrate(q, lo, hi, tol);
  if (std::isfinite(lo)) return exp_sinh<double>().integrate(q, lo, HUGE_VAL, tol);
  if (std::isfinite(hi)) return exp_sinh<double>().integrate(q, -HUGE_VAL, hi, tol);
  return sinh_sinh<double>().integrate(q, tol);
}

}  // namespace

// ---------------------------------------------------------------- ShiftedGamma

double ShiftedGamma::pdf(double x) const { return pdf_from_edge(x + sigma); }

double ShiftedGamma::pdf_from_edge(double y) const {
  if (y < 0.0) return 0.0;
  if (y == 0.0) return alpha < 1.0 ? HUGE_VAL : (alpha == 1.0 ? beta : 0.0);
  return std::exp(alpha * std::log(beta) + (alpha - 1.0) * std::log(y) - beta * y - std::lgamma(alpha));
}

double ShiftedGamma::log_mgf(double mu) const {
  if (mu >= beta) throw Error(ErrorKind::Divergence, "shifted Gamma MGF diverges for mu >= beta", mu);
  return -mu * sigma - alpha * std::log1p(-mu / beta);
}

double ShiftedGamma::mgf(double mu) const { return std::exp(log_mgf(mu)); }

cplx ShiftedGamma::charfun(double t) const {
  return std::exp(-I * t * sigma - alpha * std::log(1.0 - I * t / beta));
}

double ShiftedGamma::cumulant(int k) const {
  if (k < 1) throw Error(ErrorKind::Parameter, "cumulant order must be positive");
  if (k == 1) return alpha / beta - sigma;
  return alpha * std::tgamma(k) / std::pow(beta, k);
}

double ShiftedGamma::moment(int k) const {
  if (k < 0) throw Error(ErrorKind::Parameter, "moment order must be nonnegative");
  rvec m(k + 1, 0.0);
  m[0] = 1.0;
  for (int n = 1; n <= k; ++n)
    for (int j = 1; j <= n; ++j) m[n] += binomial(n - 1, j - 1) * cumulant(j) * m[n - j];
  return m[k];
}

ShiftedGamma fit_shifted_gamma(double kappa2, double kappa3) {
  if (!(kappa2 > 0.0) || !(kappa3 > 0.0))
    throw Error(ErrorKind::Precondition, "shifted Gamma fit needs positive second and third cumulants");
  ShiftedGamma g;
  g.beta = 2.0 * kappa2 / kappa3;
  g.alpha = kappa2 * g.beta * g.beta;
  g.sigma = g.alpha / g.beta;
  return g;
}

// ---------------------------------------------------------------- families

const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Gaussian: return "gaussian";
    case FamilyKind::Lorentzian: return "lorentzian";
    case FamilyKind::InvGamma: return "invgamma";
    case FamilyKind::Numeric: return "numeric";
  }
  return "?";
}

FlowFamily gaussian_family(double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::Parameter, "Gaussian width must be positive");
  FlowFamily f;
  f.kind = FamilyKind::Gaussian;
  f.tau = tau;
  return f;
}

FlowFamily lorentzian_family(int n, double b0) {
  if (n < 1) throw Error(ErrorKind::Parameter, "Lorentzian power must be a positive integer");
  if (!(b0 > 0.0)) throw Error(ErrorKind::Parameter, "Lorentzian width must be positive");
  FlowFamily f;
  f.kind = FamilyKind::Lorentzian;
  f.n = n;
  f.b0 = b0;
  return f;
}

FlowFamily invgamma_family(double gamma, double b0) {
  if (!(gamma > 1.0)) throw Error(ErrorKind::Parameter, "inverse-Gamma power must exceed 1");
  if (!(b0 > 0.0)) throw Error(ErrorKind::Parameter, "inverse-Gamma scale must be positive");
  FlowFamily f;
  f.kind = FamilyKind::InvGamma;
  f.gamma = gamma;
  f.b0 = b0;
  return f;
}

double FlowFamily::amplitude() const {
  switch (kind) {
    case FamilyKind::Gaussian: return 1.0 / (tau * std::sqrt(pi));
    case FamilyKind::Lorentzian: return std::pow(b0, 2 * n - 1) / (pi * kappa_gamma_form(n));
    case FamilyKind::InvGamma: return std::pow(b0, gamma - 1.0) / std::tgamma(gamma - 1.0);
    default: throw Error(ErrorKind::Precondition, "numeric family has no closed form");
  }
}

double FlowFamily::blowup() const {
  switch (kind) {
    case FamilyKind::Gaussian: return pi * tau * tau;
    case FamilyKind::Lorentzian: return 4.0 * n * pi * b0 * b0 / (4.0 * n * n - 1.0);
    case FamilyKind::InvGamma: return two_pi * b0 * b0 / ((gamma * gamma - 1.0) * gamma);
    default: throw Error(ErrorKind::Precondition, "numeric family has no closed form");
  }
}

double FlowFamily::width(double lambda) const {
  const double beta = blowup();
  if (!(lambda < beta)) throw Error(ErrorKind::Divergence, "flow parameter at or beyond the blow-up", lambda);
  switch (kind) {
    case FamilyKind::Gaussian: return tau;
    case FamilyKind::Lorentzian: return b0 * std::pow(1.0 - lambda / beta, 1.0 / (2 * n + 1));
    default: return mu0() * std::pow(1.0 - lambda / beta, 1.0 / (gamma + 1.0));
  }
}

LineField FlowFamily::at(double lambda) const {
  const double w = width(lambda);
  const double a = amplitude();
  LineField f;
  f.name = name();
  switch (kind) {
    case FamilyKind::Gaussian: {
      const double amp = tau * std::sqrt(pi) / (pi * tau * tau - lambda);
      const double t = tau;
      f.g = [amp, t](double u) { return amp * std::exp(-(u / t) * (u / t)); };
      break;
    }
    case FamilyKind::Lorentzian: {
      const int p = n;
      f.g = [a, w, p](double u) { return a / std::pow(w * w + u * u, p); };
      break;
    }
    default: {
      const double g = gamma, b = gamma * w;
      f.g = [a, w, g, b](double u) {
        const double x = u - w;
        return x <= 0.0 ? 0.0 : a * std::exp(-b / x - g * std::log(x));
      };
      f.support_lo = w;
    }
  }
  return f;
}

std::string FlowFamily::name() const {
  std::ostringstream s;
  switch (kind) {
    case FamilyKind::Gaussian: s << "gaussian(tau=" << tau << ")"; break;
    case FamilyKind::Lorentzian: s << "lorentzian(n=" << n << ",b0=" << b0 << ")"; break;
    case FamilyKind::InvGamma: s << "invgamma(gamma=" << gamma << ",b0=" << b0 << ")"; break;
    default: s << "numeric";
  }
  return s.str();
}

ShiftedGamma shifted_gamma_params(const FlowFamily& fam, double c) {
  require_c(c);
  ShiftedGamma g;
  g.beta = fam.blowup();
  switch (fam.kind) {
    case FamilyKind::Gaussian: g.alpha = c / 24.0; break;
    case FamilyKind::Lorentzian: {
      const double n = fam.n;
      g.alpha = c * n * n / (12.0 * (2.0 * n + 1.0) * (n + 1.0));
      break;
    }
    case FamilyKind::InvGamma: g.alpha = c * (fam.gamma + 2.0) / (24.0 * (fam.gamma + 1.0)); break;
    default: throw Error(ErrorKind::Precondition, "numeric family has no closed-form parameters");
  }
  g.sigma = g.alpha / g.beta;
  return g;
}

// ---------------------------------------------------------------- Cayley frame

LineField CayleyFrame::to_line(const CircleField& f, double shift, double scale) {
  const LineField g = cayley_push(f);
  LineField out;
  const double m = shift, s = scale;
  out.g = [g, m, s](double u) { return s * g((u - m) / s); };
  out.name = g.name;
  return out;
}

CayleyFrame cayley_frame(const LineField& f, const FlowOptions& opts) {
  double shift = 0.0, scale = 1.0;
  LineField g = f;
  if (f.compact()) {
    shift = 0.5 * (f.support_lo + f.support_hi);
    scale = 0.5 * (f.support_hi - f.support_lo);
    g = affine_normalize(f);
  }
  int n = opts.min_points;
  for (;;) {
    CircleField F = cayley_pull(g, PeriodicGrid(n));
    if (F.resolution_tail() <= opts.resolve_tol || 2 * n > opts.max_points) return {shift, scale, std::move(F)};
    n *= 2;
  }
}

namespace {

rvec star_samples(const CircleField& F) {
  const PeriodicGrid& grid = F.grid();
  const int n = grid.size();
  const rvec& s = F.samples();
  cvec a = F.coeffs();
  cvec hv(n), dhv(n), dv(n);
  for (int k = 0; k < n; ++k) {
    const int m = mode_index(k, n);
    const cplx v = two_pi * a[k];
    if (2 * m == n) {
      hv[k] = dhv[k] = dv[k] = 0.0;
      continue;
    }
    hv[k] = -I * double((m > 0) - (m < 0)) * v;
    dhv[k] = double(std::abs(m)) * v;
    dv[k] = I * double(m) * v;
  }
  const cvec Hv = from_coefficients(hv), dHv = from_coefficients(dhv), Dv = from_coefficients(dv);

  // moments of Phi = f(tan(theta/2)) = v / (1 + cos theta)
  double phi0 = 0.0, phisin = 0.0, phitan = 0.0;
  for (int k = 0; k < n; ++k) {
    const double ch = std::cos(0.5 * grid.theta(k)), sh = std::sin(0.5 * grid.theta(k));
    if (2 * k == n) continue;  // theta = pi, where Phi and Phi tan vanish
    const double v = two_pi * s[k];
    const double phi = v / (2.0 * ch * ch);
    phi0 += phi;
    phisin += v * sh / ch;
    phitan += phi * sh / ch;
  }
  phi0 /= n;
  phisin /= n;
  phitan /= n;

  rvec out(n);
  for (int k = 0; k < n; ++k) {
    const double th = grid.theta(k);
    const double sn = std::sin(th), cs = std::cos(th);
    const double d = 0.5 * Hv[k].real() - 0.5 * phisin - 0.5 * phi0 * sn - 0.5 * phitan * (1.0 + cs);
    const double dd = 0.5 * dHv[k].real() - 0.5 * phi0 * cs + 0.5 * phitan * sn;
    const double v = two_pi * s[k];
    out[k] = (v * dd - Dv[k].real() * d) / two_pi;
  }
  return out;
}

}  // namespace

CircleField line_star_circle(const CircleField& F) {
  return CircleField::from_samples(F.grid(), star_samples(F), "star(" + F.name() + ")");
}

double circle_variance(const CircleField& F, double c) {
  require_c(c);
  const cvec& a = F.coeffs();
  const int n = F.grid().size();
  double s = 0.0;
  for (int m = 2; m < n / 2; ++m) s += (double(m) * m * m - m) * std::norm(a[m]);
  return 4.0 * pi * pi * c / 12.0 * s;
}

double circle_variance_rate(const CircleField& F, double c) {
  require_c(c);
  const cvec& a = F.coeffs();
  const CircleField S = line_star_circle(F);
  const cvec& b = S.coeffs();
  const int n = F.grid().size();
  double s = 0.0;
  for (int m = 2; m < n / 2; ++m) s += (double(m) * m * m - m) * (a[m] * std::conj(b[m])).real();
  return 8.0 * pi * pi * c / 12.0 * s;
}

LineField star(const LineField& f, const FlowOptions& opts) {
  const CayleyFrame fr = cayley_frame(f, opts);
  LineField out = fr.to_line(line_star_circle(fr.field));
  out.name = "star(" + f.name + ")";
  return out;
}

double star_direct(const LineField& f, double u) {
  using boost::math::differentiation::finite_difference_derivative;
  auto fn = [&f](double x) { return f(x); };
  auto d1 = [&](double x) { return finite_difference_derivative(fn, x); };
  const double fu = f(u), du = d1(u);
  if (fu == 0.0 && du == 0.0) return 0.0;
  const double d2u = finite_difference_derivative(d1, u);
  const double diag = du * du - d2u * fu;
  auto q = [&](double w) {
    const double gap = w - u;
    if (std::abs(gap) < 1e-6 * (1.0 + std::abs(u))) return diag;
    return (f(w) * du - d1(w) * fu) / gap;
  };
  const double lo = f.support_lo, hi = f.support_hi;
  using namespace boost::math::quadrature;
  auto piece = [&](double a, double b) {
    if (!(a < b)) return 0.0;
    if (std::isfinite(a) && std::isfinite(b)) return tanh_sinh<double>().integrate(q, a, b, 1e-10);
    return exp_sinh<double>().integrate(q, a, b, 1e-10);
  };
  const double left = std::clamp(u, lo, hi);
  return (piece(lo, left) + piece(left, hi)) / two_pi;
}

// ---------------------------------------------------------------- flow

double FlowChart::x(double s) const {
  switch (kind) {
    case Kind::Linear: return anchor + width * s;
    case Kind::Sinh: return anchor + width * std::sinh(s);
    case Kind::Exp: return anchor + width * std::exp(s);
    case Kind::ReverseExp: return anchor - width * std::exp(-s);
    case Kind::Tanh: return anchor + width * std::tanh(s);
  }
  return anchor;
}

double FlowChart::dx(double s) const {
  switch (kind) {
    case Kind::Linear: return width;
    case Kind::Sinh: return width * std::cosh(s);
    case Kind::Exp: return width * std::exp(s);
    case Kind::ReverseExp: return width * std::exp(-s);
    case Kind::Tanh: return width / (std::cosh(s) * std::cosh(s));
  }
  return width;
}

namespace {

// First derivative on a uniform grid: central differences of order 2p with
// p = min(6, distance to the end), one-sided second order at the ends.
rvec grid_derivative(const rvec& y, double h) {
  static const auto weights = [] {
    std::vector<rvec> w(7);
    for (int p = 1; p <= 6; ++p)
      for (int k = 1; k <= p; ++k)
        w[p].push_back((k % 2 ? 1.0 : -1.0) *
                       std::exp(2.0 * std::lgamma(p + 1.0) - std::lgamma(p - k + 1.0) - std::lgamma(p + k + 1.0)) / k);
    return w;
  }();
  const int n = static_cast<int>(y.size());
  rvec d(n);
  for (int i = 0; i < n; ++i) {
    const int p = std::min({i, n - 1 - i, 6});
    double s = 0.0;
    if (p > 0)
      for (int k = 1; k <= p; ++k) s += weights[p][k - 1] * (y[i + k] - y[i - k]);
    else if (i == 0)
      s = 0.5 * (-3.0 * y[0] + 4.0 * y[1] - y[2]);
    else
      s = 0.5 * (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]);
    d[i] = s / h;
  }
  return d;
}

struct ChartGrid {
  FlowChart chart;
  rvec s, x, dx, q;
  double h = 0.1;
};

// Chart adapted to the support and tail of f, with the s range cut where the
// s-frame field q = f / X' falls below 1e-17 of its peak.
ChartGrid choose_chart(const LineField& f, double spacing) {
  using K = FlowChart::Kind;
  const double lo = f.support_lo, hi = f.support_hi;
  rvec u;
  if (f.compact()) {
    for (int k = 0; k <= 2000; ++k) u.push_back(lo + (hi - lo) * k / 2000.0);
  } else {
    for (int k = -480; k <= 480; ++k) {
      const double r = std::pow(10.0, k / 40.0);
      if (std::isfinite(lo)) u.push_back(lo + r);
      else if (std::isfinite(hi)) u.push_back(hi - r);
      else {
        u.push_back(r);
        u.push_back(-r);
      }
    }
    if (!std::isfinite(lo) && !std::isfinite(hi)) u.push_back(0.0);
    std::sort(u.begin(), u.end());
  }
  double fmax = 0.0, um = 0.0;
  for (double x : u)
    if (std::abs(f(x)) > fmax) {
      fmax = std::abs(f(x));
      um = x;
    }
  if (!(fmax > 0.0) || !std::isfinite(fmax)) throw Error(ErrorKind::Precondition, "flow needs a nonzero finite field");
  double left = um, right = um;
  for (double x : u)
    if (x < um && std::abs(f(x)) < 0.5 * fmax) left = x;
  for (auto it = u.rbegin(); it != u.rend(); ++it)
    if (*it > um && std::abs(f(*it)) < 0.5 * fmax) right = *it;
  double half = 0.5 * (right - left);
  if (!(half > 0.0)) half = 1.0;

  ChartGrid g;
  g.h = spacing;
  double s_lo = 0.0, s_hi = 0.0;
  bool search_lo = true, search_hi = true;
  if (f.compact()) {
    g.chart = {K::Tanh, 0.5 * (lo + hi), 0.5 * (hi - lo)};
    g.h = 0.5 * spacing;
    s_hi = std::atanh(1.0 - 1e-12);
    s_lo = -s_hi;
    search_lo = search_hi = false;
  } else if (std::isfinite(lo)) {
    g.chart = {K::Exp, lo, um > lo ? um - lo : 1.0};
    s_lo = std::log(1e-12);
    search_lo = false;
  } else if (std::isfinite(hi)) {
    g.chart = {K::ReverseExp, hi, um < hi ? hi - um : 1.0};
    s_hi = -std::log(1e-12);
    search_hi = false;
  } else {
    const bool fast = std::abs(f(um + 40.0 * half)) < 1e-30 * fmax && std::abs(f(um - 40.0 * half)) < 1e-30 * fmax;
    g.chart = {fast ? K::Linear : K::Sinh, um, half};
  }
  auto q = [&](double s) { return f(g.chart.x(s)) / g.chart.dx(s); };
  double qmax = 0.0;
  for (double s = -40.0; s <= 40.0; s += g.h) {
    const double v = std::abs(q(s));
    if (std::isfinite(v)) qmax = std::max(qmax, v);
  }
  auto small = [&](double s) {
    const double v = q(s);
    return std::isfinite(v) && std::abs(v) < 1e-17 * qmax;
  };
  if (search_hi) {
    s_hi = std::max(0.0, s_lo + g.h);
    while (!small(s_hi) || !small(s_hi + 1.0)) {
      s_hi += 0.5;
      if (s_hi > 200.0) throw Error(ErrorKind::Precondition, "field does not decay fast enough for the flow chart");
    }
  }
  if (search_lo) {
    s_lo = std::min(0.0, s_hi - g.h);
    while (!small(s_lo) || !small(s_lo - 1.0)) {
      s_lo -= 0.5;
      if (s_lo < -200.0) throw Error(ErrorKind::Precondition, "field does not decay fast enough for the flow chart");
    }
  }
  const int n = static_cast<int>(std::ceil((s_hi - s_lo) / g.h)) + 1;
  for (int i = 0; i < n; ++i) {
    const double s = s_lo + i * g.h;
    g.s.push_back(s);
    g.x.push_back(g.chart.x(s));
    g.dx.push_back(g.chart.dx(s));
    const double v = f(g.x.back()) / g.dx.back();
    g.q.push_back(std::isfinite(v) ? v : 0.0);
  }
  return g;
}

struct FlowState {
  rvec psi, dpsi, velocity;
};

// d psi_i / d lambda = (1/2 pi) p.v. int q psi_s^2 / (psi_i - psi(s')) ds' by
// the alternate-point trapezoid rule.
FlowState flow_rhs(const ChartGrid& g, const rvec& eta) {
  const int n = static_cast<int>(eta.size());
  FlowState st;
  st.psi.resize(n);
  st.dpsi = grid_derivative(eta, g.h);
  for (int i = 0; i < n; ++i) {
    st.psi[i] = g.x[i] + eta[i];
    st.dpsi[i] += g.dx[i];
  }
  rvec w(n);
  for (int j = 0; j < n; ++j) {
    w[j] = g.q[j] * st.dpsi[j] * st.dpsi[j];
    if (g.q[j] != 0.0 && !(st.dpsi[j] > 0.0))
      throw Error(ErrorKind::Degenerate, "flow particle paths crossed", st.dpsi[j]);
  }
  st.velocity.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = (i + 1) % 2; j < n; j += 2)
      if (w[j] != 0.0) sum += w[j] / (st.psi[i] - st.psi[j]);
    st.velocity[i] = g.h / pi * sum;
  }
  return st;
}

// (1/24 pi) int f'(u) D''(u) du = -(1/24 pi) int (f')_s D'(u) ds with D the velocity.
double lagrangian_variance(const ChartGrid& g, const FlowState& st, rvec* values) {
  const int n = static_cast<int>(st.psi.size());
  rvec f(n);
  for (int i = 0; i < n; ++i) f[i] = g.q[i] * st.dpsi[i];
  rvec fp = grid_derivative(f, g.h), vp = grid_derivative(st.velocity, g.h);
  for (int i = 0; i < n; ++i) {
    fp[i] /= st.dpsi[i];
    vp[i] /= st.dpsi[i];
  }
  const rvec fpp = grid_derivative(fp, g.h);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += fpp[i] * vp[i];
  if (values) *values = std::move(f);
  return -g.h * s / (24.0 * pi);
}

}  // namespace

double NumericFlow::value(size_t k, double u) const {
  const rvec& p = psi.at(k);
  const rvec& v = values.at(k);
  const int n = static_cast<int>(p.size());
  if (u < p.front() || u > p.back()) return 0.0;
  int i = static_cast<int>(std::upper_bound(p.begin(), p.end(), u) - p.begin()) - 1;
  const int j0 = std::clamp(i - 2, 0, n - 6);
  double s = 0.0;
  for (int a = j0; a < j0 + 6; ++a) {
    double w = 1.0;
    for (int b = j0; b < j0 + 6; ++b)
      if (b != a) w *= (u - p[b]) / (p[a] - p[b]);
    s += w * v[a];
  }
  return s;
}

LineField NumericFlow::field(size_t k) const {
  auto self = std::make_shared<NumericFlow>();
  self->chart = chart;
  self->s = s;
  self->lambda = {lambda.at(k)};
  self->psi = {psi.at(k)};
  self->values = {values.at(k)};
  LineField out;
  out.g = [self](double u) { return self->value(0, u); };
  out.name = "flow";
  return out;
}

NumericFlow flow_integrate(const LineField& f0, double lambda_max, int steps, const FlowOptions& opts) {
  if (steps < 1) throw Error(ErrorKind::Config, "flow needs at least one step");
  if (!(opts.spacing > 0.0)) throw Error(ErrorKind::Config, "flow spacing must be positive");
  const ChartGrid g = choose_chart(f0, opts.spacing);
  const int n = static_cast<int>(g.s.size());
  const double h = lambda_max / steps;
  double qmax = 0.0;
  for (double v : g.q) qmax = std::max(qmax, std::abs(v));
  // grid-scale modes grow or rotate at about q pi / (2 h_s)
  const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(h) * qmax * pi / (2.0 * g.h))));
  const double hs = h / sub;

  NumericFlow out;
  out.chart = g.chart;
  out.s = g.s;
  rvec eta(n, 0.0);
  FlowState st = flow_rhs(g, eta);
  auto record = [&](double lam) {
    rvec f;
    out.unit_variance.push_back(lagrangian_variance(g, st, &f));
    out.lambda.push_back(lam);
    out.psi.push_back(st.psi);
    out.values.push_back(std::move(f));
  };
  record(0.0);
  auto singular = [&](double lam) {
    std::ostringstream msg;
    msg << "flow singularity after lambda = " << lam;
    return Error(ErrorKind::Divergence, msg.str(), lam);
  };
  for (int step = 0; step < steps; ++step) {
    try {
      for (int j = 0; j < sub; ++j) {
        const rvec& k1 = st.velocity;
        rvec tmp(n);
        for (int i = 0; i < n; ++i) tmp[i] = eta[i] + 0.5 * hs * k1[i];
        const rvec k2 = flow_rhs(g, tmp).velocity;
        for (int i = 0; i < n; ++i) tmp[i] = eta[i] + 0.5 * hs * k2[i];
        const rvec k3 = flow_rhs(g, tmp).velocity;
        for (int i = 0; i < n; ++i) tmp[i] = eta[i] + hs * k3[i];
        const rvec k4 = flow_rhs(g, tmp).velocity;
        for (int i = 0; i < n; ++i) eta[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        st = flow_rhs(g, eta);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      throw singular(step * h);
    }
    const double before = sup_abs(out.values.back());
    record((step + 1) * h);
    const double after = sup_abs(out.values.back());
    if (!std::isfinite(after) || after > 2.0 * before) throw singular(step * h);
  }
  return out;
}

// ---------------------------------------------------------------- variance and W

double variance(const LineField& f, double c, const LineGrid& grid, int pad) {
  require_c(c);
  const LineTransform tr = line_fourier_transform(f.sample(grid), grid, pad);
  const int m = static_cast<int>(tr.omega.size());
  const int j0 = m / 2 - 1;  // omega = 0
  rvec y;
  for (int j = j0; j < m; ++j) y.push_back(std::pow(tr.omega[j], 3) * std::norm(tr.values[j]));
  if (y.size() % 2 == 0) y.pop_back();
  const double h = tr.omega[j0 + 1] - tr.omega[j0];
  double s = y.front() + y.back();
  for (size_t k = 1; k + 1 < y.size(); ++k) s += (k % 2 ? 4.0 : 2.0) * y[k];
  return c / (48.0 * pi * pi) * s * h / 3.0;
}

double variance(const LineField& f, double c, const FlowOptions& opts) {
  return circle_variance(cayley_frame(f, opts).field, c);
}

rvec MgfResult::mgf() const {
  rvec out(log_mgf.size());
  for (size_t k = 0; k < out.size(); ++k) out[k] = std::exp(log_mgf[k]);
  return out;
}

namespace {

// W at the requested mu of one sign, from a flow of `steps` RK4 steps to `end`.
rvec w_on_side(const LineField& f, double c, const rvec& mu, double end, int steps, const FlowOptions& opts) {
  rvec out(mu.size(), 0.0);
  if (end == 0.0) return out;
  steps = std::max(steps, 4);
  const NumericFlow fl = flow_integrate(f, end, steps, opts);
  const double h = end / steps;
  rvec V(steps + 1), lV(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    V[k] = c * fl.unit_variance[k];
    lV[k] = fl.lambda[k] * V[k];
  }
  const rvec I0 = cumulative_cubic(V, h), I1 = cumulative_cubic(lV, h);
  rvec W(steps + 1);
  for (int k = 0; k <= steps; ++k) W[k] = fl.lambda[k] * I0[k] - I1[k];
  // interpolate in |lambda|
  for (size_t i = 0; i < mu.size(); ++i) out[i] = lagrange4(W, std::abs(h), std::abs(mu[i]));
  return out;
}

}  // namespace

MgfResult mgf(const LineField& f, double c, const rvec& mu_grid, const FlowOptions& opts) {
  require_c(c);
  MgfResult r;
  r.mu = mu_grid;
  double hi = 0.0, lo = 0.0;
  for (double m : mu_grid) {
    hi = std::max(hi, m);
    lo = std::min(lo, m);
  }
  rvec pos, neg;
  std::vector<size_t> ipos, ineg;
  for (size_t i = 0; i < mu_grid.size(); ++i) {
    if (mu_grid[i] > 0.0) {
      pos.push_back(mu_grid[i]);
      ipos.push_back(i);
    } else if (mu_grid[i] < 0.0) {
      neg.push_back(mu_grid[i]);
      ineg.push_back(i);
    }
  }
  const double span = std::max(hi, -lo);
  auto evaluate = [&](int steps) {
    rvec W(mu_grid.size(), 0.0);
    const rvec wp = w_on_side(f, c, pos, hi, static_cast<int>(std::ceil(steps * hi / span)), opts);
    const rvec wn = w_on_side(f, c, neg, lo, static_cast<int>(std::ceil(steps * -lo / span)), opts);
    for (size_t k = 0; k < ipos.size(); ++k) W[ipos[k]] = wp[k];
    for (size_t k = 0; k < ineg.size(); ++k) W[ineg[k]] = wn[k];
    return W;
  };
  if (span == 0.0) {
    r.log_mgf.assign(mu_grid.size(), 0.0);
    return r;
  }
  int steps = opts.steps;
  rvec W = evaluate(steps);
  for (int halving = 0; halving < opts.max_halvings; ++halving) {
    const rvec W2 = evaluate(2 * steps);
    double change = 0.0;
    for (size_t k = 0; k < W.size(); ++k) change = std::max(change, std::abs(W2[k] - W[k]));
    W = W2;
    steps *= 2;
    r.step_change = change;
    if (change < opts.w_tol) break;
  }
  r.steps = steps;
  r.log_mgf = W;
  return r;
}

CumulantFit cumulant_fit(const LineField& f, double c, const FlowOptions& opts) {
  require_c(c);
  const CircleField F = cayley_frame(f, opts).field;
  CumulantFit r;
  r.kappa2 = circle_variance(F, c);
  r.kappa3 = circle_variance_rate(F, c);
  r.fit = fit_shifted_gamma(r.kappa2, r.kappa3);
  return r;
}

CumulantFit cumulant_fit(const LineField& f, double c, const rvec& mu_check, const FlowOptions& opts) {
  CumulantFit r = cumulant_fit(f, c, opts);
  const MgfResult m = mgf(f, c, mu_check, opts);
  for (size_t k = 0; k < mu_check.size(); ++k) {
    const double model = r.fit.mgf(mu_check[k]);
    r.adequacy = std::max(r.adequacy, std::abs(std::exp(m.log_mgf[k]) - model) / model);
  }
  return r;
}

// ---------------------------------------------------------------- QEI and growth

double qei_bound(const LineField& f, double c) {
  require_c(c);
  using boost::math::differentiation::finite_difference_derivative;
  auto root = [&f](double u) {
    const double v = f(u);
    if (v < 0.0) throw Error(ErrorKind::Domain, "QEI bound needs a nonnegative test function", u);
    return std::sqrt(v);
  };
  auto q = [&](double u) {
    const double d = finite_difference_derivative(root, u);
    return d * d;
  };
  return -c / (12.0 * pi) * support_integral(f, q);
}

GrowthReport moment_growth_check(const rvec& moments) {
  if (moments.size() < 7) throw Error(ErrorKind::Config, "growth check needs moments m_0..m_K with K >= 6");
  // Fit log(|m_k| / k!) = A + B k + s (k log k - k) + g log k; growth of the
  // form C D^k k! has s = 0, a factor (k!)^s beyond it shows up as s.
  auto test = [&](bool double_factorial, double* D) {
    std::vector<std::array<double, 4>> rows;
    rvec y;
    double top = 0.0;
    // moments that vanish up to rounding on the scale m_2^{k/2} carry no growth information
    const double scale = std::sqrt(std::abs(moments[2]));
    for (size_t k = 1; k < moments.size(); ++k) {
      if (std::abs(moments[k]) <= 1e-12 * std::pow(scale, double(k))) continue;
      const double nn = double(k);
      const double ly = std::log(std::abs(moments[k])) - std::lgamma((double_factorial ? 2.0 * nn : nn) + 1.0);
      top = std::max(top, std::exp(ly / nn));
      rows.push_back({1.0, nn, nn * std::log(nn) - nn, std::log(nn)});
      y.push_back(ly);
    }
    if (D) *D = top;
    if (rows.size() < 5) return true;
    Eigen::MatrixXd A(rows.size(), 4);
    Eigen::VectorXd b(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      for (int j = 0; j < 4; ++j) A(i, j) = rows[i][j];
      b(i) = y[i];
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    return x(2) < 0.5;
  };
  GrowthReport r;
  r.hamburger = test(false, &r.D);
  r.C = 1.0;
  r.stieltjes = test(true, nullptr);
  return r;
}

}  // namespace cftdist
