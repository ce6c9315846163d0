#include "cftdist/diffeo.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cftdist {

CircleField CircleField::from_samples(const PeriodicGrid& grid, rvec samples, std::string name) {
  if (static_cast<int>(samples.size()) != grid.size())
    throw Error(ErrorKind::Config, "circle field sample count does not match grid");
  CircleField f(grid);
  f.samples_ = std::move(samples);
  f.coeffs_ = fourier_coefficients(f.samples_);
  f.name_ = std::move(name);
  return f;
}

CircleField CircleField::from_function(const PeriodicGrid& grid, RealFn fn, std::string name) {
  rvec s(grid.size());
  for (int k = 0; k < grid.size(); ++k) s[k] = fn(grid.theta(k));
  CircleField f = from_samples(grid, std::move(s), std::move(name));
  f.exact_ = std::move(fn);
  return f;
}

double CircleField::operator()(double theta) const {
  if (exact_) return exact_(theta);
  return trig_eval_real(coeffs_, theta);
}

double CircleField::resolution_tail() const {
  double top = 0.0;
  for (const auto& c : coeffs_) top = std::max(top, std::abs(c));
  if (top == 0.0) return 0.0;
  return spectral_tail(coeffs_) / top;
}

int CircleField::symmetry_order() const {
  const int n = grid_.size();
  double top = 0.0;
  for (const auto& c : coeffs_) top = std::max(top, std::abs(c));
  int g = 0;
  for (int k = 1; k < n; ++k)
    if (std::abs(coeffs_[k]) > 1e-13 * top) g = std::gcd(g, std::abs(mode_index(k, n)));
  return g;
}

CircleField CircleField::resampled(const PeriodicGrid& grid) const {
  if (exact_) return from_function(grid, exact_, name_);
  const cvec c = coeffs_;
  rvec s(grid.size());
  for (int k = 0; k < grid.size(); ++k) s[k] = trig_eval_real(c, grid.theta(k));
  return from_samples(grid, std::move(s), name_);
}

rvec LineField::sample(const LineGrid& grid) const {
  rvec v(grid.size());
  for (int k = 0; k < grid.size(); ++k) v[k] = (*this)(grid.u(k));
  return v;
}

LineField LineField::from_samples(const LineGrid& grid, const rvec& values, std::string name) {
  if (static_cast<int>(values.size()) != grid.size())
    throw Error(ErrorKind::Config, "line field sample count does not match grid");
  auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      values.begin(), values.end(), grid.u_min(), grid.spacing());
  LineField f;
  const double lo = grid.u_min(), hi = grid.u(grid.size() - 1);
  f.g = [spline, lo, hi](double u) { return (u < lo || u > hi) ? 0.0 : (*spline)(u); };
  int first = -1, last = -1;
  for (int k = 0; k < grid.size(); ++k)
    if (values[k] != 0.0) {
      if (first < 0) first = k;
      last = k;
    }
  if (first < 0) {
    f.support_lo = f.support_hi = 0.0;
  } else {
    f.support_lo = grid.u(std::max(first - 1, 0));
    f.support_hi = grid.u(std::min(last + 1, grid.size() - 1));
  }
  f.domain_lo = lo;
  f.domain_hi = hi;
  f.name = std::move(name);
  return f;
}

namespace {

rvec periodic_part(const rvec& lift, const PeriodicGrid& grid) {
  rvec p(lift.size());
  for (int k = 0; k < grid.size(); ++k) p[k] = lift[k] - grid.theta(k);
  return p;
}

double lift_eval(const cvec& per_coeffs, double x) { return x + trig_eval_real(per_coeffs, x); }

}  // namespace

Diffeo::Diffeo(const PeriodicGrid& grid, rvec lift, rvec inverse_lift, double t)
    : grid_(grid), t_(t), chi_(std::move(lift)), inv_(std::move(inverse_lift)) {
  const int n = grid.size();
  if (static_cast<int>(chi_.size()) != n || static_cast<int>(inv_.size()) != n)
    throw Error(ErrorKind::Config, "diffeo samples do not match grid");
  const rvec p = periodic_part(chi_, grid), q = periodic_part(inv_, grid);
  per_coeffs_ = fourier_coefficients(p);
  inv_coeffs_ = fourier_coefficients(q);
  dchi_ = periodic_derivative(p, 1);
  d2chi_ = periodic_derivative(p, 2);
  dinv_ = periodic_derivative(q, 1);
  d2inv_ = periodic_derivative(q, 2);
  for (int k = 0; k < n; ++k) {
    dchi_[k] += 1.0;
    dinv_[k] += 1.0;
  }
  const double m = std::min(*std::min_element(dchi_.begin(), dchi_.end()),
                            *std::min_element(dinv_.begin(), dinv_.end()));
  if (!(m > 0.0)) throw Error(ErrorKind::Degenerate, "diffeo lost monotonicity (min derivative <= 0)", m);
}

Diffeo Diffeo::identity(const PeriodicGrid& grid) { return Diffeo(grid, grid.nodes(), grid.nodes(), 0.0); }

double Diffeo::operator()(double x) const { return lift_eval(per_coeffs_, x); }
double Diffeo::inverse(double x) const { return lift_eval(inv_coeffs_, x); }

Diffeo Diffeo::inverted() const {
  Diffeo d = *this;
  std::swap(d.chi_, d.inv_);
  std::swap(d.dchi_, d.dinv_);
  std::swap(d.d2chi_, d.d2inv_);
  std::swap(d.per_coeffs_, d.inv_coeffs_);
  d.t_ = -t_;
  return d;
}

Diffeo Diffeo::compose(const Diffeo& other) const {
  const int n = grid_.size();
  rvec lift(n), inv(n);
  for (int k = 0; k < n; ++k) {
    lift[k] = (*this)(other.chi_[k]);
    inv[k] = other.inverse(inv_[k]);
  }
  return Diffeo(grid_, std::move(lift), std::move(inv), t_ + other.t_);
}

double Diffeo::inverse_residual() const {
  double r = 0.0;
  for (int k = 0; k < grid_.size(); ++k) r = std::max(r, std::abs((*this)(inv_[k]) - grid_.theta(k)));
  return r;
}

double Diffeo::min_derivative() const { return *std::min_element(dchi_.begin(), dchi_.end()); }

namespace {

// Integrates d chi/dt = 2 pi f(chi) for every start point and records the
// state at each target time; targets are sorted by |t| and share one sign.
void rk4_sweep(const CircleField& f, const rvec& starts, const std::vector<double>& targets, int steps_per_unit,
               std::vector<rvec>& out) {
  rvec y = starts;
  double t = 0.0;
  const int n = static_cast<int>(y.size());
  auto rhs = [&f](double x) { return two_pi * f(x); };
  for (size_t j = 0; j < targets.size(); ++j) {
    const double span = targets[j] - t;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) * steps_per_unit - 1e-9)));
    const double h = span / steps;
    for (int s = 0; s < steps; ++s) {
      for (int k = 0; k < n; ++k) {
        const double x = y[k];
        const double k1 = rhs(x);
        const double k2 = rhs(x + 0.5 * h * k1);
        const double k3 = rhs(x + 0.5 * h * k2);
        const double k4 = rhs(x + h * k3);
        y[k] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    t = targets[j];
    out[j] = y;
  }
}

rvec flow_nodes(const CircleField& f, double t, int steps) {
  std::vector<rvec> out(1);
  if (t == 0.0) return f.grid().nodes();
  rk4_sweep(f, f.grid().nodes(), {t}, static_cast<int>(std::ceil(steps / std::abs(t))), out);
  return out[0];
}

}  // namespace

Diffeo flow(const CircleField& f, double t, int steps) {
  if (!std::isfinite(t)) throw Error(ErrorKind::Parameter, "flow time must be finite");
  if (steps < 32) throw Error(ErrorKind::Config, "flow needs at least 32 steps");
  const rvec fwd = flow_nodes(f, t, 2 * steps);
  const rvec bwd = flow_nodes(f, -t, 2 * steps);
  const rvec coarse = flow_nodes(f, t, steps);
  Diffeo d(f.grid(), fwd, bwd, t);
  double e = 0.0;
  for (size_t k = 0; k < fwd.size(); ++k) e = std::max(e, std::abs(fwd[k] - coarse[k]));
  d.step_error = e / 15.0;
  return d;
}

std::vector<rvec> flow_lifts(const CircleField& f, const rvec& times, int steps_per_unit) {
  std::vector<rvec> result(times.size());
  std::vector<size_t> pos, neg;
  for (size_t j = 0; j < times.size(); ++j) {
    if (times[j] > 0) pos.push_back(j);
    else if (times[j] < 0) neg.push_back(j);
    else result[j] = f.grid().nodes();
  }
  auto by_abs = [&](size_t a, size_t b) { return std::abs(times[a]) < std::abs(times[b]); };
  for (auto* group : {&pos, &neg}) {
    if (group->empty()) continue;
    std::sort(group->begin(), group->end(), by_abs);
    std::vector<double> targets;
    for (size_t j : *group) targets.push_back(times[j]);
    std::vector<rvec> out(targets.size());
    rk4_sweep(f, f.grid().nodes(), targets, steps_per_unit, out);
    for (size_t i = 0; i < group->size(); ++i) result[(*group)[i]] = std::move(out[i]);
  }
  return result;
}

CircleField make_fn_field(int n, const PeriodicGrid& grid) {
  if (n < 1) throw Error(ErrorKind::Parameter, "f_n needs n >= 1");
  return CircleField::from_function(
      grid, [n](double th) { return -std::sin(n * th) / (two_pi * n); }, "fn");
}

CircleField make_gn_field(int n, const PeriodicGrid& grid) {
  if (n < 1) throw Error(ErrorKind::Parameter, "g_n needs n >= 1");
  return CircleField::from_function(
      grid, [n](double th) { return std::cos(n * th) / (two_pi * n); }, "gn");
}

double fn_flow_closed(int n, double t, double theta) {
  const cplx z = std::polar(1.0, n * theta);
  const double c = std::cosh(0.5 * t), s = std::sinh(0.5 * t);
  const cplx g = (z * c + s) / (z * s + c);
  return theta + std::arg(g / z) / n;
}

CircleField cayley_pull(const LineField& g, const PeriodicGrid& grid) {
  if ((std::isfinite(g.domain_lo) && g.support_lo <= g.domain_lo) ||
      (std::isfinite(g.domain_hi) && g.support_hi >= g.domain_hi))
    throw Error(ErrorKind::Precondition, "line field support reaches the edge of its grid");
  LineField copy = g;
  auto fn = [copy](double th) {
    const double c = std::cos(0.5 * th);
    if (std::abs(c) < 1e-300) return 0.0;
    const double u = std::tan(0.5 * th);
    return copy(u) * c * c / pi;
  };
  return CircleField::from_function(grid, fn, "cayley(" + g.name + ")");
}

LineField cayley_push(const CircleField& f) {
  LineField g;
  CircleField copy = f;
  g.g = [copy](double u) { return pi * copy(2.0 * std::atan(u)) * (1.0 + u * u); };
  g.name = "cayley_push(" + f.name() + ")";
  return g;
}

LineField kms_pull(const LineField& g, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::Parameter, "beta must be positive");
  LineField out;
  LineField copy = g;
  out.g = [copy, beta](double u) {
    if (u <= 0.0) return 0.0;
    return two_pi * u / beta * copy(beta / two_pi * std::log(u));
  };
  out.support_lo = std::exp(two_pi * g.support_lo / beta);
  out.support_hi = std::exp(two_pi * g.support_hi / beta);
  if (!std::isfinite(g.support_lo)) out.support_lo = 0.0;
  out.name = "kms(" + g.name + ")";
  return out;
}

LineField affine_normalize(const LineField& g) {
  if (!g.compact()) return g;
  const double m = 0.5 * (g.support_lo + g.support_hi);
  const double s = 0.5 * (g.support_hi - g.support_lo);
  if (!(s > 0.0)) return g;
  LineField out;
  LineField copy = g;
  out.g = [copy, m, s](double x) { return copy(m + s * x) / s; };
  out.support_lo = -1.0;
  out.support_hi = 1.0;
  out.name = g.name;
  return out;
}

MobiusCircle MobiusCircle::make(cplx a, cplx b) {
  const double det = std::norm(a) - std::norm(b);
  if (!(det > 0.0)) throw Error(ErrorKind::Parameter, "circle Moebius map must satisfy |a| > |b|");
  const double s = 1.0 / std::sqrt(det);
  return {a * s, b * s};
}

double MobiusCircle::lift(double theta) const {
  const cplx r = b / a;
  return theta + 2.0 * std::arg(a) + 2.0 * std::arg(1.0 + r * std::polar(1.0, -theta));
}

double MobiusCircle::lift_derivative(double theta) const {
  const cplx q = (b / a) * std::polar(1.0, -theta);
  return 1.0 - 2.0 * (q / (1.0 + q)).real();
}

MobiusLine MobiusLine::make(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0.0)) throw Error(ErrorKind::Parameter, "line Moebius map must have a d - b c > 0");
  const double s = 1.0 / std::sqrt(det);
  return {a * s, b * s, c * s, d * s};
}

Diffeo mobius_diffeo(const MobiusCircle& m, const PeriodicGrid& grid) {
  const MobiusCircle mi = m.inverse();
  rvec lift(grid.size()), inv(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    lift[k] = m.lift(grid.theta(k));
    inv[k] = mi.lift(grid.theta(k));
  }
  // keep the two lifts mutually inverse rather than off by a multiple of 2 pi
  const double shift = std::round((m.lift(inv[0]) - grid.theta(0)) / two_pi) * two_pi;
  for (auto& v : inv) v -= shift;
  return Diffeo(grid, std::move(lift), std::move(inv));
}

CircleField mobius_push(const CircleField& f, const MobiusCircle& m) {
  const MobiusCircle mi = m.inverse();
  CircleField copy = f;
  auto fn = [copy, m, mi](double th) {
    const double x = mi.lift(th);
    return copy(x) * m.lift_derivative(x);
  };
  return CircleField::from_function(f.grid(), fn, "mobius(" + f.name() + ")");
}

LineField mobius_push(const LineField& f, const MobiusLine& m) {
  const MobiusLine mi = m.inverse();
  LineField out;
  LineField copy = f;
  out.g = [copy, m, mi](double u) {
    const double den = mi.c * u + mi.d;
    if (den == 0.0) return 0.0;
    const double x = mi.apply(u);
    return copy(x) * m.derivative(x);
  };
  // image of a support endpoint, approached from inside the support
  auto image = [&](double x, double inward) {
    if (std::isinf(x)) return m.c == 0.0 ? x : m.a / m.c;
    if (m.c * x + m.d == 0.0) return m.apply(x + inward * 1e-9 * (1.0 + std::abs(x))) > 0 ? HUGE_VAL : -HUGE_VAL;
    return m.apply(x);
  };
  const bool pole_inside = m.c != 0.0 && (-m.d / m.c) > f.support_lo && (-m.d / m.c) < f.support_hi;
  if (pole_inside) {
    out.support_lo = -HUGE_VAL;
    out.support_hi = HUGE_VAL;
  } else {
    double lo = image(f.support_lo, 1.0), hi = image(f.support_hi, -1.0);
    if (lo > hi) std::swap(lo, hi);
    out.support_lo = lo;
    out.support_hi = hi;
  }
  out.name = "mobius(" + f.name + ")";
  return out;
}

cvec schwarzian_theta(const cvec& w) {
  const cvec d1 = periodic_derivative(w, 1);
  const cvec d2 = periodic_derivative(w, 2);
  const cvec d3 = periodic_derivative(w, 3);
  cvec s(w.size());
  for (size_t k = 0; k < w.size(); ++k) {
    if (std::abs(d1[k]) < 1e-10) throw Error(ErrorKind::Domain, "critical point of w on the grid");
    const cplx r = d2[k] / d1[k];
    s[k] = d3[k] / d1[k] - 1.5 * r * r;
  }
  return s;
}

rvec lift_schwarzian(const rvec& lift, const PeriodicGrid& grid) {
  const rvec p = periodic_part(lift, grid);
  const rvec d1 = periodic_derivative(p, 1), d2 = periodic_derivative(p, 2), d3 = periodic_derivative(p, 3);
  rvec s(p.size());
  for (size_t k = 0; k < p.size(); ++k) {
    const double a = 1.0 + d1[k], r = d2[k] / a;
    s[k] = d3[k] / a - 1.5 * r * r;
  }
  return s;
}

LineField kms_normalize(const LineField& g) {
  if (!(g.support_lo >= 0.0)) throw Error(ErrorKind::Precondition, "KMS frame needs a field on u > 0");
  const bool bounded = g.support_lo > 0.0 && std::isfinite(g.support_hi);
  const double r = bounded ? std::sqrt(g.support_lo * g.support_hi) : 1.0;
  LineField out = affine_normalize(mobius_push(g, MobiusLine::make(1.0, -r, 1.0, r)));
  out.name = g.name;
  return out;
}

cvec schwarzian_on_circle(const cvec& w, const PeriodicGrid& grid) {
  if (static_cast<int>(w.size()) != grid.size()) throw Error(ErrorKind::Config, "sample count does not match grid");
  cvec s = schwarzian_theta(w);
  for (int k = 0; k < grid.size(); ++k) {
    const cplx z = std::polar(1.0, grid.theta(k));
    s[k] = (0.5 - s[k]) / (z * z);
  }
  return s;
}

}  // namespace cftdist
