#include "doctest.h"

#include <cmath>
#include <random>

#include "cftdist/diffeo.hpp"

using namespace cftdist;

namespace {
LineField gaussian_line(double tau = 1.0, double shift = 0.0) {
  LineField g;
  g.g = [tau, shift](double u) {
    const double x = (u - shift) / tau;
    return std::exp(-x * x) / (tau * std::sqrt(pi));
  };
  return g;
}

LineField bump_line() {
  LineField g;
  g.g = [](double u) { return std::abs(u) < 1 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; };
  g.support_lo = -1.0;
  g.support_hi = 1.0;
  return g;
}
}  // namespace

TEST_CASE("flow of f_2 matches the closed form") {
  PeriodicGrid g(128);
  const CircleField f = make_fn_field(2, g);
  const Diffeo d = flow(f, 0.7, 256);
  double err = 0.0;
  for (int k = 0; k < g.size(); ++k) err = std::max(err, std::abs(d.lift()[k] - fn_flow_closed(2, 0.7, g.theta(k))));
  CHECK(err < 1e-9);
  CHECK(d.step_error < 1e-9);
  CHECK(d.inverse_residual() < 1e-9);
  CHECK(d.min_derivative() > 0.0);
  // lift property
  CHECK(d(g.theta(3) + two_pi) - d(g.theta(3)) == doctest::Approx(two_pi).epsilon(1e-14));
}

TEST_CASE("trivial flows are the identity") {
  PeriodicGrid g(64);
  const Diffeo d0 = flow(make_fn_field(3, g), 0.0, 64);
  const Diffeo dz = flow(CircleField::from_samples(g, rvec(64, 0.0)), 1.3, 64);
  for (int k = 0; k < 64; ++k) {
    CHECK(d0.lift()[k] == g.theta(k));
    CHECK(std::abs(dz.lift()[k] - g.theta(k)) < 1e-15);
  }
  CHECK_THROWS_AS(flow(make_fn_field(3, g), 1.0, 8), Error);
}

TEST_CASE("f_n field zeros, mean and fixed points") {
  PeriodicGrid g(64);
  const CircleField f = make_fn_field(2, g);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(f(pi * k / 2)) < 1e-15);
  CHECK(std::abs(f.integral()) < 1e-15);
  CHECK(f.symmetry_order() == 2);
  const Diffeo d = flow(make_fn_field(4, g), 1.1, 128);
  // theta = pi k / 4 are grid nodes 8k
  for (int k = 0; k < 8; ++k) CHECK(std::abs(d.lift()[8 * k] - g.theta(8 * k)) < 1e-10);
}

TEST_CASE("flow group law") {
  PeriodicGrid g(128);
  const CircleField f = CircleField::from_function(g, [](double th) { return 0.1 * std::cos(th) + 0.05 * std::sin(2 * th) + 0.02; });
  for (auto [s, t] : {std::pair{0.4, 0.6}, {-0.9, 0.5}, {1.0, -1.0}}) {
    const Diffeo ds = flow(f, s, 128), dt = flow(f, t, 128), dst = flow(f, s + t, 128);
    const Diffeo c = ds.compose(dt);
    double err = 0.0;
    for (int k = 0; k < g.size(); ++k) err = std::max(err, std::abs(c.lift()[k] - dst.lift()[k]));
    CHECK(err < 1e-8);
  }
}

TEST_CASE("Cayley pull and push") {
  PeriodicGrid g(256);
  const LineField gl = gaussian_line();
  const CircleField f = cayley_pull(gl, g);
  CHECK(std::abs(f(pi)) < 1e-300);
  CHECK(f(0.0) == doctest::Approx(1.0 / (pi * std::sqrt(pi))));
  const LineField back = cayley_push(f);
  double err = 0.0;
  for (double u = -6; u <= 6; u += 0.01) err = std::max(err, std::abs(back(u) - gl(u)));
  CHECK(err < 1e-9);
  // a sampled-only field also round-trips through the trigonometric interpolant
  const CircleField fs = CircleField::from_samples(g, f.samples());
  const LineField back2 = cayley_push(fs);
  err = 0.0;
  for (double u = -4; u <= 4; u += 0.013) err = std::max(err, std::abs(back2(u) - gl(u)));
  CHECK(err < 1e-9);
  LineField zero;
  zero.g = [](double) { return 0.0; };
  const CircleField fz = cayley_pull(zero, g);
  for (double v : fz.samples()) CHECK(v == 0.0);
}

TEST_CASE("Cayley pull rejects support touching the grid edge") {
  LineGrid lg(64, -1.0, 1.0);
  CHECK_THROWS_AS(cayley_pull(LineField::from_samples(lg, rvec(64, 1.0)), PeriodicGrid(64)), Error);
  rvec inner(64, 0.0);
  for (int k = 20; k < 40; ++k) inner[k] = 1.0;
  CHECK_NOTHROW(cayley_pull(LineField::from_samples(lg, inner), PeriodicGrid(64)));
}

TEST_CASE("KMS pullback") {
  const LineField b = bump_line();
  const LineField gb = kms_pull(b, two_pi);
  CHECK(gb.support_lo == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(gb.support_hi == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(kms_pull(b, 0.0), Error);
  CHECK_THROWS_AS(kms_pull(b, -1.0), Error);
  // substitution identity for the vector-field law: int g_beta (beta/(2 pi u))^2 du = int g ds
  auto integrate = [](const LineField& f, double lo, double hi) {
    const int n = 20000;
    double s = 0.0, h = (hi - lo) / n;
    for (int k = 0; k <= n; ++k) s += (k == 0 || k == n ? 0.5 : 1.0) * f(lo + k * h);
    return s * h;
  };
  // trapezoid in v = log u for fields on (0, inf)
  auto integrate_log = [](const LineField& f, double lo, double hi) {
    const int n = 20000;
    const double a = std::log(lo), h = (std::log(hi) - a) / n;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) s += (k == 0 || k == n ? 0.5 : 1.0) * f(std::exp(a + k * h)) * std::exp(a + k * h);
    return s * h;
  };
  const double mass = integrate(b, -1, 1);
  LineField unit;
  unit.g = [b, mass](double u) { return b(u) / mass; };
  unit.support_lo = -1;
  unit.support_hi = 1;
  const LineField ub = kms_pull(unit, 1.0);
  LineField weighted;
  weighted.g = [ub](double u) { return ub(u) / (two_pi * u * two_pi * u); };
  weighted.support_lo = ub.support_lo;
  weighted.support_hi = ub.support_hi;
  CHECK(std::abs(integrate_log(weighted, ub.support_lo, ub.support_hi) - 1.0) < 1e-10);
}

TEST_CASE("Moebius push") {
  PeriodicGrid g(128);
  const CircleField f = make_fn_field(2, g);
  const CircleField same = mobius_push(f, MobiusCircle{});
  for (int k = 0; k < g.size(); ++k) CHECK(std::abs(same.samples()[k] - f.samples()[k]) < 1e-15);
  CHECK_THROWS_AS(MobiusCircle::make(0.5, 1.0), Error);
  CHECK_THROWS_AS(MobiusLine::make(0, 1, 1, 0), Error);

  // line case: rho(u) = -1/u turns x^{-gamma} e^{-b/x} into (-u)^{gamma+2} e^{b u} on u < 0
  const double a = 1.0, bb = 1.0, gam = 2.0;
  LineField ig;
  ig.g = [=](double u) { return u > 0 ? a * std::exp(-bb / u) * std::pow(u, -gam) : 0.0; };
  ig.support_lo = 0.0;
  const MobiusLine inv = MobiusLine::make(0, -1, 1, 0);
  const LineField pushed = mobius_push(ig, inv);
  for (double u : {-3.0, -1.0, -0.2}) CHECK(pushed(u) == doctest::Approx(a * std::pow(-u, gam + 2) * std::exp(bb * u)).epsilon(1e-13));
  CHECK(pushed(0.5) == 0.0);
  CHECK(pushed.support_hi == 0.0);

  // vector-field law: int f_rho du = int f(x) rho'(x)^2 dx
  LineField gl = gaussian_line(1.0, 0.3);
  const MobiusLine dil = MobiusLine::make(2.0, 1.0, 0.0, 0.5);
  const LineField gp = mobius_push(gl, dil);
  double lhs = 0, rhs = 0;
  for (double u = -60; u <= 60; u += 1e-3) {
    lhs += gp(u) * 1e-3;
    rhs += gl(u) * dil.derivative(u) * dil.derivative(u) * 1e-3;
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("Moebius diffeo and Schwarzian") {
  PeriodicGrid g(128);
  const MobiusCircle m = MobiusCircle::make(cplx(1.2, 0.3), cplx(0.4, -0.5));
  const Diffeo d = mobius_diffeo(m, g);
  CHECK(d.inverse_residual() < 1e-12);
  for (int k = 0; k < g.size(); k += 7) {
    const cplx z = std::polar(1.0, g.theta(k));
    CHECK(std::abs(std::polar(1.0, d.lift()[k]) - m.apply(z)) < 1e-13);
    CHECK(d.derivative()[k] == doctest::Approx(m.lift_derivative(g.theta(k))).epsilon(1e-10));
  }
  cvec id(g.size()), mob(g.size());
  const cplx a(0.3, 0.1), b(2.0, 0.0), c(0.1, 0.2), dd(3.0, -1.0);
  for (int k = 0; k < g.size(); ++k) {
    const cplx z = std::polar(1.0, g.theta(k));
    id[k] = z;
    mob[k] = (a * z + b) / (c * z + dd);
  }
  for (const auto& v : schwarzian_on_circle(id, g)) CHECK(std::abs(v) < 1e-10);
  for (const auto& v : schwarzian_on_circle(mob, g)) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("Schwarzian of the closed f_2 welding") {
  PeriodicGrid g(512);
  const int n = 2;
  const double T = std::tanh(0.5);
  cvec w(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const cplx z = std::polar(1.0, g.theta(k));
    w[k] = z * std::pow(1.0 - T * std::pow(z, -n), 1.0 / n);
  }
  const cvec s = schwarzian_on_circle(w, g);
  double err = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const cplx z = std::polar(1.0, g.theta(k));
    const cplx q = 1.0 - std::pow(z, -n) * T;
    err = std::max(err, std::abs(s[k] - (n * n - 1.0) / (2.0 * z * z) * (-1.0 + 1.0 / (q * q))));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("Schwarzian chain rule on random smooth diffeos") {
  PeriodicGrid g(256);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-0.05, 0.05);
  for (int trial = 0; trial < 4; ++trial) {
    double c1 = U(rng), c2 = U(rng), c3 = U(rng), c4 = U(rng);
    const CircleField f1 = CircleField::from_function(g, [=](double x) { return c1 * std::cos(x) + c2 * std::sin(3 * x); });
    const CircleField f2 = CircleField::from_function(g, [=](double x) { return c3 * std::sin(2 * x) + c4 * std::cos(x); });
    const Diffeo rho = flow(f1, 1.0, 64), sig = flow(f2, 1.0, 64);
    const Diffeo comp = rho.compose(sig);
    auto schw = [&](const Diffeo& d) {
      const rvec s = lift_schwarzian(d.lift(), g);
      return cvec(s.begin(), s.end());
    };
    const cvec sr_at_sig = [&] {
      // S rho evaluated at sigma(theta_k) through its interpolant
      const cvec sr = schw(rho);
      const cvec coef = fourier_coefficients(sr);
      cvec out(g.size());
      for (int k = 0; k < g.size(); ++k) out[k] = trig_eval(coef, sig.lift()[k]);
      return out;
    }();
    const cvec ss = schw(sig), sc = schw(comp);
    double err = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      const double d1 = sig.derivative()[k];
      err = std::max(err, std::abs(sc[k] - (d1 * d1 * sr_at_sig[k] + ss[k])));
    }
    CHECK(err < 1e-6);
  }
}
