#include "doctest.h"

#include <cmath>

#include "cftdist/spectral.hpp"

using namespace cftdist;

TEST_CASE("grids reject bad sizes") {
  CHECK_THROWS_AS(PeriodicGrid(12), Error);
  CHECK_THROWS_AS(PeriodicGrid(4), Error);
  CHECK_NOTHROW(PeriodicGrid(8));
  CHECK_THROWS_AS(LineGrid(32, 1.0, 1.0), Error);
  CHECK_THROWS_AS(LineGrid(8, 0.0, 1.0), Error);
  PeriodicGrid g(64);
  CHECK(g.theta(1) - g.theta(0) == doctest::Approx(two_pi / 64).epsilon(1e-15));
}

TEST_CASE("periodic derivative of exact modes") {
  PeriodicGrid g(64);
  rvec s(64), c(64), one(64, 1.0);
  cvec e3(64);
  for (int k = 0; k < 64; ++k) {
    s[k] = std::sin(g.theta(k));
    c[k] = std::cos(g.theta(k));
    e3[k] = std::polar(1.0, 3 * g.theta(k));
  }
  const rvec ds = periodic_derivative(s, 1);
  double err = 0.0;
  for (int k = 0; k < 64; ++k) err = std::max(err, std::abs(ds[k] - c[k]));
  CHECK(err < 1e-12);
  for (double v : periodic_derivative(one, 1)) CHECK(std::abs(v) < 1e-14);
  const cvec d3 = periodic_derivative(e3, 3);
  for (int k = 0; k < 64; ++k) CHECK(std::abs(d3[k] - cplx(0, -27) * e3[k]) < 1e-10);
}

TEST_CASE("derivative properties on a smooth function") {
  PeriodicGrid g(128);
  rvec f(128);
  for (int k = 0; k < 128; ++k) f[k] = std::exp(std::sin(g.theta(k))) + std::cos(3 * g.theta(k));
  const rvec d11 = periodic_derivative(periodic_derivative(f, 1), 1);
  const rvec d2 = periodic_derivative(f, 2);
  double err = 0.0;
  for (int k = 0; k < 128; ++k) err = std::max(err, std::abs(d11[k] - d2[k]));
  CHECK(err < 1e-10);
  CHECK(std::abs(periodic_integral(periodic_derivative(f, 1))) < 1e-12);
  CHECK_THROWS_AS(periodic_derivative(rvec(12, 0.0), 1), Error);
}

TEST_CASE("periodic integral") {
  PeriodicGrid g(32);
  rvec one(32, 1.0), s(32), s2(32);
  for (int k = 0; k < 32; ++k) {
    s[k] = std::sin(g.theta(k));
    s2[k] = s[k] * s[k];
  }
  CHECK(periodic_integral(one) == doctest::Approx(two_pi).epsilon(1e-15));
  CHECK(std::abs(periodic_integral(s)) < 1e-14);
  CHECK(periodic_integral(s2) == doctest::Approx(pi).epsilon(1e-14));
}

TEST_CASE("trigonometric interpolation reproduces a band-limited function") {
  PeriodicGrid g(32);
  rvec f(32);
  auto fn = [](double x) { return 1.0 + std::cos(x) - 0.5 * std::sin(5 * x); };
  for (int k = 0; k < 32; ++k) f[k] = fn(g.theta(k));
  const cvec a = fourier_coefficients(f);
  for (double x : {0.1, 1.7, 4.0}) CHECK(trig_eval_real(a, x) == doctest::Approx(fn(x)).epsilon(1e-13));
}

TEST_CASE("line Fourier transform of a Gaussian") {
  LineGrid lg(1024, -20.0, 20.0);
  rvec f(lg.size());
  for (int k = 0; k < lg.size(); ++k) f[k] = std::exp(-lg.u(k) * lg.u(k)) / std::sqrt(pi);
  const LineTransform tr = line_fourier_transform(f, lg);
  CHECK(tr.boundary_decayed);
  double abs_err = 0.0, rel_err = 0.0;
  for (size_t j = 0; j < tr.omega.size(); ++j) {
    const double w = tr.omega[j];
    if (std::abs(w) > 10) continue;
    const double ex = std::exp(-w * w / 4);
    abs_err = std::max(abs_err, std::abs(tr.values[j] - ex));
    if (std::abs(w) <= 6) rel_err = std::max(rel_err, std::abs(tr.values[j] - ex) / ex);
  }
  // relative 1e-8 is reachable only where the transform is above round-off
  CHECK(abs_err < 1e-14);
  CHECK(rel_err < 1e-8);
  // reality of f gives |fhat(-w)| = |fhat(w)|
  const int m = static_cast<int>(tr.omega.size());
  for (int j = 1; j < m - 1; ++j) {
    const int jm = m - 2 - j;
    REQUIRE(tr.omega[jm] == doctest::Approx(-tr.omega[j]));
    CHECK(std::abs(std::abs(tr.values[j]) - std::abs(tr.values[jm])) < 1e-12);
  }
}

TEST_CASE("line Fourier transform of zero and a flagged undecayed input") {
  LineGrid lg(64, -1.0, 1.0);
  const LineTransform z = line_fourier_transform(rvec(64, 0.0), lg);
  for (const auto& v : z.values) CHECK(std::abs(v) == 0.0);
  const LineTransform one = line_fourier_transform(rvec(64, 1.0), lg);
  CHECK_FALSE(one.boundary_decayed);
}

TEST_CASE("line Fourier transform of the squared Lorentzian") {
  // (1 + u^2)^{-2} has transform (pi/2) e^{-|w|} (1 + |w|)
  LineGrid lg(1 << 16, -4000.0, 4000.0);
  rvec f(lg.size());
  for (int k = 0; k < lg.size(); ++k) f[k] = 1.0 / std::pow(1.0 + lg.u(k) * lg.u(k), 2);
  const LineTransform tr = line_fourier_transform(f, lg, 1);
  double err = 0.0;
  for (size_t j = 0; j < tr.omega.size(); ++j) {
    const double w = std::abs(tr.omega[j]);
    if (w > 20 || w < 0.05) continue;
    err = std::max(err, std::abs(tr.values[j] - 0.5 * pi * std::exp(-w) * (1 + w)));
  }
  CHECK(err < 1e-9);
}
