#include "doctest.h"

#include <cmath>

#include "cftdist/charfun.hpp"

using namespace cftdist;

namespace {
double secant(double t, double p) { return std::pow(1.0 / std::cosh(0.5 * t), p); }

double max_rel_secant(const CharFunSamples& cf, double p) {
  double e = 0.0;
  for (size_t k = 0; k < cf.t.size(); ++k) {
    const double ex = secant(cf.t[k], p);
    e = std::max(e, std::abs(cf.values[k] - ex) / ex);
  }
  return e;
}
}  // namespace

TEST_CASE("vacuum charfun of f_2 is the hyperbolic secant") {
  PeriodicGrid g(64);
  const CharFunSamples cf = vacuum_charfun(make_fn_field(2, g), 1.0);
  CHECK(cf.t.size() == 257);
  CHECK(cf.values[cf.zero_index()] == cplx(1.0, 0.0));
  CHECK(max_rel_secant(cf, 1.0 / 8.0) < 1e-5);
  CHECK(second_moment(cf) == doctest::Approx(1.0 / 32.0).epsilon(1e-6));
  CHECK(check_axioms(cf).ok());
  CHECK(std::abs(cf(1.2345) - secant(1.2345, 1.0 / 8.0)) < 1e-7);
}

TEST_CASE("zero field gives a constant charfun") {
  PeriodicGrid g(64);
  const CharFunSamples cf = vacuum_charfun(CircleField::from_samples(g, rvec(64, 0.0)), 1.0);
  for (const auto& v : cf.values) CHECK(v == cplx(1.0, 0.0));
  LineField zero;
  zero.g = [](double) { return 0.0; };
  zero.support_lo = -1;
  zero.support_hi = 1;
  for (const auto& v : lightray_charfun(zero, 1.0).values) CHECK(v == cplx(1.0, 0.0));
  for (const auto& v : kms_charfun(zero, 2.0, 1.0).values) CHECK(v == cplx(1.0, 0.0));
}

TEST_CASE("highest weight charfun") {
  PeriodicGrid g(64);
  const CircleField f = make_fn_field(2, g);
  CharFunOptions o;
  o.t_max = 3.0;
  o.n_t = 64;
  const CharFunSamples v = vacuum_charfun(f, 1.0, o), h0 = hw_charfun(f, 1.0, 0.0, o);
  for (size_t k = 0; k < v.values.size(); ++k) CHECK(std::abs(v.values[k] - h0.values[k]) < 1e-12);
  const CharFunSamples h1 = hw_charfun(f, 1.0, 1.0, o);
  CHECK(max_rel_secant(h1, 9.0 / 8.0) < 1e-5);
  CHECK(second_moment(h1) == doctest::Approx(9.0 / 32.0).epsilon(1e-5));
  CHECK_THROWS_AS(hw_charfun(f, 1.0, -1.0, o), Error);
  CHECK_THROWS_AS(vacuum_charfun(f, 0.0, o), Error);
  o.n_t = 32;
  CHECK_THROWS_AS(vacuum_charfun(f, 1.0, o), Error);
}

TEST_CASE("g_n and f_n give the same distribution") {
  PeriodicGrid g(64);
  CharFunOptions o;
  o.n_t = 64;
  const CharFunSamples a = vacuum_charfun(make_fn_field(3, g), 1.0, o), b = vacuum_charfun(make_gn_field(3, g), 1.0, o);
  for (size_t k = 0; k < a.values.size(); ++k) CHECK(std::abs(a.values[k] - b.values[k]) < 1e-7);
}

TEST_CASE("light-ray Gaussian matches the shifted Gamma charfun") {
  // M(mu) = (e^{-mu/pi} / (1 - mu/pi))^{1/24} for the unit Gaussian
  LineField gl;
  gl.g = [](double u) { return std::exp(-u * u) / std::sqrt(pi); };
  gl.name = "gaussian";
  CharFunOptions o;
  o.t_max = 4.0;
  o.n_t = 64;
  const CharFunSamples cf = lightray_charfun(gl, 1.0, o);
  double err = 0.0;
  for (size_t k = 0; k < cf.t.size(); ++k) {
    const cplx x = I * cf.t[k] / pi;
    const cplx ex = std::exp((-x - std::log(1.0 - x)) / 24.0);
    err = std::max(err, std::abs(cf.values[k] - ex));
  }
  CHECK(err < 1e-8);
  CHECK(check_axioms(cf).ok());

  // translation is a Moebius map of the line
  LineField shifted = gl;
  shifted.g = [](double u) { return std::exp(-(u - 5) * (u - 5)) / std::sqrt(pi); };
  const CharFunSamples cs = lightray_charfun(shifted, 1.0, o, 512);
  for (size_t k = 0; k < cf.values.size(); ++k) CHECK(std::abs(cs.values[k] - cf.values[k]) < 1e-9);

  const CircleField f = cayley_pull(gl, PeriodicGrid(256));
  const rvec mu = {0.0, 0.5, 1.0, 0.4 * pi};
  const rvec lm = continued_log_mgf(f, 1.0, mu);
  for (size_t i = 0; i < mu.size(); ++i) {
    const double x = mu[i] / pi;
    CHECK(std::abs(lm[i] - (-x - std::log(1.0 - x)) / 24.0) < 1e-8);
  }
}

TEST_CASE("KMS charfun approaches the vacuum one at low temperature") {
  LineField b;
  b.g = [](double u) { return std::abs(u) < 1 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; };
  b.support_lo = -1;
  b.support_hi = 1;
  CharFunOptions o;
  o.n_t = 64;
  o.t_max = 2.0;
  const CharFunSamples v = lightray_charfun(b, 1.0, o), k = kms_charfun(b, 1e4, 1.0, o);
  for (size_t j = 0; j < v.values.size(); ++j) CHECK(std::abs(v.values[j] - k.values[j]) < 1e-3);
  const CharFunSamples hot = kms_charfun(b, 4.0, 1.0, o);
  CHECK(check_axioms(hot).ok());
  CHECK(hot.beta == 4.0);
  CHECK_THROWS_AS(kms_charfun(b, 0.0, 1.0, o), Error);
}
