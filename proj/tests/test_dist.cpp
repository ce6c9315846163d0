#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

#include "cftdist/dist.hpp"

using namespace cftdist;

TEST_CASE("secant law") {
  for (double p : {0.125, 1.0, 1.125, 2.5}) {
    const SecantDist d(p);
    boost::math::quadrature::sinh_sinh<double> q;
    const double mass = q.integrate([&](double x) { return d.pdf(x); });
    CHECK(std::abs(mass - 1.0) < 1e-8);
    const double var = q.integrate([&](double x) { return std::abs(x) > 200.0 ? 0.0 : x * x * d.pdf(x); });
    CHECK(var == doctest::Approx(p / 4.0).epsilon(1e-8));
    CHECK(d.pdf(0.7) == doctest::Approx(d.pdf(-0.7)).epsilon(1e-14));
    CHECK(d.charfun(0.0) == 1.0);
    CHECK(d.charfun(3.0) == doctest::Approx(std::pow(1.0 / std::cosh(1.5), p)).epsilon(1e-14));
    // fourth and sixth moments from the cumulants against quadrature
    for (int k : {4, 6}) {
      const double mk = q.integrate([&](double x) { return std::abs(x) > 200.0 ? 0.0 : std::pow(x, k) * d.pdf(x); });
      CHECK(d.moment(k) == doctest::Approx(mk).epsilon(1e-6));
    }
    CHECK(d.moment(3) == 0.0);
  }
  CHECK(SecantDist(0.125).variance() == doctest::Approx(1.0 / 32.0));
  CHECK_THROWS_AS(SecantDist(0.0), Error);
  // Fourier pair on |t| <= 10
  const SecantDist d(0.125);
  boost::math::quadrature::sinh_sinh<double> q;
  for (double t : {0.5, 2.0, 10.0}) {
    const double re = q.integrate([&](double x) { return std::cos(t * x) * d.pdf(x); });
    CHECK(std::abs(re - d.charfun(t)) < 1e-6);
  }
}

TEST_CASE("shifted Gamma closed forms") {
  const ShiftedGamma g{1.0 / 24.0, pi, 1.0 / (24.0 * pi)};
  CHECK(shifted_gamma_mgf(g, 0.0) == 1.0);
  CHECK(g.cumulant(1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(shifted_gamma_mgf(g, pi), Error);
  const ShiftedGamma h{1.0 / 18.0, pi / 3.0, 1.0 / (6.0 * pi)};
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  auto dens = [&](double u) { return h.pdf_from_edge(u); };
  CHECK(h.pdf_from_edge(0.3) == doctest::Approx(h.pdf(0.3 - h.sigma)).epsilon(1e-12));
  const double mass = near.integrate(dens, 0.0, 1.0) + far.integrate(dens, 1.0, INFINITY);
  CHECK(std::abs(mass - 1.0) < 1e-8);
  const rvec x = {-1.0, 0.5};
  const rvec v = shifted_gamma_pdf(h, x);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(h.pdf(0.5)));
}

TEST_CASE("inversion of closed-form charfuns") {
  SUBCASE("secant") {
    const double p = 0.125;
    const EmpiricalDensity d = invert_charfun(secant_samples(p, 320.0, 1600), {8, 0.1, 12.0});
    double err = 0.0;
    for (size_t i = 0; i < d.x.size(); ++i) err = std::max(err, std::abs(d.pdf[i] - SecantDist(p).pdf(d.x[i])));
    CHECK(err < 1e-5);
    CHECK(std::abs(d.mass - 1.0) < 1e-4);
    CHECK(d.valid());
    CHECK_FALSE(d.window_bias);
    CHECK(d.spacing() == doctest::Approx(pi / (8 * 320.0)));
    CHECK(d.moment(2) == doctest::Approx(p / 4.0).epsilon(1e-4));
    CHECK(std::abs(d.charfun(1.0) - secant_charfun(p, 1.0)) < 1e-5);
  }
  SUBCASE("delta law is rejected") {
    CharFunSamples one = secant_samples(1.0, 5.0, 64);
    for (auto& v : one.values) v = 1.0;
    CHECK_THROWS_AS(invert_charfun(one), Error);
  }
  SUBCASE("shifted Gamma") {
    const ShiftedGamma g{1.0 / 24.0, pi, 1.0 / (24.0 * pi)};
    const EmpiricalDensity d = invert_charfun(shifted_gamma_samples(g, 40000.0, 400000), {1, 0.1, 6.0});
    CHECK(d.window_bias);
    CHECK(std::abs(d.support_min + g.sigma) <= 2.0 * d.spacing());
    double err = 0.0;
    for (size_t i = 0; i < d.x.size(); ++i)
      if (d.x[i] > -g.sigma + 0.1) err = std::max(err, std::abs(d.pdf[i] - g.pdf(d.x[i])));
    CHECK(err < 1e-4);
    CHECK(std::abs(d.mass - 1.0) < 1e-4);
  }
}

TEST_CASE("convolution") {
  const ShiftedGamma a{1.0 / 24.0, pi, 0.01}, b{1.0 / 24.0, pi, 0.02};
  const ConvolvedDist c = convolve(a, b);
  REQUIRE(c.closed);
  CHECK(c.closed_form.alpha == doctest::Approx(1.0 / 12.0));
  CHECK(c.closed_form.sigma == doctest::Approx(0.03));
  for (double mu = 0.0; mu <= 0.5 * pi; mu += 0.1)
    CHECK(std::abs(c.mgf(mu) - c.closed_form.mgf(mu)) < 1e-10 * c.closed_form.mgf(mu));
  // the general route agrees with the closed form
  const ConvolvedDist u = convolve({0.05, 1.0, 0.0}, {0.3, 2.5, 0.1});
  CHECK_FALSE(u.closed);
  CHECK(std::abs(u.mass() - 1.0) < 1e-6);
  ConvolvedDist forced = c;
  forced.closed = false;
  for (double x : {0.0, 0.3, 1.2}) CHECK(forced.pdf(x) == doctest::Approx(c.closed_form.pdf(x)).epsilon(1e-8));
  // direct convolution integral at one point
  boost::math::quadrature::tanh_sinh<double> q;
  const double l = 0.7;
  const double direct = q.integrate(
      [&](double v, double vc) {
        const double w = v < 0.5 * l ? l - v : vc;
        const double vv = v < 0.5 * l ? v : l - vc;
        if (!(vv > 0.0) || !(w > 0.0)) return 0.0;
        return u.first.pdf_from_edge(vv) * u.second.pdf_from_edge(w);
      },
      0.0, l);
  CHECK(u.pdf(l + u.support_min()) == doctest::Approx(direct).epsilon(1e-8));
}
