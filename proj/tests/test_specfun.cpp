#include "doctest.h"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <cmath>

#include "cftdist/specfun.hpp"

using namespace cftdist;

TEST_CASE("complex log-gamma against real values and the reflection formula") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.3, 20.0}) CHECK(lgamma_complex(x).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  // |Gamma(1/2 + i y)|^2 = pi / cosh(pi y)
  for (double y : {0.3, 2.0, 10.0, 40.0}) {
    const double lhs = 2.0 * lgamma_complex(cplx(0.5, y)).real();
    CHECK(lhs == doctest::Approx(std::log(pi / std::cosh(pi * y))).epsilon(1e-12));
  }
  // |Gamma(i y)|^2 = pi / (y sinh(pi y))
  for (double y : {0.7, 3.0}) {
    const double lhs = 2.0 * lgamma_complex(cplx(0.0, y)).real();
    CHECK(lhs == doctest::Approx(std::log(pi / (y * std::sinh(pi * y)))).epsilon(1e-12));
  }
}

TEST_CASE("kappa closed forms agree") {
  CHECK(kappa_gamma_form(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kappa_gamma_form(2) == doctest::Approx(0.5).epsilon(1e-15));
  for (int n = 1; n <= 12; ++n) CHECK(std::abs(kappa_gamma_form(n) - kappa_binomial_form(n)) < 1e-12);
}

TEST_CASE("K_n closed form and quadrature") {
  CHECK(K_n_closed(1) == doctest::Approx(3 * pi * pi / 8).epsilon(1e-14));
  for (int n = 1; n <= 6; ++n) CHECK(std::abs(K_n_quadrature(n) / K_n_closed(n) - 1.0) < 1e-8);
}

TEST_CASE("residue transform matches direct oscillatory quadrature") {
  boost::math::quadrature::ooura_fourier_cos<double> cosq;
  for (int n : {1, 2, 3}) {
    for (double w : {0.5, 1.0, 3.0}) {
      auto f = [n](double u) { return std::pow(1.0 + u * u, -n); };
      const double direct = 2.0 * cosq.integrate(f, w).first;
      CHECK(ghat_lorentzian(n, w) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("K_gamma closed form and quadrature") {
  CHECK(K_gamma_closed(2.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK_THROWS_AS(K_gamma_closed(1.0), Error);
  for (double g : {2.0, 2.5, 3.0}) CHECK(std::abs(K_gamma_quadrature(g) / K_gamma_closed(g) - 1.0) < 1e-4);
}
