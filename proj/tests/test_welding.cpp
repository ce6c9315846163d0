#include "doctest.h"

#include <cmath>

#include "cftdist/welding.hpp"

using namespace cftdist;

namespace {
double sup_dist(const cvec& a, const cvec& b) {
  double e = 0.0;
  for (size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}
}  // namespace

TEST_CASE("identity map gives a vanishing kernel and the identity welding") {
  PeriodicGrid g(64);
  const Diffeo id = Diffeo::identity(g);
  const Eigen::MatrixXcd K = assemble_kernel(id);
  CHECK(K.cwiseAbs().maxCoeff() == 0.0);
  const WeldingSolution ws = solve_welding(id);
  for (int k = 0; k < g.size(); ++k) {
    CHECK(std::abs(ws.w_minus[k] - std::polar(1.0, g.theta(k))) < 1e-14);
    CHECK(std::abs(ws.schwarzian[k]) < 1e-10);
  }
  CHECK(ws.winding == 1);
}

TEST_CASE("kernel diagonal is the limit of neighbouring entries") {
  double prev = 0.0;
  for (int n : {128, 256, 512}) {
    PeriodicGrid g(n);
    const Diffeo rho = flow(make_fn_field(2, g), 0.5, 128);
    const Eigen::MatrixXcd K = assemble_kernel(rho);
    const int i = n / 16;
    const double gap = std::abs(K(i, i + 1) - K(i, i)) / std::abs(K(i, i));
    if (prev > 0.0) {
      CHECK(gap / prev == doctest::Approx(0.5).epsilon(0.15));
    }
    prev = gap;
  }
  // Richardson check of the diagonal formula at offsets 1e-3, 1e-4
  PeriodicGrid g(256);
  const Diffeo rho = flow(make_fn_field(3, g), 0.6, 128);
  const double x = 0.37;
  auto psi = [&](double y) { return rho.inverse(y); };
  auto dpsi = [&](double y) { return (psi(y + 1e-5) - psi(y - 1e-5)) / 2e-5; };
  auto bracket = [&](double e) {
    const double xp = x + e;
    return 1.0 / std::tan(0.5 * (x - xp)) - dpsi(xp) / std::tan(0.5 * (psi(x) - psi(xp)));
  };
  const double r3 = bracket(1e-3), r4 = bracket(1e-4);
  const double limit = (10.0 * r4 - r3) / 9.0;
  const double d1 = dpsi(x), d2 = (dpsi(x + 1e-4) - dpsi(x - 1e-4)) / 2e-4;
  CHECK(limit == doctest::Approx(d2 / d1).epsilon(1e-4));
}

TEST_CASE("condition number diagnostic for f_2 at t = 0.5") {
  PeriodicGrid g(256);
  const Diffeo rho = flow(make_fn_field(2, g), 0.5, 128);
  const WeldingSolution ws = solve_welding(rho);
  CHECK(ws.condition < 1e3);
}

TEST_CASE("Nystrom welding equals the closed form for f_n") {
  PeriodicGrid g(512);
  for (int n : {2, 3, 4, 5, 6}) {
    for (double t : {0.3, 0.8}) {
      const Diffeo rho = flow(make_fn_field(n, g), t, 256);
      const WeldingSolution ws = solve_welding(rho);
      CHECK(sup_dist(ws.w_minus, closed_w_minus_fn(n, t, ws.theta)) < 1e-7);
      CHECK(ws.junction_residual < 1e-8);
      CHECK(ws.normalization_error < 1e-8);
      CHECK(ws.winding == 1);
    }
  }
}

TEST_CASE("split welding resolves large flow times") {
  PeriodicGrid g(512);
  const WeldingSolution ws = solve_flow_welding(make_fn_field(5, g), 5.0);
  CHECK(ws.grid.size() >= 1024);
  CHECK(sup_dist(ws.w_minus, closed_w_minus_fn(5, 5.0, ws.theta)) < 1e-7);
  const cplx J = pair_field_schwarzian(make_fn_field(5, g), ws);
  CHECK(std::abs(J - (-(24.0 / 10.0) * std::tanh(2.5))) < 1e-8);
}

TEST_CASE("closed welding for f_n") {
  PeriodicGrid g(256);
  const WeldingSolution id = closed_weld_fn(3, 0.0, g);
  for (int k = 0; k < g.size(); ++k) {
    CHECK(std::abs(id.w_minus[k] - std::polar(1.0, g.theta(k))) < 1e-15);
    CHECK(std::abs(id.schwarzian[k]) < 1e-15);
  }
  for (int n : {2, 3, 6}) {
    const WeldingSolution ws = closed_weld_fn(n, 0.9, g);
    CHECK(ws.junction_residual < 1e-12);
    // rotational symmetry
    rvec rot = ws.theta;
    for (auto& x : rot) x += two_pi / n;
    const cvec wr = closed_w_minus_fn(n, 0.9, rot), pr = closed_w_plus_fn(n, 0.9, rot);
    const cvec pp = closed_w_plus_fn(n, 0.9, ws.theta);
    const cplx ph = std::polar(1.0, -two_pi / n);
    for (int k = 0; k < g.size(); ++k) {
      CHECK(std::abs(ph * wr[k] - ws.w_minus[k]) < 1e-12);
      CHECK(std::abs(ph * pr[k] - pp[k]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(closed_weld_fn(1, 0.5, g), Error);
}

TEST_CASE("pairing against the closed Schwarzian") {
  PeriodicGrid g(1024);
  for (int n : {2, 3, 4}) {
    for (double t : {0.5, 1.0, 2.0}) {
      const cplx J = pair_field_schwarzian(make_fn_field(n, g), closed_weld_fn(n, t, g));
      CHECK(std::abs(J - (-(n * n - 1.0) / (2.0 * n) * std::tanh(0.5 * t))) < 1e-12);
    }
  }
  const cplx J = pair_field_schwarzian(make_fn_field(2, g), closed_weld_fn(2, 1.0, g));
  CHECK(J.real() == doctest::Approx(-0.34664).epsilon(1e-4));
  CHECK(std::abs(pair_field_schwarzian(make_fn_field(2, g), closed_weld_fn(2, 0.0, g))) < 1e-15);
}

TEST_CASE("Moebius maps weld with zero Schwarzian") {
  PeriodicGrid g(256);
  const Diffeo m = mobius_diffeo(MobiusCircle::make(cplx(1.1, 0.2), cplx(0.3, 0.25)), g);
  const WeldingSolution ws = solve_welding(m);
  for (const auto& s : ws.schwarzian) CHECK(std::abs(s) < 1e-7);
  CHECK(ws.junction_residual < 1e-8);
  const WeldingSolution w1 = solve_flow_welding(make_fn_field(1, g), 1.5);
  for (const auto& s : w1.schwarzian) CHECK(std::abs(s) < 1e-7);
  CHECK(w1.junction_residual < 1e-8);
}

TEST_CASE("Schwarzian is unchanged when a Moebius map acts before rho") {
  PeriodicGrid g(512);
  const Diffeo rho = flow(make_fn_field(3, g), 0.6, 256);
  const Diffeo m = mobius_diffeo(MobiusCircle::make(cplx(1.0, 0.1), cplx(0.2, 0.1)), g);
  const WeldingSolution a = solve_welding(rho);
  const WeldingSolution b = solve_welding(rho.compose(m));
  // both solutions live on the uniform grid
  CHECK(sup_dist(a.schwarzian, b.schwarzian) < 1e-6);
}

TEST_CASE("pairing is real for real fields") {
  PeriodicGrid g(256);
  const CircleField f = CircleField::from_function(g, [](double x) { return 0.05 * std::cos(x) + 0.03 * std::sin(2 * x) - 0.02 * std::cos(3 * x); });
  for (double t : {0.5, 1.5}) {
    const WeldingSolution ws = solve_flow_welding(f, t);
    CHECK(std::abs(pair_field_schwarzian(f, ws).imag()) < 1e-8);
  }
}
