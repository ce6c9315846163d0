#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cftdist/diffeo.hpp"

namespace cftdist {

// phi(theta) = sum_{n != 0} e^{i n theta} / (1 - e^{-beta n}), periods (2 pi, i beta).
// beta = +inf gives the vacuum kernel sum_{n > 0} e^{i n theta}.
class EllipticKernel {
 public:
  explicit EllipticKernel(double beta, int n_max = 4096);
  double beta() const { return beta_; }
  int n_max() const { return n_max_; }
  double nome() const { return std::exp(-0.5 * beta_); }

  // 1 / (1 - e^{-beta n}) for n != 0, zero for n = 0
  double coefficient(int n) const;
  // c_n - c_{-n} = coth(beta n / 2) for n > 0
  double coth_half(int n) const;

  // Jacobi theta_1(v | q) and its first and third v-derivatives
  double theta1(double v, int derivative = 0) const;
  // eta_1 = zeta(pi) = -(pi / 12) theta_1'''(0) / theta_1'(0)
  double eta1() const;
  // Weierstrass zeta with periods (2 pi, i beta)
  double zeta(double theta) const;
  // phi = i kappa - 1/2 off the diagonal, with kappa = zeta - eta_1 theta / pi,
  // from the theta representation
  double kappa(double theta) const;
  // Abel sum of sum_{n > 0} coth(beta n / 2) sin(n theta):
  // cot(theta/2)/2 + sum_{0 < n <= n_max} (coth(beta n / 2) - 1) sin(n theta)
  double kappa_series(double theta) const;
  cplx phi(double theta) const { return cplx(-0.5, kappa(theta)); }

 private:
  double beta_;
  int n_max_;
};

// (2 pi)^2 sum_{n != 0} (i n)^d c_n fhat(-n) ghat(n), the pairing
// int int phi^(d)(theta_1 - theta_2 + i0) f(theta_1) g(theta_2).
// Accuracy error when the top quarter of modes contributes more than 1e-10.
cplx phi_pair(const CircleField& f, const CircleField& g, double beta, int d);

// Real form of the thermal star product:
// 2 pi (f (H_beta f)' - f' H_beta f) / 2 - (mean f) f' / 2 with H_beta the
// multiplier -i sgn(n) coth(beta |n| / 2).
CircleField star_beta(const CircleField& f, double beta);

// 4 pi^2 (c/12) sum_{n > 0} (n^3 - n) coth(beta n / 2) |fhat(n)|^2
double thermal_phi(const CircleField& f, double beta, double c);

// log Z(beta) with its first two derivatives.
struct PartitionFunction {
  std::string name;
  std::function<double(double)> log_z, d1, d2;
};

// log Z = 0; the vacuum limit.
PartitionFunction vacuum_character();
// Z = sum_i m_i e^{-beta h_i}
PartitionFunction spectrum_partition(std::vector<std::pair<double, double>> levels);
// Free boson: Z = prod_{k >= 1} (1 - e^{-beta k})^{-1}, levels up to `cutoff`.
PartitionFunction free_boson_partition(int cutoff = 200);

// Sign checks on a beta sample: log Z decreasing and convex.
bool partition_invariants_hold(const PartitionFunction& z, const rvec& betas);

struct ThermalFlowState {
  CircleField f;
  double beta;
  double lambda;
};

struct ThermalOptions {
  int steps = 64;        // RK4 steps over the largest |mu|
  double filter = 0.0;   // modes below filter * max |a_n| are zeroed after each step
};

// df/dlambda = f *_beta f, dbeta/dlambda = -int f. Divergence with the last
// safe lambda when beta reaches zero or the field blows up.
std::vector<ThermalFlowState> thermal_flow(const CircleField& f, double beta, double lambda_max, int steps,
                                           const ThermalOptions& opts = {});

// <T(f)^2>^C_beta = Phi[f] + (int f)^2 (log Z)'' - (int f *_beta f) (log Z)'
double thermal_connected2(const CircleField& f, double beta, const PartitionFunction& z, double c);
// Same from the Virasoro mode sum
// sum_n |2 pi fhat(n)|^2 c_n (2 n <L_0> + (c/12)(n^3 - n)) + (int f)^2 (log Z)''.
double thermal_connected2_modes(const CircleField& f, double beta, const PartitionFunction& z, double c);

struct ThermalMgf {
  rvec mu;
  rvec log_mgf;
  double mean = 0.0;       // <T(f)>_beta
  double connected2 = 0.0; // <T(f)^2>^C_beta
  std::vector<ThermalFlowState> trajectory;  // the mu >= 0 branch
};

// log M_beta[mu f] = mu <T(f)>_beta + int_0^mu (mu - lambda) <T(f_lambda)^2>^C_{beta_lambda} d lambda
ThermalMgf thermal_mgf(const CircleField& f, double beta, const PartitionFunction& z, double c, const rvec& mu_grid,
                       const ThermalOptions& opts = {});

}  // namespace cftdist
