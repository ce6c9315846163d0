#include "cftdist/charfun.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cftdist/parallel.hpp"

namespace cftdist {

namespace {

std::string at_time(double t) {
  std::ostringstream s;
  s << " at t' = " << t;
  return s.str();
}

CharFunSamples build(const CircleField& f, double c, double h, const CharFunOptions& opts, const char* variant) {
  if (!(c > 0.0)) throw Error(ErrorKind::Parameter, "central charge must be positive");
  if (h < 0.0) throw Error(ErrorKind::Parameter, "conformal weight must be nonnegative");
  if (opts.n_t < 64) throw Error(ErrorKind::Config, "charfun needs n_t >= 64");
  if (!(opts.t_max > 0.0)) throw Error(ErrorKind::Config, "charfun needs t_max > 0");
  const int n = opts.n_t;
  const double dt = opts.t_max / n;
  CharFunSamples cf;
  cf.c = c;
  cf.h = h;
  cf.variant = variant;
  cf.field = f.name();
  cf.t.resize(2 * n + 1);
  for (int k = -n; k <= n; ++k) cf.t[n + k] = k * dt;
  const bool zero = std::all_of(f.samples().begin(), f.samples().end(), [](double v) { return v == 0.0; });
  if (zero) {
    cf.values.assign(2 * n + 1, 1.0);
    return cf;
  }

  // grid size fixed by the most distorted map
  WeldingOptions probe = opts.welding;
  probe.throw_on_residual = false;
  const int points = solve_flow_welding(f, opts.t_max, probe).grid.size();
  const CircleField fn = points == f.grid().size() ? f : f.resampled(PeriodicGrid(points));
  const int sym = opts.welding.use_symmetry ? fn.symmetry_order() : 1;

  rvec times;
  for (int k = 1; k <= n; ++k) {
    times.push_back(0.5 * k * dt);
    times.push_back(-0.5 * k * dt);
  }
  const std::vector<rvec> lifts = flow_lifts(fn, times, opts.welding.steps_per_unit);

  cvec rate(n + 1);
  const rvec id = fn.grid().nodes();
  parallel_for(n + 1, [&](int k) {
    const double t = k * dt;
    try {
      const rvec& sigma = k == 0 ? id : lifts[2 * (k - 1)];
      const rvec& A = k == 0 ? id : lifts[2 * (k - 1) + 1];
      const WeldingSolution ws = solve_split_adaptive(fn.grid(), sigma, A, t, sym, f.grid().size(), opts.welding);
      rate[k] = pair_field_density(fn, ws, c, h);
    } catch (const Error& e) {
      throw Error(e.kind(), e.what() + at_time(t), e.achieved());
    }
  });

  const cvec logphi = cumulative_cubic(rate, dt);
  cf.values.resize(2 * n + 1);
  for (int k = 0; k <= n; ++k) {
    const cplx v = std::exp(logphi[k]);
    cf.values[n + k] = v;
    cf.values[n - k] = std::conj(v);
  }
  cf.values[n] = 1.0;
  return cf;
}

cplx clenshaw(const cvec& a, cplx x) {
  cplx b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(a.size()) - 1; k >= 1; --k) {
    const cplx b0 = 2.0 * x * b1 - b2 + a[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + a[0];
}

}  // namespace

cplx CharFunSamples::operator()(double tt) const {
  const double h = step();
  const int last = static_cast<int>(t.size()) - 1;
  if (tt < t.front() - 1e-12 * h || tt > t.back() + 1e-12 * h)
    throw Error(ErrorKind::Domain, "charfun evaluated outside its t grid");
  int j = static_cast<int>(std::floor((tt - t.front()) / h)) - 1;
  j = std::clamp(j, 0, last - 3);
  cplx s = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (tt - t[j + b]) / (t[j + a] - t[j + b]);
    s += w * values[j + a];
  }
  return s;
}

bool AxiomReport::ok(double tol) const {
  return value_at_zero_error == 0.0 && hermitian_error <= tol && max_modulus <= 1.0 + tol &&
         toeplitz_min_eigenvalue >= -tol;
}

CharFunSamples vacuum_charfun(const CircleField& f, double c, const CharFunOptions& opts) {
  return build(f, c, 0.0, opts, "vacuum");
}

CharFunSamples hw_charfun(const CircleField& f, double c, double h, const CharFunOptions& opts) {
  return build(f, c, h, opts, "highest-weight");
}

CharFunSamples lightray_charfun(const LineField& g, double c, const CharFunOptions& opts, int points) {
  CharFunSamples cf = build(cayley_pull(g, PeriodicGrid(points)), c, 0.0, opts, "lightray");
  cf.field = g.name;
  return cf;
}

CharFunSamples kms_charfun(const LineField& g, double beta, double c, const CharFunOptions& opts, int points) {
  const LineField gb = kms_normalize(kms_pull(g, beta));
  CharFunSamples cf = build(cayley_pull(gb, PeriodicGrid(points)), c, 0.0, opts, "thermal");
  cf.beta = beta;
  cf.field = g.name;
  return cf;
}

cplx log_charfun_rate(const CircleField& f, double t, double c, double h, const WeldingOptions& opts) {
  return pair_field_density(f, solve_flow_welding(f, t, opts), c, h);
}

rvec continued_log_mgf(const CircleField& f, double c, const rvec& mu, double t_span, int nodes,
                       const WeldingOptions& opts) {
  if (nodes < 8 || nodes % 2) throw Error(ErrorKind::Config, "continuation needs an even node count >= 8");
  if (!(t_span > 0.0)) throw Error(ErrorKind::Config, "continuation needs t_span > 0");
  const int m = nodes;
  rvec x(m);
  for (int j = 0; j < m; ++j) x[j] = std::cos(pi * (j + 0.5) / m);
  cvec r(m);
  // x_{m-1-j} = -x_j and the rate obeys r(-t) = -conj r(t)
  parallel_for(m / 2, [&](int j) {
    try {
      r[j] = log_charfun_rate(f, t_span * x[j], c, 0.0, opts);
    } catch (const Error& e) {
      throw Error(e.kind(), e.what() + at_time(t_span * x[j]), e.achieved());
    }
  });
  for (int j = 0; j < m / 2; ++j) r[m - 1 - j] = -std::conj(r[j]);

  cvec a(m, 0.0);
  for (int k = 0; k < m; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < m; ++j) s += r[j] * std::cos(pi * k * (j + 0.5) / m);
    a[k] = s * (2.0 / m);
  }
  a[0] *= 0.5;
  // drop coefficients at the noise floor; they only amplify off the axis
  double top = 0.0;
  for (const auto& v : a) top = std::max(top, std::abs(v));
  int keep = m;
  while (keep > 1 && std::abs(a[keep - 1]) < 1e-13 * top) --keep;
  a.resize(keep);

  // antiderivative in x
  cvec b(keep + 1, 0.0);
  for (int k = 1; k <= keep; ++k) {
    const cplx lo = a[k - 1] * (k == 1 ? 2.0 : 1.0);
    const cplx hi = k + 1 < keep ? a[k + 1] : 0.0;
    b[k] = (lo - hi) / (2.0 * k);
  }
  const cplx b0 = clenshaw(b, 0.0);
  rvec out(mu.size());
  for (size_t i = 0; i < mu.size(); ++i) {
    const cplx xi(0.0, -mu[i] / t_span);
    out[i] = (t_span * (clenshaw(b, xi) - b0)).real();
  }
  return out;
}

double second_moment(const CharFunSamples& cf) {
  const int z = cf.zero_index();
  const double h = cf.step();
  auto d2 = [&](int s) {
    const auto& v = cf.values;
    const cplx num = -v[z + 2 * s] + 16.0 * v[z + s] - 30.0 * v[z] + 16.0 * v[z - s] - v[z - 2 * s];
    return -(num / (12.0 * (s * h) * (s * h))).real();
  };
  std::vector<double> est;
  for (int s = 1; 4 * s <= z; s *= 2) est.push_back(d2(s));
  if (est.size() < 2) throw Error(ErrorKind::Config, "charfun grid too short for a second moment");
  size_t best = 0;
  double err = HUGE_VAL;
  for (size_t i = 0; i + 1 < est.size(); ++i) {
    const double e = std::abs(est[i] - est[i + 1]);
    if (e < err) {
      err = e;
      best = i;
    }
  }
  return est[best];
}

AxiomReport check_axioms(const CharFunSamples& cf, int random_triples, unsigned seed) {
  AxiomReport r;
  const int z = cf.zero_index();
  r.value_at_zero_error = std::abs(cf.values[z] - 1.0);
  for (int k = 0; k <= z; ++k) {
    r.hermitian_error = std::max(r.hermitian_error, std::abs(cf.values[z - k] - std::conj(cf.values[z + k])));
    r.max_modulus = std::max({r.max_modulus, std::abs(cf.values[z + k]), std::abs(cf.values[z - k])});
  }
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> pick(-z / 2, z / 2);
  double lo = HUGE_VAL;
  for (int trial = 0; trial < random_triples; ++trial) {
    const int idx[3] = {pick(rng), pick(rng), pick(rng)};
    for (int dim : {2, 3}) {
      Eigen::MatrixXcd m(dim, dim);
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) m(a, b) = cf.values[z + idx[a] - idx[b]];
      lo = std::min(lo, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues().minCoeff());
    }
  }
  r.toeplitz_min_eigenvalue = lo;
  return r;
}

}  // namespace cftdist
