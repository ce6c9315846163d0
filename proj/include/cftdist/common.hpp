#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cftdist {

using cplx = std::complex<double>;
using rvec = std::vector<double>;
using cvec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class ErrorKind {
  Config,        // malformed grid or configuration
  Parameter,     // parameter outside its admissible range
  Precondition,  // input violates an operation precondition
  Degenerate,    // flow or map lost monotonicity
  Fredholm,      // welding system singular
  Accuracy,      // result computed but tolerance not met
  Divergence,    // evaluation outside a domain of convergence
  Domain         // function evaluated where it is not defined
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double achieved = 0.0)
      : std::runtime_error(what), kind_(kind), achieved_(achieved) {}
  ErrorKind kind() const { return kind_; }
  // residual or offending value attached by the thrower, if any
  double achieved() const { return achieved_; }

 private:
  ErrorKind kind_;
  double achieved_;
};

const char* to_string(ErrorKind k);

}  // namespace cftdist
