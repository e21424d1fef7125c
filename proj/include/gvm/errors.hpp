#pragma once

#include <stdexcept>
#include <string>

namespace gvm {

// Evaluation hit a point where the kernel is genuinely infinite (e.g. the
// diagonal s=t for H<1/2). Integral operations route around these points;
// only point evaluation surfaces the error.
class singular_point_error : public std::runtime_error {
 public:
  singular_point_error(const std::string& where, double t, double s)
      : std::runtime_error(where + ": kernel singular at (t=" + std::to_string(t) +
                           ", s=" + std::to_string(s) + ")"),
        t_(t), s_(s) {}
  double t() const noexcept { return t_; }
  double s() const noexcept { return s_; }

 private:
  double t_, s_;
};

// Requested formula is valid only under hypotheses the inputs violate
// (e.g. the integrated-by-parts OU kernel needs H>1/2).
class unsupported_regime_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kernel matrix lacks full column rank at a given time.
class incompleteness_error : public std::runtime_error {
 public:
  incompleteness_error(const std::string& where, double t)
      : std::runtime_error(where + ": kernel matrix rank-deficient at t=" + std::to_string(t)),
        t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

// Observed drifts are not reproducible by any market price of risk
// (overdetermined system with a large residual).
class arbitrage_inconsistent_drift_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A covariance matrix that should be positive semidefinite failed to factor.
class regularization_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature exhausted its panel budget before reaching tolerance.
class quadrature_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gvm
