#pragma once

#include <functional>

namespace gvm {

// Settings for the adaptive Gauss-Kronrod integrator. The integrator splits
// the worst panel first and stops once the summed error estimate drops below
// max(abs_tol, rel_tol*|value|). `use_substitution` lets callers disable the
// endpoint-singularity substitutions in the kernel integrals (mainly for
// testing how the plain rule behaves).
struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_panels = 4096;
  bool use_substitution = true;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

// Adaptive Gauss-Kronrod 7/15 over [a,b]. Throws quadrature_error if the
// panel budget is exhausted with the error estimate still above tolerance.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureConfig& cfg = {});

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const QuadratureConfig& cfg = {}) {
  return integrate_adaptive(f, a, b, cfg).value;
}

}  // namespace gvm
