#pragma once

#include <functional>

#include "gvm/quadrature.hpp"

namespace gvm::detail {

// Tighter tolerances for quadratures nested inside another quadrature's
// integrand, so inner evaluation noise stays below the outer error estimate.
QuadratureConfig nested(const QuadratureConfig& cfg);

// int_a^b F(u) du where F may blow up like u^{e0} at u->0+ and like
// (T-u)^{ed} at u->T-; power substitutions tame both ends.
double integrate_with_endpoint_behavior(const std::function<double(double)>& F, double a,
                                        double b, double T, double e0, double ed,
                                        const QuadratureConfig& cfg);

}  // namespace gvm::detail
