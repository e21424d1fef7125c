#include "gvm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "gvm/errors.hpp"

namespace gvm {
namespace {

// One Gauss-Kronrod 7/15 application on [a,b]. Returns the Kronrod value and
// an error estimate |K15 - G7| (an upper proxy for the K15 error). Node and
// weight tables come from boost; the loops below only assume that abscissa()
// and weights() are index-paired and that abscissas are non-negative half
// nodes, so the storage order does not matter.
struct Panel {
  double a, b;
  double value;
  double error;
};

Panel apply_gk15(const std::function<double(double)>& f, double a, double b) {
  using kron = boost::math::quadrature::gauss_kronrod<double, 15>;
  using gauss = boost::math::quadrature::gauss<double, 7>;

  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double k15 = 0.0;
  for (std::size_t i = 0; i < kron::abscissa().size(); ++i) {
    const double x = kron::abscissa()[i];
    const double w = kron::weights()[i];
    if (x == 0.0) {
      k15 += w * f(mid);
    } else {
      k15 += w * (f(mid + half * x) + f(mid - half * x));
    }
  }
  double g7 = 0.0;
  for (std::size_t i = 0; i < gauss::abscissa().size(); ++i) {
    const double x = gauss::abscissa()[i];
    const double w = gauss::weights()[i];
    if (x == 0.0) {
      g7 += w * f(mid);
    } else {
      g7 += w * (f(mid + half * x) + f(mid - half * x));
    }
  }
  k15 *= half;
  g7 *= half;
  if (!std::isfinite(k15)) {
    throw quadrature_error("quadrature.integrate: non-finite integrand value in [" +
                           std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return Panel{a, b, k15, std::abs(k15 - g7)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, const QuadratureConfig& cfg) {
  if (a == b) return {0.0, 0.0, 0};
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }

  auto worse = [](const Panel& p, const Panel& q) { return p.error < q.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> queue(worse);
  queue.push(apply_gk15(f, a, b));
  double total = queue.top().value;
  double err = queue.top().error;
  int panels = 1;

  const double min_width = 16.0 * (b - a) * std::numeric_limits<double>::epsilon();
  while (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (panels >= cfg.max_panels) {
      throw quadrature_error("quadrature.integrate: panel budget " +
                             std::to_string(cfg.max_panels) +
                             " exhausted, error estimate " + std::to_string(err));
    }
    Panel worst = queue.top();
    queue.pop();
    if (worst.b - worst.a < min_width) {
      throw quadrature_error(
          "quadrature.integrate: panel width collapsed before reaching tolerance "
          "(possible unhandled singularity)");
    }
    const double m = 0.5 * (worst.a + worst.b);
    Panel left = apply_gk15(f, worst.a, m);
    Panel right = apply_gk15(f, m, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  return {sign * total, err, panels};
}

}  // namespace gvm
