#include "gvm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gvm/detail/endpoint_integration.hpp"
#include "gvm/errors.hpp"

namespace gvm {

namespace detail {

QuadratureConfig nested(const QuadratureConfig& cfg) {
  QuadratureConfig c = cfg;
  c.abs_tol = std::max(cfg.abs_tol * 1e-2, 1e-14);
  c.rel_tol = std::max(cfg.rel_tol * 1e-2, 1e-12);
  return c;
}

}  // namespace detail

using detail::nested;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_finite(double x, const std::string& msg) {
  require(std::isfinite(x), msg);
}

double sq(double x) { return x * x; }

// int_lo^hi f(u) (u-s0)^expo du with f smooth, lo >= s0, expo > -1.
// The substitution w = (u-s0)^(expo+1) absorbs the power factor exactly.
double integrate_with_lower_power(const std::function<double(double)>& f, double s0,
                                  double lo, double hi, double expo,
                                  const QuadratureConfig& cfg) {
  const double p = expo + 1.0;
  return integrate([&](double w) { return f(s0 + std::pow(w, 1.0 / p)) / p; },
                   std::pow(lo - s0, p), std::pow(hi - s0, p), cfg);
}

// int_lo^hi g(u) du where g behaves like C*(u-s0)^expo near u=s0 (lo >= s0).
// Works for any -1 < expo < 1; the blow-up (or kink) is divided out and
// restored through the substitution weight.
double integrate_desingularized_lower(const std::function<double(double)>& g, double s0,
                                      double lo, double hi, double expo,
                                      const QuadratureConfig& cfg) {
  const double p = expo + 1.0;
  auto f = [&](double w) {
    const double d = std::pow(w, 1.0 / p);  // u - s0
    return g(s0 + d) * std::pow(d, -expo) / p;
  };
  return integrate(f, std::pow(lo - s0, p), std::pow(hi - s0, p), cfg);
}

// Mirror image of the above: g behaves like C*(s0-u)^expo near u=s0, hi <= s0.
double integrate_desingularized_upper(const std::function<double(double)>& g, double s0,
                                      double lo, double hi, double expo,
                                      const QuadratureConfig& cfg) {
  const double p = expo + 1.0;
  // Deep subdivision can map w to a distance below one ulp of s0, which would
  // round s0 - d back onto the singular point; clamp d away from that.
  const double d_min = s0 - std::nextafter(s0, lo);
  auto f = [&](double w) {
    const double d = std::max(std::pow(w, 1.0 / p), d_min);  // s0 - u
    return g(s0 - d) * std::pow(d, -expo) / p;
  };
  return integrate(f, std::pow(s0 - hi, p), std::pow(s0 - lo, p), cfg);
}

}  // namespace

HurstExponent::HurstExponent(double value) : value_(value) {
  require(std::isfinite(value) && value > 0.0 && value < 1.0,
          "kernels.hurst: Hurst exponent must lie in (0,1), got " + std::to_string(value));
}

double rl_normalization(double h) {
  require(h > 0.0 && h < 1.0, "kernels.rl_normalization: H outside (0,1)");
  return 1.0 / std::tgamma(h + 0.5);
}

double fbm_low_normalization(double h) {
  require(h > 0.0 && h < 1.0, "kernels.fbm_low_normalization: H outside (0,1)");
  return std::sqrt(2.0 * h * std::tgamma(1.5 - h) /
                   (std::tgamma(h + 0.5) * std::tgamma(2.0 - 2.0 * h)));
}

double fbm_high_normalization(double h) {
  return (h - 0.5) * fbm_low_normalization(h);
}

KernelSpec KernelSpec::constant(double c) {
  require_finite(c, "kernels.constant: non-finite volatility");
  require(c != 0.0, "kernels.constant: zero volatility gives a degenerate factor");
  KernelSpec k;
  k.type_ = Type::constant;
  k.c_ = c;
  return k;
}

KernelSpec KernelSpec::rl(HurstExponent h) {
  KernelSpec k;
  k.type_ = Type::rl;
  k.hurst_ = h.value();
  k.norm_ = rl_normalization(h.value());
  return k;
}

KernelSpec KernelSpec::fbm(HurstExponent h) {
  require(h.regime() != HurstExponent::Regime::brownian,
          "kernels.fbm: H=1/2 is Brownian motion; use a constant kernel instead");
  KernelSpec k;
  k.type_ = Type::fbm;
  k.hurst_ = h.value();
  k.norm_ = h.value() > 0.5 ? fbm_high_normalization(h.value())
                            : fbm_low_normalization(h.value());
  return k;
}

KernelSpec KernelSpec::std_ou(double alpha) {
  require_finite(alpha, "kernels.std_ou: non-finite mean-reversion rate");
  KernelSpec k;
  k.type_ = Type::std_ou;
  k.alpha_ = alpha;
  return k;
}

KernelSpec KernelSpec::volterra_ou(double alpha, KernelSpec base) {
  require_finite(alpha, "kernels.volterra_ou: non-finite mean-reversion rate");
  KernelSpec k;
  k.type_ = Type::volterra_ou;
  k.alpha_ = alpha;
  k.base_ = std::make_shared<const KernelSpec>(std::move(base));
  return k;
}

double KernelSpec::hurst() const {
  require(type_ == Type::rl || type_ == Type::fbm,
          "kernels.spec: kernel has no Hurst exponent");
  return hurst_;
}

double KernelSpec::alpha() const {
  require(type_ == Type::std_ou || type_ == Type::volterra_ou,
          "kernels.spec: kernel has no mean-reversion rate");
  return alpha_;
}

double KernelSpec::constant_value() const {
  require(type_ == Type::constant, "kernels.spec: kernel has no constant level");
  return c_;
}

double KernelSpec::normalization() const {
  require(type_ == Type::rl || type_ == Type::fbm,
          "kernels.spec: kernel has no fractional normalization");
  return norm_;
}

const KernelSpec& KernelSpec::base() const {
  require(type_ == Type::volterra_ou && base_ != nullptr,
          "kernels.spec: kernel has no base kernel");
  return *base_;
}

double KernelSpec::exponent_at_zero() const {
  switch (type_) {
    case Type::fbm:
      return -std::abs(hurst_ - 0.5);
    case Type::volterra_ou:
      return base_->exponent_at_zero();
    default:
      return 0.0;
  }
}

double KernelSpec::exponent_at_diagonal() const {
  switch (type_) {
    case Type::rl:
    case Type::fbm:
      return hurst_ - 0.5;
    case Type::volterra_ou:
      return base_->exponent_at_diagonal();
    default:
      return 0.0;
  }
}

double KernelSpec::evaluate(double t, double s, const QuadratureConfig& cfg) const {
  require_finite(t, "kernels.evaluate: non-finite t");
  require_finite(s, "kernels.evaluate: non-finite s");
  require(0.0 <= s && s <= t, "kernels.evaluate: require 0 <= s <= t");
  switch (type_) {
    case Type::constant:
      return c_;
    case Type::rl:
      return rl_kernel(HurstExponent(hurst_), t, s);
    case Type::fbm:
      require(s > 0.0, "kernels.evaluate: fbm kernel undefined at s=0");
      if (hurst_ > 0.5) {
        return s == t ? 0.0 : fbm_kernel_high(HurstExponent(hurst_), t, s, cfg);
      }
      if (s == t) throw singular_point_error("kernels.evaluate", t, s);
      return fbm_kernel_low(HurstExponent(hurst_), t, s, cfg);
    case Type::std_ou:
      return std::exp(alpha_ * (t - s));
    case Type::volterra_ou:
      return ou_kernel(alpha_, *base_, t, s, cfg);
  }
  return 0.0;  // unreachable
}

bool KernelSpec::operator==(const KernelSpec& other) const {
  if (type_ != other.type_ || hurst_ != other.hurst_ || alpha_ != other.alpha_ ||
      c_ != other.c_) {
    return false;
  }
  if ((base_ == nullptr) != (other.base_ == nullptr)) return false;
  return base_ == nullptr || *base_ == *other.base_;
}

std::string KernelSpec::describe() const {
  std::ostringstream out;
  switch (type_) {
    case Type::constant: out << "constant(c=" << c_ << ")"; break;
    case Type::rl: out << "rl(H=" << hurst_ << ")"; break;
    case Type::fbm: out << "fbm(H=" << hurst_ << ")"; break;
    case Type::std_ou: out << "std_ou(alpha=" << alpha_ << ")"; break;
    case Type::volterra_ou:
      out << "volterra_ou(alpha=" << alpha_ << ", base=" << base_->describe() << ")";
      break;
  }
  return out.str();
}

double rl_kernel(HurstExponent h, double t, double s) {
  require_finite(t, "kernels.rl_kernel: non-finite t");
  require_finite(s, "kernels.rl_kernel: non-finite s");
  require(0.0 <= s && s <= t, "kernels.rl_kernel: require 0 <= s <= t");
  const double d = t - s;
  const double norm = rl_normalization(h.value());
  if (d == 0.0) {
    if (h.regime() == HurstExponent::Regime::rough) {
      throw singular_point_error("kernels.rl_kernel", t, s);
    }
    return h.regime() == HurstExponent::Regime::brownian ? norm : 0.0;
  }
  return norm * std::pow(d, h.value() - 0.5);
}

double fbm_kernel_high(HurstExponent h, double t, double s, const QuadratureConfig& cfg) {
  require(h.regime() == HurstExponent::Regime::smooth,
          "kernels.fbm_kernel_high: requires H > 1/2");
  require_finite(t, "kernels.fbm_kernel_high: non-finite t");
  require(0.0 < s && s <= t, "kernels.fbm_kernel_high: require 0 < s <= t");
  if (s == t) return 0.0;
  const double hv = h.value();
  // K(t,s) = c_H s^{1/2-H} int_s^t u^{H-1/2} (u-s)^{H-3/2} du; the power
  // substitution handles the integrable endpoint blow-up at u=s.
  const double integral = integrate_with_lower_power(
      [hv](double u) { return std::pow(u, hv - 0.5); }, s, s, t, hv - 1.5, cfg);
  return fbm_high_normalization(hv) * std::pow(s, 0.5 - hv) * integral;
}

double fbm_low_profile(HurstExponent h, double r, const QuadratureConfig& cfg) {
  require(h.regime() == HurstExponent::Regime::rough,
          "kernels.fbm_low_profile: requires H < 1/2");
  require_finite(r, "kernels.fbm_low_profile: non-finite ratio");
  require(r >= 1.0, "kernels.fbm_low_profile: require r >= 1");
  if (r == 1.0) throw singular_point_error("kernels.fbm_low_profile", r, 1.0);
  const double hv = h.value();
  const double term = std::pow(r, hv - 0.5) * std::pow(r - 1.0, hv - 0.5);
  const double integral = integrate_with_lower_power(
      [hv](double v) { return std::pow(v, hv - 1.5); }, 1.0, 1.0, r, hv - 0.5, cfg);
  return term + (0.5 - hv) * integral;
}

double fbm_kernel_low(HurstExponent h, double t, double s, const QuadratureConfig& cfg) {
  require(h.regime() == HurstExponent::Regime::rough,
          "kernels.fbm_kernel_low: requires H < 1/2");
  require_finite(t, "kernels.fbm_kernel_low: non-finite t");
  require(0.0 < s && s <= t, "kernels.fbm_kernel_low: require 0 < s <= t");
  if (s == t) throw singular_point_error("kernels.fbm_kernel_low", t, s);
  const double hv = h.value();
  return fbm_low_normalization(hv) * std::pow(s, hv - 0.5) *
         fbm_low_profile(h, t / s, cfg);
}

double ou_kernel(double alpha, const KernelSpec& base, double t, double s,
                 const QuadratureConfig& cfg) {
  require_finite(alpha, "kernels.ou_kernel: non-finite mean-reversion rate");
  require(0.0 <= s && s <= t && std::isfinite(t) && std::isfinite(s),
          "kernels.ou_kernel: require 0 <= s <= t");
  if (base.type() == KernelSpec::Type::constant) {
    return base.constant_value() * std::exp(alpha * (t - s));
  }
  const double tail = base.evaluate(t, s, cfg);
  if (s == t || alpha == 0.0) return tail;

  const double qd = base.exponent_at_diagonal();
  double integral;
  if (base.type() == KernelSpec::Type::rl) {
    // Exact power near the diagonal: pull the normalization out and absorb
    // (v-s)^{H-1/2} into the substitution for every regime of H.
    integral = base.normalization() *
               integrate_with_lower_power(
                   [&](double v) { return std::exp(alpha * (t - v)); }, s, s, t, qd, cfg);
  } else {
    auto g = [&](double v) { return std::exp(alpha * (t - v)) * base.evaluate(v, s, nested(cfg)); };
    if (qd < 0.0 && cfg.use_substitution) {
      integral = integrate_desingularized_lower(g, s, s, t, qd, cfg);
    } else {
      integral = integrate(g, s, t, cfg);
    }
  }
  return alpha * integral + tail;
}

double ou_kernel_diff(double alpha, const KernelSpec& base, double t, double s,
                      const QuadratureConfig& cfg) {
  require_finite(alpha, "kernels.ou_kernel_diff: non-finite mean-reversion rate");
  require(0.0 <= s && s <= t && std::isfinite(t) && std::isfinite(s),
          "kernels.ou_kernel_diff: require 0 <= s <= t");
  const bool fractional =
      base.type() == KernelSpec::Type::rl || base.type() == KernelSpec::Type::fbm;
  if (!fractional || base.hurst() <= 0.5) {
    throw unsupported_regime_error(
        "kernels.ou_kernel_diff: integration by parts needs a base kernel that "
        "vanishes on the diagonal (rl or fbm with H > 1/2), got " + base.describe());
  }
  const double hv = base.hurst();
  if (base.type() == KernelSpec::Type::fbm) {
    require(s > 0.0, "kernels.ou_kernel_diff: fbm base undefined at s=0");
  }
  if (s == t) return 0.0;
  if (base.type() == KernelSpec::Type::rl) {
    // dK/dv = c_{H,U} (H-1/2) (v-s)^{H-3/2}
    return rl_normalization(hv) * (hv - 0.5) *
           integrate_with_lower_power(
               [&](double v) { return std::exp(alpha * (t - v)); }, s, s, t, hv - 1.5, cfg);
  }
  // dK/dv = c_H s^{1/2-H} v^{H-1/2} (v-s)^{H-3/2}
  return fbm_high_normalization(hv) * std::pow(s, 0.5 - hv) *
         integrate_with_lower_power(
             [&](double v) { return std::pow(v, hv - 0.5) * std::exp(alpha * (t - v)); },
             s, s, t, hv - 1.5, cfg);
}

namespace detail {

double integrate_with_endpoint_behavior(const std::function<double(double)>& F,
                                        double a, double b, double T,
                                        double e0, double ed,
                                        const QuadratureConfig& cfg) {
  double total = 0.0;
  double lo = a, hi = b;
  if (hi > lo && hi == T && ed != 0.0 && ed < 0.75 && cfg.use_substitution) {
    const double m = std::max(lo, T - 0.25 * (T - lo));
    if (m < hi) {
      total += integrate_desingularized_upper(F, T, m, hi, ed, cfg);
      hi = m;
    }
  }
  if (hi > lo && e0 < 0.0 && cfg.use_substitution) {
    const double m = std::min(hi, 0.25 * T);
    if (lo < m) {
      total += integrate_desingularized_lower(F, 0.0, lo, m, e0, cfg);
      lo = m;
    }
  }
  if (lo < hi) total += integrate(F, lo, hi, cfg);
  return total;
}

}  // namespace detail

using detail::integrate_with_endpoint_behavior;

double l2_segment(const KernelSpec& k, double a, double b, double T,
                  const QuadratureConfig& cfg) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(T),
          "kernels.l2_segment: non-finite bounds");
  require(0.0 <= a && a <= b && b <= T, "kernels.l2_segment: require 0 <= a <= b <= T");
  if (a == b) return 0.0;
  switch (k.type()) {
    case KernelSpec::Type::constant:
      return sq(k.constant_value()) * (b - a);
    case KernelSpec::Type::rl: {
      const double h2 = 2.0 * k.hurst();
      return sq(k.normalization()) * (std::pow(T - a, h2) - std::pow(T - b, h2)) / h2;
    }
    case KernelSpec::Type::std_ou: {
      const double al = k.alpha();
      if (al == 0.0) return b - a;
      return (std::exp(2.0 * al * (T - a)) - std::exp(2.0 * al * (T - b))) / (2.0 * al);
    }
    default: {
      auto F = [&](double u) { return sq(k.evaluate(T, u, nested(cfg))); };
      return integrate_with_endpoint_behavior(F, a, b, T, 2.0 * k.exponent_at_zero(),
                                              2.0 * k.exponent_at_diagonal(), cfg);
    }
  }
}

double increment_variance(const KernelSpec& k, double s, double t,
                          const QuadratureConfig& cfg) {
  require(std::isfinite(s) && std::isfinite(t) && 0.0 <= s && s <= t,
          "kernels.increment_variance: require 0 <= s <= t");
  if (s == t) return 0.0;
  double var = l2_segment(k, s, t, t, cfg);
  if (s > 0.0) {
    auto F = [&](double u) {
      return sq(k.evaluate(t, u, nested(cfg)) - k.evaluate(s, u, nested(cfg)));
    };
    var += integrate_with_endpoint_behavior(F, 0.0, s, s, 2.0 * k.exponent_at_zero(),
                                            2.0 * k.exponent_at_diagonal(), cfg);
  }
  return var;
}

double covariance_integral(const KernelSpec& k, double s, double t,
                           const QuadratureConfig& cfg) {
  require(std::isfinite(s) && std::isfinite(t) && s >= 0.0 && t >= 0.0,
          "kernels.covariance_integral: require s,t >= 0");
  const double m = std::min(s, t);
  if (m == 0.0) return 0.0;
  if (s == t) return l2_segment(k, 0.0, t, t, cfg);
  auto F = [&](double u) {
    return k.evaluate(t, u, nested(cfg)) * k.evaluate(s, u, nested(cfg));
  };
  // Only the factor whose time equals min(s,t) can blow up at u->m.
  return integrate_with_endpoint_behavior(F, 0.0, m, m, 2.0 * k.exponent_at_zero(),
                                          k.exponent_at_diagonal(), cfg);
}

double first_moment_segment(const KernelSpec& k, double a, double b, double T,
                            const QuadratureConfig& cfg) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(T),
          "kernels.first_moment_segment: non-finite bounds");
  require(0.0 <= a && a <= b && b <= T,
          "kernels.first_moment_segment: require 0 <= a <= b <= T");
  if (a == b) return 0.0;
  switch (k.type()) {
    case KernelSpec::Type::constant:
      return k.constant_value() * (b - a);
    case KernelSpec::Type::rl: {
      const double p = k.hurst() + 0.5;
      return k.normalization() * (std::pow(T - a, p) - std::pow(T - b, p)) / p;
    }
    case KernelSpec::Type::std_ou: {
      const double al = k.alpha();
      if (al == 0.0) return b - a;
      return (std::exp(al * (T - a)) - std::exp(al * (T - b))) / al;
    }
    default: {
      auto F = [&](double u) { return k.evaluate(T, u, nested(cfg)); };
      return integrate_with_endpoint_behavior(F, a, b, T, k.exponent_at_zero(),
                                              k.exponent_at_diagonal(), cfg);
    }
  }
}

double flow_kernel(const KernelSpec& k, double t, double Tj, double Tk,
                   const QuadratureConfig& cfg) {
  require(std::isfinite(t) && std::isfinite(Tj) && std::isfinite(Tk),
          "kernels.flow_kernel: non-finite arguments");
  require(0.0 <= t && t <= Tj && Tj < Tk,
          "kernels.flow_kernel: require 0 <= t <= Tj < Tk");
  const double width = Tk - Tj;
  switch (k.type()) {
    case KernelSpec::Type::constant:
      return k.constant_value();
    case KernelSpec::Type::rl: {
      const double p = k.hurst() + 0.5;
      return k.normalization() * (std::pow(Tk - t, p) - std::pow(Tj - t, p)) / (p * width);
    }
    case KernelSpec::Type::std_ou: {
      const double al = k.alpha();
      if (al == 0.0) return 1.0;
      return (std::exp(al * (Tk - t)) - std::exp(al * (Tj - t))) / (al * width);
    }
    default: {
      auto g = [&](double T) { return k.evaluate(T, t, nested(cfg)); };
      const double qd = k.exponent_at_diagonal();
      if (Tj == t && qd < 0.0 && cfg.use_substitution) {
        return integrate_desingularized_lower(g, t, Tj, Tk, qd, cfg) / width;
      }
      return integrate(g, Tj, Tk, cfg) / width;
    }
  }
}

}  // namespace gvm
