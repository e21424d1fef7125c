#pragma once

#include <memory>
#include <string>

#include "gvm/quadrature.hpp"

namespace gvm {

// Hurst exponent in (0,1) with its roughness regime. H=1/2 is the Brownian
// boundary; the fractional kernels are defined only away from it.
class HurstExponent {
 public:
  enum class Regime { rough, brownian, smooth };

  explicit HurstExponent(double value);
  double value() const noexcept { return value_; }
  Regime regime() const noexcept {
    if (value_ < 0.5) return Regime::rough;
    if (value_ > 0.5) return Regime::smooth;
    return Regime::brownian;
  }

 private:
  double value_;
};

// Normalizations for the fractional kernels, chosen so that the resulting
// Gaussian process has variance t^{2H}.
double rl_normalization(double h);        // 1/Gamma(H+1/2)
double fbm_low_normalization(double h);   // sqrt(2H*Gamma(3/2-H)/(Gamma(H+1/2)*Gamma(2-2H)))
double fbm_high_normalization(double h);  // (H-1/2) * fbm_low_normalization(h)

// Description of one Volterra factor kernel K(t,s), s <= t:
//   constant      K = c                      (scaled Brownian motion)
//   rl            K = c_{H,U} (t-s)^{H-1/2}  (Riemann-Liouville)
//   fbm           Molchan-Golosov fractional Brownian kernel, H != 1/2
//   std_ou        K = exp(alpha (t-s))       (classical OU factor)
//   volterra_ou   OU driven by a base Volterra kernel
class KernelSpec {
 public:
  enum class Type { constant, rl, fbm, std_ou, volterra_ou };

  static KernelSpec constant(double c);
  static KernelSpec rl(HurstExponent h);
  static KernelSpec fbm(HurstExponent h);
  static KernelSpec std_ou(double alpha);
  static KernelSpec volterra_ou(double alpha, KernelSpec base);

  Type type() const noexcept { return type_; }
  double hurst() const;           // rl and fbm only
  double alpha() const;           // std_ou and volterra_ou only
  double constant_value() const;  // constant only
  double normalization() const;   // rl and fbm only
  const KernelSpec& base() const; // volterra_ou only

  // Point evaluation K(t,s). Throws singular_point_error on the diagonal for
  // kernels that blow up there and std::invalid_argument outside the domain.
  double evaluate(double t, double s, const QuadratureConfig& cfg = {}) const;

  // Local behavior, used to route integrals through smoothing substitutions:
  // K(t,u) ~ u^q as u->0+ (fixed t>0) and K(t,u) ~ (t-u)^q as u->t-.
  double exponent_at_zero() const;
  double exponent_at_diagonal() const;
  bool singular_at_diagonal() const { return exponent_at_diagonal() < 0.0; }
  // Kernels undefined at s=0 (the fractional family and anything built on it).
  bool singular_at_zero() const { return exponent_at_zero() < 0.0; }

  bool operator==(const KernelSpec& other) const;
  std::string describe() const;

 private:
  KernelSpec() = default;
  Type type_ = Type::constant;
  double hurst_ = 0.0;
  double alpha_ = 0.0;
  double c_ = 0.0;
  double norm_ = 0.0;
  std::shared_ptr<const KernelSpec> base_;
};

// Point evaluation of the individual kernel families. Preconditions follow
// the domain of each formula; violations throw std::invalid_argument or
// singular_point_error.
double rl_kernel(HurstExponent h, double t, double s);
double fbm_kernel_high(HurstExponent h, double t, double s, const QuadratureConfig& cfg = {});
double fbm_kernel_low(HurstExponent h, double t, double s, const QuadratureConfig& cfg = {});
// Scale-invariant profile of the rough fbm kernel: K(t,s) = cbar_H s^{H-1/2} profile(t/s).
double fbm_low_profile(HurstExponent h, double r, const QuadratureConfig& cfg = {});

// OU kernel driven by a base Volterra kernel:
//   K_Y(t,s) = alpha * int_s^t exp(alpha(t-v)) K_Z(v,s) dv + K_Z(t,s).
double ou_kernel(double alpha, const KernelSpec& base, double t, double s,
                 const QuadratureConfig& cfg = {});
// Same kernel via integration by parts, valid when K_Z vanishes on the
// diagonal and is differentiable in its first argument (rl / fbm, H > 1/2):
//   K_Y(t,s) = int_s^t exp(alpha(t-v)) dK_Z(v,s)/dv dv.
double ou_kernel_diff(double alpha, const KernelSpec& base, double t, double s,
                      const QuadratureConfig& cfg = {});

// int_a^b K(T,u)^2 du for 0 <= a <= b <= T; closed form where available.
double l2_segment(const KernelSpec& k, double a, double b, double T,
                  const QuadratureConfig& cfg = {});
// E|X_t - X_s|^2 of the Gaussian process X_t = int_0^t K(t,u) dW_u.
double increment_variance(const KernelSpec& k, double s, double t,
                          const QuadratureConfig& cfg = {});
// Cov(X_s, X_t) = int_0^{min(s,t)} K(t,u) K(s,u) du.
double covariance_integral(const KernelSpec& k, double s, double t,
                           const QuadratureConfig& cfg = {});
// int_a^b K(T,u) du for 0 <= a <= b <= T (drift adjustments).
double first_moment_segment(const KernelSpec& k, double a, double b, double T,
                            const QuadratureConfig& cfg = {});
// Delivery-averaged kernel (1/(Tk-Tj)) int_{Tj}^{Tk} K(T,t) dT, t <= Tj < Tk.
double flow_kernel(const KernelSpec& k, double t, double Tj, double Tk,
                   const QuadratureConfig& cfg = {});

}  // namespace gvm
