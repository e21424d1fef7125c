#include <doctest.h>

#include <cmath>
#include <functional>

#include "gvm/errors.hpp"
#include "gvm/kernels.hpp"

using namespace gvm;

namespace {

// Reference values below were generated with 40-digit arbitrary-precision
// quadrature against the defining integral formulas, independently of the
// adaptive integrator under test.

constexpr double kRlNorm075 = 1.1032626513208372574;    // 1/Gamma(1.25)
constexpr double kRlNorm025 = 0.81604893909826298108;   // 1/Gamma(0.75)
constexpr double kLowNorm03 = 0.7302829340799229657;
constexpr double kHighNorm07 = 0.21836182617678251758;

// Independent composite Simpson rule for crosschecking smooth integrals.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double s = f(a) + f(b);
  const double h = (b - a) / n;
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("hurst regimes and validation") {
  CHECK(HurstExponent(0.3).regime() == HurstExponent::Regime::rough);
  CHECK(HurstExponent(0.5).regime() == HurstExponent::Regime::brownian);
  CHECK(HurstExponent(0.7).regime() == HurstExponent::Regime::smooth);
  CHECK_THROWS_AS(HurstExponent(0.0), std::invalid_argument);
  CHECK_THROWS_AS(HurstExponent(1.0), std::invalid_argument);
  CHECK_THROWS_AS(HurstExponent(-0.2), std::invalid_argument);
}

TEST_CASE("fractional normalizations") {
  CHECK(rl_normalization(0.75) == doctest::Approx(kRlNorm075).epsilon(1e-14));
  CHECK(rl_normalization(0.25) == doctest::Approx(kRlNorm025).epsilon(1e-14));
  CHECK(fbm_low_normalization(0.3) == doctest::Approx(kLowNorm03).epsilon(1e-13));
  CHECK(fbm_high_normalization(0.7) == doctest::Approx(kHighNorm07).epsilon(1e-13));
  // At the Brownian boundary every normalization collapses to 1.
  CHECK(rl_normalization(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fbm_low_normalization(0.5) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("riemann-liouville kernel point values") {
  CHECK(rl_kernel(HurstExponent(0.75), 2.0, 1.0) ==
        doctest::Approx(kRlNorm075).epsilon(1e-14));
  CHECK(rl_kernel(HurstExponent(0.5), 3.0, 0.4) == doctest::Approx(1.0));
  CHECK(rl_kernel(HurstExponent(0.75), 1.0, 1.0) == 0.0);
  CHECK(rl_kernel(HurstExponent(0.5), 1.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rl_kernel(HurstExponent(0.25), 1.0, 1.0), singular_point_error);
  CHECK_THROWS_AS(rl_kernel(HurstExponent(0.75), 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("smooth-regime fbm kernel") {
  CHECK(fbm_kernel_high(HurstExponent(0.7), 1.0, 0.5) ==
        doctest::Approx(0.97714049739361676047).epsilon(1e-9));
  CHECK(fbm_kernel_high(HurstExponent(0.6), 2.0, 1e-3) ==
        doctest::Approx(1.5124098209894089613).epsilon(1e-8));
  CHECK(fbm_kernel_high(HurstExponent(0.7), 2.0, 2.0) == 0.0);
  CHECK_THROWS_AS(fbm_kernel_high(HurstExponent(0.7), 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fbm_kernel_high(HurstExponent(0.3), 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("rough-regime fbm kernel") {
  CHECK(fbm_kernel_low(HurstExponent(0.3), 2.0, 1.0) ==
        doctest::Approx(0.76000292900299440081).epsilon(1e-9));
  CHECK(fbm_low_profile(HurstExponent(0.3), 2.0) ==
        doctest::Approx(1.0406965486062130082).epsilon(1e-9));
  CHECK(fbm_kernel_low(HurstExponent(0.45), 1.0, 0.999) ==
        doctest::Approx(1.3347385452478915309).epsilon(1e-8));
  CHECK_THROWS_AS(fbm_kernel_low(HurstExponent(0.3), 1.0, 1.0), singular_point_error);
  CHECK_THROWS_AS(fbm_kernel_low(HurstExponent(0.3), 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fbm_kernel_low(HurstExponent(0.7), 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("fbm kernel reproduces fBm variance t^{2H}") {
  // The defining property of the normalization: int_0^T K(T,u)^2 du = T^{2H}.
  const KernelSpec low = KernelSpec::fbm(HurstExponent(0.3));
  const KernelSpec high = KernelSpec::fbm(HurstExponent(0.7));
  CHECK(l2_segment(low, 0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(l2_segment(low, 0.0, 2.0, 2.0) ==
        doctest::Approx(1.5157165665103980823).epsilon(1e-7));  // 2^{0.6}
  CHECK(l2_segment(high, 0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(l2_segment(high, 0.0, 2.0, 2.0) ==
        doctest::Approx(2.6390158215457885187).epsilon(1e-7));  // 2^{1.4}
}

TEST_CASE("fbm kernel reproduces fBm covariance and increments") {
  const KernelSpec low = KernelSpec::fbm(HurstExponent(0.3));
  const KernelSpec high = KernelSpec::fbm(HurstExponent(0.7));
  CHECK(covariance_integral(high, 1.0, 2.0) ==
        doctest::Approx(1.3195079107728942594).epsilon(1e-7));
  CHECK(covariance_integral(low, 1.0, 2.0) ==
        doctest::Approx(0.75785828325519904117).epsilon(1e-7));
  // Stationary increments: E|X_t - X_s|^2 = (t-s)^{2H}.
  CHECK(increment_variance(high, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(increment_variance(low, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(increment_variance(low, 0.7, 1.2) ==
        doctest::Approx(0.65975395538644712969).epsilon(1e-6));  // 0.5^{0.6}
  // Symmetric-argument covariance identity.
  const double s = 0.4, t = 1.7, h2 = 0.6;
  const double exact =
      0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(t - s, h2));
  CHECK(covariance_integral(low, s, t) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(covariance_integral(low, t, s) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("brownian degeneration of the fbm kernel") {
  // As H -> 1/2 the kernel approaches the Brownian kernel K == 1.
  const double eps = 1e-3;
  for (double h : {0.5 - eps, 0.5 + eps}) {
    const KernelSpec k = KernelSpec::fbm(HurstExponent(h));
    for (double s : {0.25, 0.5, 0.9}) {
      CHECK(std::abs(k.evaluate(1.0, s) - 1.0) < 2e-2);
    }
  }
  CHECK_THROWS_AS(KernelSpec::fbm(HurstExponent(0.5)), std::invalid_argument);
}

TEST_CASE("ou kernel against reference values") {
  const KernelSpec rl75 = KernelSpec::rl(HurstExponent(0.75));
  CHECK(ou_kernel(0.5, rl75, 1.0, 0.2) ==
        doctest::Approx(1.4446969006584041708).epsilon(1e-9));
  CHECK(ou_kernel_diff(0.5, rl75, 1.0, 0.2) ==
        doctest::Approx(1.4446969006584041708).epsilon(1e-9));
  // Negative mean reversion with a rough base.
  CHECK(ou_kernel(-0.8, KernelSpec::rl(HurstExponent(0.3)), 1.0, 0.4) ==
        doctest::Approx(0.50964293166998422658).epsilon(1e-9));
  // Nested quadrature with an fbm base.
  CHECK(ou_kernel(0.5, KernelSpec::fbm(HurstExponent(0.7)), 1.0, 0.25) ==
        doctest::Approx(1.4996607102277284907).epsilon(1e-8));
  // Constant base has a closed form.
  CHECK(ou_kernel(0.3, KernelSpec::constant(2.0), 1.5, 0.5) ==
        doctest::Approx(2.0 * std::exp(0.3)).epsilon(1e-14));
  // alpha = 0 degenerates to the base kernel.
  CHECK(ou_kernel(0.0, rl75, 1.0, 0.2) ==
        doctest::Approx(rl75.evaluate(1.0, 0.2)).epsilon(1e-14));
}

TEST_CASE("ou kernel routes agree on a sampled grid") {
  for (const KernelSpec& base : {KernelSpec::rl(HurstExponent(0.6)),
                                 KernelSpec::rl(HurstExponent(0.9)),
                                 KernelSpec::fbm(HurstExponent(0.8))}) {
    for (int i = 1; i <= 4; ++i) {
      for (int j = 0; j < i; ++j) {
        const double t = 0.5 * i;
        const double s = 0.5 * j + 0.1;
        const double a = ou_kernel(0.5, base, t, s);
        const double b = ou_kernel_diff(0.5, base, t, s);
        CHECK(std::abs(a - b) <= 1e-7);
      }
    }
  }
}

TEST_CASE("ou kernel integration by parts demands a vanishing diagonal") {
  CHECK_THROWS_AS(ou_kernel_diff(0.5, KernelSpec::fbm(HurstExponent(0.3)), 1.0, 0.5),
                  unsupported_regime_error);
  CHECK_THROWS_AS(ou_kernel_diff(0.5, KernelSpec::rl(HurstExponent(0.5)), 1.0, 0.5),
                  unsupported_regime_error);
  CHECK_THROWS_AS(ou_kernel_diff(0.5, KernelSpec::rl(HurstExponent(0.3)), 1.0, 0.5),
                  unsupported_regime_error);
  CHECK_THROWS_AS(ou_kernel_diff(0.5, KernelSpec::std_ou(0.5), 1.0, 0.5),
                  unsupported_regime_error);
  CHECK_THROWS_AS(ou_kernel_diff(0.5, KernelSpec::constant(1.0), 1.0, 0.5),
                  unsupported_regime_error);
}

TEST_CASE("l2 segments: closed forms and quadrature") {
  const KernelSpec rl75 = KernelSpec::rl(HurstExponent(0.75));
  CHECK(l2_segment(rl75, 0.0, 1.0, 1.0) ==
        doctest::Approx(0.81145898519965555165).epsilon(1e-13));
  const KernelSpec ou = KernelSpec::std_ou(0.7);
  const double closed = (std::exp(2 * 0.7 * 1.0) - std::exp(2 * 0.7 * 0.25)) / (2 * 0.7);
  CHECK(l2_segment(ou, 0.0, 0.75, 1.0) == doctest::Approx(closed).epsilon(1e-13));
  CHECK(l2_segment(ou, 0.0, 0.75, 1.0) ==
        doctest::Approx(simpson([](double u) { return std::exp(2 * 0.7 * (1.0 - u)); },
                                0.0, 0.75, 2000)).epsilon(1e-10));
  CHECK(l2_segment(KernelSpec::constant(3.0), 0.2, 0.7, 1.0) == doctest::Approx(4.5));
  // Interior fbm segment against the arbitrary-precision reference.
  CHECK(l2_segment(KernelSpec::fbm(HurstExponent(0.3)), 0.2, 0.8, 1.0) ==
        doctest::Approx(0.4785247538578008929).epsilon(1e-8));
  // Volterra OU over an rl base, both endpoints handled.
  const KernelSpec vol = KernelSpec::volterra_ou(0.5, rl75);
  CHECK(l2_segment(vol, 0.0, 1.0, 1.0) ==
        doctest::Approx(1.3508095068199631568).epsilon(1e-8));
  CHECK(covariance_integral(vol, 0.5, 1.0) ==
        doctest::Approx(0.59494583513277867737).epsilon(1e-8));
  CHECK_THROWS_AS(l2_segment(rl75, 0.5, 0.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(l2_segment(rl75, 0.0, 1.2, 1.0), std::invalid_argument);
}

TEST_CASE("first moment segments") {
  const KernelSpec rl75 = KernelSpec::rl(HurstExponent(0.75));
  // Closed form: c[(T-a)^{H+1/2} - (T-b)^{H+1/2}]/(H+1/2).
  CHECK(first_moment_segment(rl75, 0.0, 1.0, 1.0) ==
        doctest::Approx(kRlNorm075 / 1.25).epsilon(1e-13));
  CHECK(first_moment_segment(KernelSpec::fbm(HurstExponent(0.3)), 0.0, 1.0, 1.0) ==
        doctest::Approx(0.97580344683686453327).epsilon(1e-8));
  CHECK(first_moment_segment(KernelSpec::fbm(HurstExponent(0.7)), 0.0, 1.0, 1.0) ==
        doctest::Approx(0.97258296612281297487).epsilon(1e-8));
  const KernelSpec ou = KernelSpec::std_ou(-1.1);
  CHECK(first_moment_segment(ou, 0.1, 0.6, 2.0) ==
        doctest::Approx((std::exp(-1.1 * 1.9) - std::exp(-1.1 * 1.4)) / -1.1)
            .epsilon(1e-13));
}

TEST_CASE("flow kernels") {
  const KernelSpec rl75 = KernelSpec::rl(HurstExponent(0.75));
  CHECK(flow_kernel(rl75, 0.0, 1.0, 2.0) ==
        doctest::Approx(1.216602350411339579).epsilon(1e-13));
  const KernelSpec ou = KernelSpec::std_ou(0.5);
  CHECK(flow_kernel(ou, 0.3, 1.0, 2.0) ==
        doctest::Approx((std::exp(0.5 * 1.7) - std::exp(0.5 * 0.7)) / 0.5).epsilon(1e-13));
  CHECK(flow_kernel(KernelSpec::constant(2.5), 0.1, 0.5, 1.5) == doctest::Approx(2.5));
  CHECK(flow_kernel(KernelSpec::fbm(HurstExponent(0.7)), 0.5, 1.0, 2.0) ==
        doctest::Approx(1.138020569452597559).epsilon(1e-8));
  // Averaging window starting exactly at t, rough kernel: the integrand blows
  // up at the left edge and the substitution must absorb it.
  CHECK(flow_kernel(KernelSpec::fbm(HurstExponent(0.3)), 1.0, 1.0, 2.0) ==
        doctest::Approx(0.93050076575454508718).epsilon(1e-8));
  CHECK_THROWS_AS(flow_kernel(rl75, 1.5, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(flow_kernel(rl75, 0.5, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("kernel spec evaluation dispatch and equality") {
  const KernelSpec k1 = KernelSpec::volterra_ou(0.5, KernelSpec::rl(HurstExponent(0.75)));
  CHECK(k1.evaluate(1.0, 0.2) == doctest::Approx(1.4446969006584041708).epsilon(1e-9));
  CHECK(k1 == KernelSpec::volterra_ou(0.5, KernelSpec::rl(HurstExponent(0.75))));
  CHECK(!(k1 == KernelSpec::volterra_ou(0.4, KernelSpec::rl(HurstExponent(0.75)))));
  CHECK(KernelSpec::std_ou(2.0).evaluate(1.5, 1.0) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(KernelSpec::constant(3.0).evaluate(5.0, 0.0) == 3.0);
  CHECK_THROWS_AS(KernelSpec::fbm(HurstExponent(0.3)).evaluate(1.0, 1.0),
                  singular_point_error);
  CHECK_THROWS_AS(KernelSpec::fbm(HurstExponent(0.7)).evaluate(1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::constant(0.0), std::invalid_argument);
  CHECK(KernelSpec::fbm(HurstExponent(0.3)).singular_at_diagonal());
  CHECK(!KernelSpec::fbm(HurstExponent(0.7)).singular_at_diagonal());
  CHECK(KernelSpec::fbm(HurstExponent(0.7)).singular_at_zero());
  CHECK(!KernelSpec::rl(HurstExponent(0.3)).singular_at_zero());
}
