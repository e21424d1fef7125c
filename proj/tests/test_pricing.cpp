#include "gvm/pricing.hpp"

#include <cmath>

#include "doctest.h"
#include "gvm/errors.hpp"
#include "gvm/kernels.hpp"
#include "gvm/market.hpp"

using namespace gvm;

namespace {

MarketSpec quote_market(KernelSpec k, double theta, double level = 10.0) {
  return MarketSpec({std::move(k)}, {1.0, 2.0}, SeasonalityFn::constant(level),
                    ThetaFn({0.0}, {{theta}}), 2.0);
}

}  // namespace

TEST_CASE("discount curve integrates a piecewise-constant short rate") {
  DiscountCurve flat = DiscountCurve::flat(0.1);
  CHECK(flat.rate_at(0.0) == 0.1);
  CHECK(flat.rate_at(5.0) == 0.1);
  CHECK(flat.discount_factor(0.0) == 1.0);
  CHECK(flat.discount_factor(2.0) == doctest::Approx(std::exp(-0.2)).epsilon(1e-14));

  DiscountCurve steps({0.0, 1.0}, {0.1, 0.2});
  CHECK(steps.rate_at(0.5) == 0.1);
  CHECK(steps.rate_at(1.0) == 0.2);
  CHECK(steps.discount_factor(1.5) == doctest::Approx(std::exp(-0.2)).epsilon(1e-14));
  CHECK(steps.discount_factor(0.5) == doctest::Approx(std::exp(-0.05)).epsilon(1e-14));

  CHECK_THROWS_AS(DiscountCurve({0.5}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(DiscountCurve({0.0, 0.0}, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(DiscountCurve({0.0}, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(flat.discount_factor(-1.0), std::invalid_argument);
}

TEST_CASE("bachelier formulas reproduce reference values") {
  CHECK(call_price(100.0, 95.0, 10.0) == doctest::Approx(6.9779655740130603).epsilon(1e-14));
  CHECK(put_price(100.0, 95.0, 10.0) == doctest::Approx(1.9779655740130603).epsilon(1e-13));
  CHECK(call_price(100.0, 100.0, 10.0) == doctest::Approx(3.9894228040143268).epsilon(1e-14));
  CHECK(hedge_delta(100.0, 95.0, 10.0) == doctest::Approx(0.6914624612740131).epsilon(1e-14));
  CHECK(hedge_delta(100.0, 95.0, 10.0, false) ==
        doctest::Approx(0.6914624612740131 - 1.0).epsilon(1e-12));

  // zero volatility collapses to intrinsic value and indicator hedges
  CHECK(call_price(100.0, 95.0, 0.0) == 5.0);
  CHECK(call_price(90.0, 95.0, 0.0) == 0.0);
  CHECK(put_price(90.0, 95.0, 0.0) == 5.0);
  CHECK(hedge_delta(100.0, 95.0, 0.0) == 1.0);
  CHECK(hedge_delta(90.0, 95.0, 0.0) == 0.0);
  CHECK(hedge_delta(95.0, 95.0, 0.0) == 0.5);
  CHECK_THROWS_AS(call_price(100.0, 95.0, -1.0), std::invalid_argument);

  // put-call parity across strikes and volatilities
  for (double k : {80.0, 100.0, 120.0})
    for (double s : {0.5, 5.0, 25.0})
      CHECK(call_price(100.0, k, s) - put_price(100.0, k, s) ==
            doctest::Approx(100.0 - k).epsilon(1e-12));
}

TEST_CASE("integrated forward volatility matches the kernel integrals") {
  auto market = quote_market(KernelSpec::rl(HurstExponent(0.75)), 0.2);
  CHECK(bachelier_vol(market, 0.0, 1.0, 2.0) ==
        doctest::Approx(1.2180696282060675).epsilon(1e-9));
  CHECK(bachelier_vol(market, 0.5, 0.5, 2.0) == 0.0);
  CHECK_THROWS_AS(bachelier_vol(market, 0.5, 0.4, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(bachelier_vol(market, 0.0, 1.0, 3.0), std::invalid_argument);

  // two identical factors double the variance
  MarketSpec two({KernelSpec::std_ou(0.5), KernelSpec::std_ou(0.5)}, {1.0, 2.0},
                 SeasonalityFn::constant(10.0), ThetaFn({0.0}, {{0.1, 0.1}}), 2.0);
  double one_var = std::exp(1.0) - 1.0;
  CHECK(bachelier_vol(two, 0.0, 1.0, 1.0) ==
        doctest::Approx(std::sqrt(2.0 * one_var)).epsilon(1e-9));
}

TEST_CASE("forward option quotes wire level, volatility, and discounting together") {
  auto market = quote_market(KernelSpec::std_ou(0.5), 0.2);
  OptionQuote q = quote_forward_option(market, 1.0, 0, 9.0, true, DiscountCurve::flat(0.1));
  double f0 = 9.740511491719949;
  double sigma = std::sqrt(std::exp(1.0) - 1.0);
  CHECK(q.sigma == doctest::Approx(sigma).epsilon(1e-9));
  CHECK(q.d == doctest::Approx((f0 - 9.0) / sigma).epsilon(1e-9));
  CHECK(q.discount_factor == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
  CHECK(q.price == doctest::Approx(std::exp(-0.1) * call_price(f0, 9.0, sigma)).epsilon(1e-9));
  CHECK(q.hedge_delta == doctest::Approx(hedge_delta(f0, 9.0, sigma)).epsilon(1e-9));

  OptionQuote p = quote_forward_option(market, 1.0, 0, 9.0, false, DiscountCurve::flat(0.1));
  CHECK(q.price - p.price ==
        doctest::Approx(std::exp(-0.1) * (f0 - 9.0)).epsilon(1e-9));
  CHECK(q.hedge_delta - p.hedge_delta == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(quote_forward_option(market, 1.0, 7, 9.0, true), std::invalid_argument);
  CHECK_THROWS_AS(quote_forward_option(market, 2.5, 1, 9.0, true), std::invalid_argument);
}

TEST_CASE("reliability option integrates at-delivery call prices over the window") {
  auto market = quote_market(KernelSpec::constant(1.0), 0.0);
  ReliabilityOptionPrice ro = reliability_option_price(market, 10.0, 0.5, 1.0);
  CHECK(ro.price == doctest::Approx(0.17192992300966240).epsilon(1e-8));
  CHECK(ro.window_lo == 0.5);
  CHECK(ro.window_hi == 1.0);
  CHECK(ro.quadrature_panels >= 1);

  // discounting shrinks the strip price
  ReliabilityOptionPrice disc =
      reliability_option_price(market, 10.0, 0.5, 1.0, DiscountCurve::flat(0.2));
  CHECK(disc.price < ro.price);
  CHECK(disc.price > std::exp(-0.2) * ro.price);

  CHECK_THROWS_AS(reliability_option_price(market, 10.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(reliability_option_price(market, 10.0, 1.5, 2.5), std::invalid_argument);
}

TEST_CASE("tracking error accumulates the squared kernel gap") {
  auto market = quote_market(KernelSpec::rl(HurstExponent(0.75)), 0.2);
  double te = tracking_error(market, 0.5, 1.2, 1.0, 1.5);
  CHECK(te == doctest::Approx(7.1996571096676456e-5).epsilon(1e-8));
  CHECK(tracking_error(market, 0.3, 1.2, 1.0, 1.5) < te);

  // rough kernel with the hedge time at the window start: the integrand blows
  // up at both ends and must still integrate to something finite
  auto rough = quote_market(KernelSpec::fbm(HurstExponent(0.3)), 0.0);
  double rough_te = tracking_error(rough, 1.0, 1.0, 1.0, 1.5);
  CHECK(rough_te > 0.0);
  CHECK(std::isfinite(rough_te));
  QuadratureConfig tight;
  tight.abs_tol = 1e-12;
  tight.rel_tol = 1e-10;
  CHECK(tracking_error(rough, 1.0, 1.0, 1.0, 1.5, tight) ==
        doctest::Approx(rough_te).epsilon(1e-6));

  CHECK_THROWS_AS(tracking_error(market, 1.2, 1.2, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(tracking_error(market, 0.5, 0.9, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(tracking_error(market, 0.5, 1.7, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(tracking_error(market, -0.1, 1.2, 1.0, 1.5), std::invalid_argument);
}
