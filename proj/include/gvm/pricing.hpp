#pragma once

#include <cstddef>
#include <vector>

#include "gvm/market.hpp"
#include "gvm/quadrature.hpp"

namespace gvm {

// Piecewise-constant short rate; discount_factor(t) = exp(-int_0^t r).
class DiscountCurve {
 public:
  DiscountCurve(std::vector<double> times, std::vector<double> rates);
  static DiscountCurve flat(double rate);

  double rate_at(double t) const;
  double discount_factor(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> rates_;
};

// Integrated standard deviation of F(., delivery) accumulated over
// [t, expiry]: the sum over factors of the squared-kernel integrals.
double bachelier_vol(const MarketSpec& market, double t, double expiry, double delivery,
                     const QuadratureConfig& cfg = {});

// Undiscounted Bachelier prices on a forward; sigma is the integrated
// standard deviation over the option's life. sigma = 0 collapses to the
// intrinsic value.
double call_price(double forward, double strike, double sigma);
double put_price(double forward, double strike, double sigma);
double hedge_delta(double forward, double strike, double sigma, bool is_call = true);

struct OptionQuote {
  double price = 0.0;
  double hedge_delta = 0.0;
  double sigma = 0.0;
  double d = 0.0;  // moneyness (forward - strike) / sigma; zero when sigma vanishes
  double discount_factor = 1.0;
};

// Discounted quote for an option expiring at `expiry` on the forward with the
// given maturity index.
OptionQuote quote_forward_option(const MarketSpec& market, double expiry,
                                 std::size_t maturity_index, double strike, bool is_call,
                                 const DiscountCurve& curve = DiscountCurve::flat(0.0),
                                 const QuadratureConfig& cfg = {});

struct ReliabilityOptionPrice {
  double price = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int quadrature_panels = 0;
};

// Strip of at-delivery spot calls over [lo, hi]: the integral over delivery
// times of the discounted Bachelier price of a call on S(T) struck at K.
ReliabilityOptionPrice reliability_option_price(const MarketSpec& market, double strike,
                                                double lo, double hi,
                                                const DiscountCurve& curve =
                                                    DiscountCurve::flat(0.0),
                                                const QuadratureConfig& cfg = {});

// Integrated squared gap accumulated to time t between the delivery-T_tilde
// forward's kernel loadings and the flow forward covering [t_lo, t_hi]:
// the variance left over when hedging one with the other.
double tracking_error(const MarketSpec& market, double t, double t_tilde, double t_lo,
                      double t_hi, const QuadratureConfig& cfg = {});

}  // namespace gvm
