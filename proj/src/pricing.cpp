#include "gvm/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gvm/detail/endpoint_integration.hpp"
#include "gvm/kernels.hpp"
#include "gvm/special_functions.hpp"

namespace gvm {

DiscountCurve::DiscountCurve(std::vector<double> times, std::vector<double> rates)
    : times_(std::move(times)), rates_(std::move(rates)) {
  if (times_.empty() || times_.size() != rates_.size())
    throw std::invalid_argument("pricing.discount: times and rates must match and be nonempty");
  if (times_.front() != 0.0)
    throw std::invalid_argument("pricing.discount: first knot must sit at time zero");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(rates_[i]))
      throw std::invalid_argument("pricing.discount: rates must be finite");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw std::invalid_argument("pricing.discount: knots must be strictly increasing");
  }
}

DiscountCurve DiscountCurve::flat(double rate) { return DiscountCurve({0.0}, {rate}); }

double DiscountCurve::rate_at(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("pricing.discount: negative time");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return rates_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double DiscountCurve::discount_factor(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("pricing.discount: negative time");
  double acc = 0.0;
  for (std::size_t i = 0; i < times_.size() && times_[i] < t; ++i) {
    double hi = (i + 1 < times_.size()) ? std::min(times_[i + 1], t) : t;
    acc += rates_[i] * (hi - times_[i]);
  }
  return std::exp(-acc);
}

double bachelier_vol(const MarketSpec& market, double t, double expiry, double delivery,
                     const QuadratureConfig& cfg) {
  if (!(t >= 0.0 && expiry >= t && delivery >= expiry))
    throw std::invalid_argument("pricing.bachelier_vol: need 0 <= t <= expiry <= delivery");
  if (!(delivery <= market.horizon()))
    throw std::invalid_argument("pricing.bachelier_vol: delivery past the market horizon");
  if (expiry == t) return 0.0;
  double var = 0.0;
  for (const KernelSpec& k : market.factors()) var += l2_segment(k, t, expiry, delivery, cfg);
  return std::sqrt(var);
}

double call_price(double forward, double strike, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("pricing.call_price: negative sigma");
  if (sigma == 0.0) return std::max(forward - strike, 0.0);
  double d = (forward - strike) / sigma;
  return sigma * (d * normal_cdf(d) + normal_pdf(d));
}

double put_price(double forward, double strike, double sigma) {
  return call_price(forward, strike, sigma) - (forward - strike);
}

double hedge_delta(double forward, double strike, double sigma, bool is_call) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("pricing.hedge_delta: negative sigma");
  double call;
  if (sigma == 0.0) {
    call = forward > strike ? 1.0 : (forward < strike ? 0.0 : 0.5);
  } else {
    call = normal_cdf((forward - strike) / sigma);
  }
  return is_call ? call : call - 1.0;
}

OptionQuote quote_forward_option(const MarketSpec& market, double expiry,
                                 std::size_t maturity_index, double strike, bool is_call,
                                 const DiscountCurve& curve, const QuadratureConfig& cfg) {
  if (maturity_index >= market.n_maturities())
    throw std::invalid_argument("pricing.quote: maturity index out of range");
  double delivery = market.maturities()[maturity_index];
  if (!(expiry > 0.0 && expiry <= delivery))
    throw std::invalid_argument("pricing.quote: expiry must lie in (0, delivery]");

  OptionQuote q;
  double f0 = forward_initial(market, delivery, cfg).value;
  q.sigma = bachelier_vol(market, 0.0, expiry, delivery, cfg);
  q.d = q.sigma > 0.0 ? (f0 - strike) / q.sigma : 0.0;
  q.discount_factor = curve.discount_factor(expiry);
  double undiscounted = is_call ? call_price(f0, strike, q.sigma) : put_price(f0, strike, q.sigma);
  q.price = q.discount_factor * undiscounted;
  q.hedge_delta = hedge_delta(f0, strike, q.sigma, is_call);
  return q;
}

ReliabilityOptionPrice reliability_option_price(const MarketSpec& market, double strike,
                                                double lo, double hi, const DiscountCurve& curve,
                                                const QuadratureConfig& cfg) {
  if (!(lo >= 0.0 && hi > lo))
    throw std::invalid_argument("pricing.reliability_option: need 0 <= lo < hi");
  if (!(hi <= market.horizon()))
    throw std::invalid_argument("pricing.reliability_option: window past the market horizon");
  QuadratureConfig inner = detail::nested(cfg);
  auto integrand = [&](double t) {
    double f = risk_neutral_seasonality(market, t, inner);
    double sigma = bachelier_vol(market, 0.0, t, t, inner);
    return curve.discount_factor(t) * call_price(f, strike, sigma);
  };
  QuadratureResult r = integrate_adaptive(integrand, lo, hi, cfg);
  ReliabilityOptionPrice out;
  out.price = r.value;
  out.window_lo = lo;
  out.window_hi = hi;
  out.quadrature_panels = r.panels;
  return out;
}

double tracking_error(const MarketSpec& market, double t, double t_tilde, double t_lo,
                      double t_hi, const QuadratureConfig& cfg) {
  if (!(t > 0.0 && t <= t_lo && t_lo < t_hi))
    throw std::invalid_argument("pricing.tracking_error: need 0 < t <= t_lo < t_hi");
  if (!(t_tilde >= t_lo && t_tilde <= t_hi))
    throw std::invalid_argument("pricing.tracking_error: t_tilde must lie in [t_lo, t_hi]");

  QuadratureConfig inner = detail::nested(cfg);
  auto gap_sq = [&](double s) {
    double acc = 0.0;
    for (const KernelSpec& k : market.factors()) {
      double d = k.evaluate(t_tilde, s, inner) - flow_kernel(k, s, t_lo, t_hi, inner);
      acc += d * d;
    }
    return acc;
  };

  double e0 = 0.0;
  double ed = 0.0;
  for (const KernelSpec& k : market.factors()) {
    e0 = std::min(e0, 2.0 * k.exponent_at_zero());
    if (t == t_tilde) {
      double e = k.exponent_at_diagonal();
      ed = std::min(ed, e < 0.0 ? 2.0 * e : e);
    }
  }
  return detail::integrate_with_endpoint_behavior(gap_sq, 0.0, t, t, e0, ed, cfg);
}

}  // namespace gvm
