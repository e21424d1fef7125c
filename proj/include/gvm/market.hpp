#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

#include "gvm/kernels.hpp"

namespace gvm {

// Deterministic seasonal level of the spot curve.
class SeasonalityFn {
 public:
  enum class Type { constant, sinusoidal, piecewise_linear };

  static SeasonalityFn constant(double level);
  static SeasonalityFn sinusoidal(double mean, double amplitude, double period,
                                  double phase);
  static SeasonalityFn piecewise_linear(std::vector<std::pair<double, double>> knots);

  double operator()(double t) const;
  Type type() const noexcept { return type_; }
  double level() const { return level_; }
  double mean() const { return mean_; }
  double amplitude() const { return amplitude_; }
  double period() const { return period_; }
  double phase() const { return phase_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }
  bool operator==(const SeasonalityFn& other) const = default;

 private:
  SeasonalityFn() = default;
  Type type_ = Type::constant;
  double level_ = 0.0;
  double mean_ = 0.0, amplitude_ = 0.0, period_ = 1.0, phase_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
};

// Piecewise-constant market price of risk theta: [0,inf) -> R^n, with pieces
// [times[k], times[k+1]) and the last piece extending to infinity.
class ThetaFn {
 public:
  ThetaFn(std::vector<double> times, std::vector<std::vector<double>> values);
  static ThetaFn constant(std::vector<double> value);

  std::size_t dimension() const { return values_.front().size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<double>>& values() const { return values_; }

  const std::vector<double>& value_at(double t) const;
  Eigen::VectorXd vector_at(double t) const;
  // int_a^b |theta(s)|^2 ds, exact over the piecewise-constant structure.
  double squared_norm_integral(double a, double b) const;
  bool operator==(const ThetaFn& other) const = default;

 private:
  std::vector<double> times_;
  std::vector<std::vector<double>> values_;
};

// Static description of the forward market: n Volterra factors, m traded
// maturities, a seasonal curve, and the market price of risk.
class MarketSpec {
 public:
  MarketSpec(std::vector<KernelSpec> factors, std::vector<double> maturities,
             SeasonalityFn seasonality, ThetaFn theta, double horizon);

  std::size_t n_factors() const { return factors_.size(); }
  std::size_t n_maturities() const { return maturities_.size(); }
  const std::vector<KernelSpec>& factors() const { return factors_; }
  const std::vector<double>& maturities() const { return maturities_; }
  const SeasonalityFn& seasonality() const { return seasonality_; }
  const ThetaFn& theta() const { return theta_; }
  double horizon() const { return horizon_; }

 private:
  std::vector<KernelSpec> factors_;
  std::vector<double> maturities_;
  SeasonalityFn seasonality_;
  ThetaFn theta_;
  double horizon_;
};

// Factor loadings of the traded forwards at time t: values(j,i) = K_i(T_j, t).
struct KernelMatrix {
  double t = 0.0;
  Eigen::MatrixXd values;
};

struct ForwardQuote {
  double t = 0.0;
  double maturity = 0.0;
  double value = 0.0;
};

struct DriftVol {
  Eigen::VectorXd mu;     // per maturity: K(T_j,t) . theta(t)
  Eigen::MatrixXd sigma;  // m x n factor loadings
};

// Seasonality under the pricing measure:
//   phi_Q(T) = phi(T) - sum_i int_0^T K_i(T,s) theta_i(s) ds.
double risk_neutral_seasonality(const MarketSpec& market, double T,
                                const QuadratureConfig& cfg = {});

// Initial forward quote F(0,T) = phi_Q(T).
ForwardQuote forward_initial(const MarketSpec& market, double T,
                             const QuadratureConfig& cfg = {});

// Drift and volatility loadings of the traded forwards at time t < T_1.
DriftVol drift_vol(const MarketSpec& market, double t, const QuadratureConfig& cfg = {});

KernelMatrix kernel_matrix(const MarketSpec& market, double t,
                           const QuadratureConfig& cfg = {});

// Recovers theta(t) from observed forward drifts: solves K(t) theta = mu_bar
// in the least-squares sense, rejecting rank-deficient loadings
// (incompleteness_error) and unattainable drifts
// (arbitrage_inconsistent_drift_error).
Eigen::VectorXd solve_theta(const Eigen::VectorXd& mu_bar, const KernelMatrix& kmat);

// Volatility loadings of a delivery-window (flow) forward over [Tj, Tk].
std::vector<double> flow_forward_vol(const MarketSpec& market, double t, double Tj,
                                     double Tk, const QuadratureConfig& cfg = {});

}  // namespace gvm
