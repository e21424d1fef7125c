#include "gvm/market.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gvm/errors.hpp"

namespace gvm {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

SeasonalityFn SeasonalityFn::constant(double level) {
  require(std::isfinite(level), "market.seasonality: non-finite level");
  SeasonalityFn f;
  f.type_ = Type::constant;
  f.level_ = level;
  return f;
}

SeasonalityFn SeasonalityFn::sinusoidal(double mean, double amplitude, double period,
                                        double phase) {
  require(std::isfinite(mean) && std::isfinite(amplitude) && std::isfinite(phase),
          "market.seasonality: non-finite sinusoidal parameter");
  require(std::isfinite(period) && period > 0.0,
          "market.seasonality: sinusoidal period must be positive");
  SeasonalityFn f;
  f.type_ = Type::sinusoidal;
  f.mean_ = mean;
  f.amplitude_ = amplitude;
  f.period_ = period;
  f.phase_ = phase;
  return f;
}

SeasonalityFn SeasonalityFn::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  require(knots.size() >= 2, "market.seasonality: need at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require(std::isfinite(knots[i].first) && std::isfinite(knots[i].second),
            "market.seasonality: non-finite knot");
    require(i == 0 || knots[i - 1].first < knots[i].first,
            "market.seasonality: knot times must be strictly increasing");
  }
  SeasonalityFn f;
  f.type_ = Type::piecewise_linear;
  f.knots_ = std::move(knots);
  return f;
}

double SeasonalityFn::operator()(double t) const {
  switch (type_) {
    case Type::constant:
      return level_;
    case Type::sinusoidal:
      return mean_ + amplitude_ * std::sin(2.0 * std::numbers::pi * (t - phase_) / period_);
    case Type::piecewise_linear: {
      if (t <= knots_.front().first) return knots_.front().second;
      if (t >= knots_.back().first) return knots_.back().second;
      auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                 [](double x, const auto& k) { return x < k.first; });
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;  // unreachable
}

ThetaFn::ThetaFn(std::vector<double> times, std::vector<std::vector<double>> values)
    : times_(std::move(times)), values_(std::move(values)) {
  require(!times_.empty() && times_.size() == values_.size(),
          "market.theta: times and values must be non-empty and equally sized");
  require(times_.front() == 0.0, "market.theta: first piece must start at t=0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    require(std::isfinite(times_[i]), "market.theta: non-finite piece time");
    require(i == 0 || times_[i - 1] < times_[i],
            "market.theta: piece times must be strictly increasing");
    require(!values_[i].empty() && values_[i].size() == values_.front().size(),
            "market.theta: inconsistent dimension across pieces");
    require(all_finite(values_[i]), "market.theta: non-finite value");
  }
}

ThetaFn ThetaFn::constant(std::vector<double> value) {
  std::vector<std::vector<double>> values;
  values.push_back(std::move(value));
  return ThetaFn({0.0}, std::move(values));
}

const std::vector<double>& ThetaFn::value_at(double t) const {
  require(std::isfinite(t) && t >= 0.0, "market.theta: evaluation time must be >= 0");
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

Eigen::VectorXd ThetaFn::vector_at(double t) const {
  const auto& v = value_at(t);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double ThetaFn::squared_norm_integral(double a, double b) const {
  require(std::isfinite(a) && std::isfinite(b) && 0.0 <= a && a <= b,
          "market.theta: require 0 <= a <= b");
  double total = 0.0;
  for (std::size_t k = 0; k < times_.size(); ++k) {
    const double lo = std::max(a, times_[k]);
    const double hi =
        k + 1 < times_.size() ? std::min(b, times_[k + 1]) : b;
    if (hi <= lo) continue;
    double n2 = 0.0;
    for (double x : values_[k]) n2 += x * x;
    total += n2 * (hi - lo);
  }
  return total;
}

MarketSpec::MarketSpec(std::vector<KernelSpec> factors, std::vector<double> maturities,
                       SeasonalityFn seasonality, ThetaFn theta, double horizon)
    : factors_(std::move(factors)),
      maturities_(std::move(maturities)),
      seasonality_(std::move(seasonality)),
      theta_(std::move(theta)),
      horizon_(horizon) {
  require(!factors_.empty(), "market.spec: need at least one factor");
  require(!maturities_.empty(), "market.spec: need at least one traded maturity");
  require(std::isfinite(horizon_) && horizon_ > 0.0,
          "market.spec: horizon must be positive");
  for (std::size_t j = 0; j < maturities_.size(); ++j) {
    require(std::isfinite(maturities_[j]) && maturities_[j] > 0.0,
            "market.spec: maturities must be positive");
    require(j == 0 || maturities_[j - 1] < maturities_[j],
            "market.spec: maturities must be strictly increasing");
  }
  require(maturities_.back() <= horizon_,
          "market.spec: maturities must not exceed the horizon");
  require(theta_.dimension() == factors_.size(),
          "market.spec: theta dimension must match the number of factors");
  // Square-integrability probe: every factor must have finite L2 norm up to
  // the horizon (a loose tolerance suffices; failures throw).
  QuadratureConfig probe;
  probe.abs_tol = 1e-6;
  probe.rel_tol = 1e-4;
  probe.max_panels = 512;
  for (const auto& k : factors_) {
    const double v = l2_segment(k, 0.0, horizon_, horizon_, probe);
    require(std::isfinite(v), "market.spec: factor " + k.describe() +
                                  " is not square-integrable up to the horizon");
  }
}

double risk_neutral_seasonality(const MarketSpec& market, double T,
                                const QuadratureConfig& cfg) {
  require(std::isfinite(T) && T >= 0.0 && T <= market.horizon(),
          "market.risk_neutral_seasonality: require 0 <= T <= horizon");
  double adj = 0.0;
  const auto& theta = market.theta();
  for (std::size_t i = 0; i < market.n_factors(); ++i) {
    const KernelSpec& k = market.factors()[i];
    for (std::size_t p = 0; p < theta.times().size(); ++p) {
      const double lo = std::min(theta.times()[p], T);
      const double hi =
          p + 1 < theta.times().size() ? std::min(theta.times()[p + 1], T) : T;
      if (hi <= lo) continue;
      const double th = theta.values()[p][i];
      if (th != 0.0) adj += th * first_moment_segment(k, lo, hi, T, cfg);
    }
  }
  return market.seasonality()(T) - adj;
}

ForwardQuote forward_initial(const MarketSpec& market, double T,
                             const QuadratureConfig& cfg) {
  return ForwardQuote{0.0, T, risk_neutral_seasonality(market, T, cfg)};
}

KernelMatrix kernel_matrix(const MarketSpec& market, double t,
                           const QuadratureConfig& cfg) {
  require(std::isfinite(t) && t >= 0.0 && t < market.maturities().front(),
          "market.kernel_matrix: require 0 <= t < first maturity");
  const auto m = static_cast<Eigen::Index>(market.n_maturities());
  const auto n = static_cast<Eigen::Index>(market.n_factors());
  KernelMatrix km;
  km.t = t;
  km.values.resize(m, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const KernelSpec& k = market.factors()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j) {
      const double Tj = market.maturities()[static_cast<std::size_t>(j)];
      try {
        km.values(j, i) = k.evaluate(Tj, t, cfg);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("market.kernel_matrix: factor " + std::to_string(i) +
                                    " at maturity " + std::to_string(Tj) + ": " + e.what());
      }
    }
  }
  return km;
}

DriftVol drift_vol(const MarketSpec& market, double t, const QuadratureConfig& cfg) {
  DriftVol dv;
  dv.sigma = kernel_matrix(market, t, cfg).values;
  dv.mu = dv.sigma * market.theta().vector_at(t);
  return dv;
}

Eigen::VectorXd solve_theta(const Eigen::VectorXd& mu_bar, const KernelMatrix& kmat) {
  const Eigen::MatrixXd& K = kmat.values;
  require(mu_bar.size() == K.rows(),
          "market.solve_theta: drift vector length must match the maturity count");
  require(K.rows() >= K.cols(),
          "market.solve_theta: need at least as many maturities as factors");

  // Normal equations with LDLT; fall back to SVD when the Gram matrix looks
  // ill-conditioned, and reject rank-deficient loadings outright.
  const Eigen::MatrixXd gram = K.transpose() * K;
  Eigen::VectorXd theta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  bool need_svd = ldlt.info() != Eigen::Success;
  if (!need_svd) {
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.maxCoeff();
    const double dmin = d.minCoeff();
    // cond(K)^2 == cond(gram); 1e16 here corresponds to cond(K) ~ 1e8.
    need_svd = !(dmin > 0.0) || dmax > 1e16 * dmin;
  }
  if (need_svd) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
      throw incompleteness_error("market.solve_theta", kmat.t);
    }
    theta = svd.solve(mu_bar);
  } else {
    theta = ldlt.solve(K.transpose() * mu_bar);
  }

  const double residual = (K * theta - mu_bar).norm();
  if (residual > 1e-8 * (1.0 + mu_bar.norm())) {
    throw arbitrage_inconsistent_drift_error(
        "market.solve_theta: observed drifts are not spanned by the factor loadings "
        "(residual " + std::to_string(residual) + " at t=" + std::to_string(kmat.t) + ")");
  }
  return theta;
}

std::vector<double> flow_forward_vol(const MarketSpec& market, double t, double Tj,
                                     double Tk, const QuadratureConfig& cfg) {
  require(Tk <= market.horizon(),
          "market.flow_forward_vol: delivery window must end within the horizon");
  std::vector<double> vols;
  vols.reserve(market.n_factors());
  for (const auto& k : market.factors()) {
    vols.push_back(flow_kernel(k, t, Tj, Tk, cfg));
  }
  return vols;
}

}  // namespace gvm
