#include "gvm/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gvm/completeness.hpp"
#include "gvm/errors.hpp"
#include "gvm/parallel.hpp"

namespace gvm {

CRRAPolicy::CRRAPolicy(MarketSpec market, double gamma, double x0, double horizon)
    : market_(std::move(market)), gamma_(gamma), x0_(x0), horizon_(horizon) {
  if (!(gamma_ < 1.0)) throw std::invalid_argument("CRRAPolicy: gamma must be below one");
  if (!(x0_ > 0.0)) throw std::invalid_argument("CRRAPolicy: initial wealth must be positive");
  if (!(horizon_ > 0.0)) throw std::invalid_argument("CRRAPolicy: horizon must be positive");
  if (horizon_ > market_.maturities().front())
    throw std::invalid_argument("CRRAPolicy: horizon must not exceed the first maturity");
  if (horizon_ > market_.horizon())
    throw std::invalid_argument("CRRAPolicy: horizon must not exceed the market horizon");
  h0_ = h_factor(0.0);
  lambda_ = std::pow(x0_ / h0_, gamma_ - 1.0);
}

double CRRAPolicy::h_factor(double t) const {
  if (!(t >= 0.0 && t <= horizon_))
    throw std::invalid_argument("CRRAPolicy: time outside [0, horizon]");
  double load = market_.theta().squared_norm_integral(t, horizon_);
  return std::exp(0.5 * beta() / (1.0 - gamma_) * load);
}

double CRRAPolicy::utility(double wealth) const {
  if (!(wealth > 0.0)) throw std::invalid_argument("CRRAPolicy: utility needs positive wealth");
  if (gamma_ == 0.0) return std::log(wealth);
  return std::pow(wealth, gamma_) / gamma_;
}

double CRRAPolicy::terminal_wealth(double z) const {
  if (!(z > 0.0)) throw std::invalid_argument("CRRAPolicy: density must be positive");
  return x0_ / h0_ * std::pow(z, 1.0 / (gamma_ - 1.0));
}

double CRRAPolicy::optimal_wealth(double t, double z) const {
  if (!(z > 0.0)) throw std::invalid_argument("CRRAPolicy: density must be positive");
  return x0_ * (h_factor(t) / h0_) * std::pow(z, -1.0 / (1.0 - gamma_));
}

double CRRAPolicy::expected_utility_closed() const {
  double load = market_.theta().squared_norm_integral(0.0, horizon_);
  if (gamma_ == 0.0) return std::log(x0_) + 0.5 * load;
  return std::pow(x0_, gamma_) / gamma_ * std::pow(h0_, 1.0 - gamma_);
}

Eigen::RowVectorXd optimal_delta(const CRRAPolicy& policy, double t, double wealth,
                                 const QuadratureConfig& cfg) {
  const MarketSpec& market = policy.market();
  Eigen::MatrixXd li = left_inverse(kernel_matrix(market, t, cfg));
  Eigen::VectorXd theta = market.theta().vector_at(t);
  return wealth / (1.0 - policy.gamma()) * (theta.transpose() * li);
}

ReplicationResult replicate(const CRRAPolicy& policy, const PathEnsemble& ensemble, int threads,
                            const QuadratureConfig& cfg) {
  const MarketSpec& market = policy.market();
  const TimeGrid& grid = ensemble.grid;
  if (ensemble.n_factors != market.n_factors())
    throw std::invalid_argument("replicate: ensemble factor count does not match the market");
  if (std::abs(grid.t_end() - policy.horizon()) > 1e-12)
    throw std::invalid_argument("replicate: grid must end at the policy horizon");

  const std::size_t n_steps = grid.n_steps();
  const std::size_t m = market.n_maturities();
  const std::size_t nf = market.n_factors();
  const double inv_rel = 1.0 / (1.0 - policy.gamma());

  // Loadings, risk premia, and hedge row vectors per step; path independent.
  std::vector<Eigen::MatrixXd> loadings(n_steps);
  std::vector<Eigen::VectorXd> thetas(n_steps);
  parallel_for(n_steps, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      Eigen::MatrixXd b(m, nf);
      Eigen::VectorXd th(nf);
      for (std::size_t i = 0; i < nf; ++i) {
        double node = shock_node(market.factors()[i], grid, k);
        th[static_cast<Eigen::Index>(i)] = market.theta().value_at(node)[i];
        for (std::size_t j = 0; j < m; ++j)
          b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
              market.factors()[i].evaluate(market.maturities()[j], node, cfg);
      }
      loadings[k] = std::move(b);
      thetas[k] = std::move(th);
    }
  });

  ReplicationResult result;
  std::vector<Eigen::RowVectorXd> rows(n_steps);
  Eigen::RowVectorXd last_row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(m));
  int consecutive = 0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    try {
      Eigen::MatrixXd li = left_inverse(KernelMatrix{grid.point(k), loadings[k]});
      last_row = inv_rel * (thetas[k].transpose() * li);
      consecutive = 0;
    } catch (const incompleteness_error&) {
      result.skipped_times.push_back(grid.point(k));
      if (++consecutive >= 3) throw;
    }
    rows[k] = last_row;
  }

  std::vector<double> mismatch(ensemble.n_paths);
  parallel_for(ensemble.n_paths, threads, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd xi(static_cast<Eigen::Index>(nf));
    for (std::size_t p = lo; p < hi; ++p) {
      double wealth = policy.x0();
      double log_z = 0.0;
      for (std::size_t k = 0; k < n_steps; ++k) {
        double dt = grid.dt(k);
        for (std::size_t i = 0; i < nf; ++i)
          xi[static_cast<Eigen::Index>(i)] = ensemble.increment(p, k, i);
        Eigen::VectorXd df = loadings[k] * (xi + thetas[k] * dt);
        wealth += wealth * rows[k].dot(df);
        log_z -= thetas[k].dot(xi) + 0.5 * thetas[k].squaredNorm() * dt;
      }
      double target = policy.terminal_wealth(std::exp(log_z));
      mismatch[p] = std::abs(wealth - target) / target;
    }
  });
  result.max_rel_mismatch = *std::max_element(mismatch.begin(), mismatch.end());
  result.mean_rel_mismatch = mc_estimate(mismatch).mean;
  return result;
}

}  // namespace gvm
