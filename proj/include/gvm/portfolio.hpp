#pragma once

#include <Eigen/Dense>

#include <vector>

#include "gvm/market.hpp"
#include "gvm/quadrature.hpp"
#include "gvm/simulation.hpp"

namespace gvm {

// Closed-form solution of the terminal-wealth problem for constant relative
// risk aversion in a complete forward market. The exponent gamma lies below
// one, with gamma = 0 read as log utility; the investment horizon must not
// exceed the first maturity (positions unwind while every forward trades).
class CRRAPolicy {
 public:
  CRRAPolicy(MarketSpec market, double gamma, double x0, double horizon);

  double gamma() const { return gamma_; }
  double x0() const { return x0_; }
  double horizon() const { return horizon_; }
  const MarketSpec& market() const { return market_; }

  double beta() const { return gamma_ / (1.0 - gamma_); }
  // H_t = exp(beta/(2(1-gamma)) * int_t^T |theta|^2 ds); H_T = 1.
  double h_factor(double t) const;
  double h0() const { return h0_; }
  // Lagrange multiplier of the budget constraint, (x0/H_0)^{gamma-1}.
  double lambda_star() const { return lambda_; }

  double utility(double wealth) const;
  // Optimal wealth as a function of the measure-change density Z.
  double terminal_wealth(double z) const;
  double optimal_wealth(double t, double z) const;
  double expected_utility_closed() const;

 private:
  MarketSpec market_;
  double gamma_;
  double x0_;
  double horizon_;
  double h0_;
  double lambda_;
};

// Forward positions replicating the optimal wealth at time t:
// wealth/(1-gamma) times theta(t) through the left inverse of the loadings.
Eigen::RowVectorXd optimal_delta(const CRRAPolicy& policy, double t, double wealth,
                                 const QuadratureConfig& cfg = {});

struct ReplicationResult {
  double max_rel_mismatch = 0.0;
  double mean_rel_mismatch = 0.0;
  // grid times where the loadings were rank deficient and the previous
  // positions were carried over
  std::vector<double> skipped_times;
};

// Runs the self-financing hedge along simulated physical-measure paths and
// compares terminal hedge wealth with the closed-form optimum. Three
// consecutive rank-deficient steps abort with incompleteness_error.
ReplicationResult replicate(const CRRAPolicy& policy, const PathEnsemble& ensemble,
                            int threads = 1, const QuadratureConfig& cfg = {});

}  // namespace gvm
