#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gvm/kernels.hpp"
#include "gvm/market.hpp"
#include "gvm/quadrature.hpp"

namespace gvm {

class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);
  static TimeGrid uniform(double t_end, std::size_t n_steps);

  std::size_t n_steps() const { return points_.size() - 1; }
  std::size_t n_points() const { return points_.size(); }
  double point(std::size_t i) const { return points_[i]; }
  double dt(std::size_t step) const { return points_[step + 1] - points_[step]; }
  double t_end() const { return points_.back(); }
  const std::vector<double>& points() const { return points_; }

  // Index of a grid point equal to t (within rounding slack); throws
  // std::invalid_argument when t is not a grid point.
  std::size_t index_of(double t) const;

 private:
  std::vector<double> points_;
};

// Lazy view of Brownian increments: path p, step k, factor i map to one
// deterministic counter-based normal draw scaled by sqrt(dt). No state is
// stored, so any slice can be generated independently on any thread.
struct PathEnsemble {
  TimeGrid grid;
  std::size_t n_paths = 0;
  std::size_t n_factors = 1;
  std::uint64_t seed = 0;

  double increment(std::size_t path, std::size_t step, std::size_t factor) const;
};

enum class Measure { physical, risk_neutral };

// Quadrature node used for the shock weight of a step: the left endpoint,
// except the first step of kernels that blow up at time zero, which uses the
// midpoint so the weight stays finite.
double shock_node(const KernelSpec& kernel, const TimeGrid& grid, std::size_t step);

// Spot values S(t) for each path at the requested output times (which must be
// grid points). Under the risk-neutral measure the level is the risk-neutral
// seasonality; under the physical measure it is the quoted seasonality.
Eigen::MatrixXd spot_paths(const MarketSpec& market, const PathEnsemble& ensemble,
                           Measure measure, const std::vector<double>& output_times,
                           int threads = 1, const QuadratureConfig& cfg = {});

// Forward prices F(t_k, T_j) along the grid for the maturity with the given
// index; column k corresponds to grid point t_k. Martingale under the
// risk-neutral measure; carries the market-price-of-risk drift under the
// physical one.
Eigen::MatrixXd forward_paths(const MarketSpec& market, const PathEnsemble& ensemble,
                              Measure measure, std::size_t maturity_index, int threads = 1,
                              const QuadratureConfig& cfg = {});

// Density dQ/dP at the grid horizon along each path, treating the ensemble's
// increments as physical-measure increments.
Eigen::VectorXd girsanov_density(const MarketSpec& market, const PathEnsemble& ensemble,
                                 int threads = 1);

// Exact fractional Brownian motion marginals at the given positive times via
// a Cholesky factor of the covariance (at most 2048 times). Falls back to an
// eigenvalue square root when the covariance is numerically semidefinite and
// throws regularization_error if it is indefinite beyond roundoff.
Eigen::MatrixXd fbm_paths_exact(HurstExponent h, const std::vector<double>& times,
                                std::size_t n_paths, std::uint64_t seed, int threads = 1);

// Largest pathwise gap between the moving-average representation of an
// OU process driven by a Gaussian-Volterra base and the Euler solution of its
// defining equation, over all paths and grid points.
double ou_path_equivalence(double alpha, const KernelSpec& base, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed, int threads = 1,
                           const QuadratureConfig& cfg = {});

struct Estimator {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
};

// Sample mean and standard error with pairwise summation (two passes).
Estimator mc_estimate(std::span<const double> values);

}  // namespace gvm
