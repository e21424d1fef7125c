#include "gvm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gvm/errors.hpp"
#include "gvm/parallel.hpp"
#include "gvm/rng.hpp"
#include "gvm/special_functions.hpp"

namespace gvm {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("TimeGrid: need at least two points");
  if (points_.front() != 0.0) throw std::invalid_argument("TimeGrid: must start at zero");
  for (std::size_t i = 1; i < points_.size(); ++i)
    if (!(points_[i] > points_[i - 1]))
      throw std::invalid_argument("TimeGrid: points must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double t_end, std::size_t n_steps) {
  if (!(t_end > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
  if (n_steps == 0) throw std::invalid_argument("TimeGrid: need at least one step");
  std::vector<double> pts(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i)
    pts[i] = t_end * static_cast<double>(i) / static_cast<double>(n_steps);
  return TimeGrid(std::move(pts));
}

std::size_t TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t - 1e-12);
  if (it == points_.end() || std::abs(*it - t) > 1e-12 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("TimeGrid: requested time is not a grid point");
  return static_cast<std::size_t>(it - points_.begin());
}

double PathEnsemble::increment(std::size_t path, std::size_t step, std::size_t factor) const {
  std::uint64_t stream = rng::stream_seed(seed, path);
  std::uint64_t counter = static_cast<std::uint64_t>(step) * n_factors + factor;
  return rng::gaussian(stream, counter) * std::sqrt(grid.dt(step));
}

double shock_node(const KernelSpec& kernel, const TimeGrid& grid, std::size_t step) {
  if (step == 0 && kernel.singular_at_zero()) return 0.5 * (grid.point(0) + grid.point(1));
  return grid.point(step);
}

namespace {

// Flattened shock weights K_i(t, node(k, i)) for one evaluation time, indexed
// k * n_factors + i; filled in parallel since kernel evaluation dominates.
Eigen::VectorXd shock_weights(const MarketSpec& market, const TimeGrid& grid, double t,
                              std::size_t n_steps_used, int threads,
                              const QuadratureConfig& cfg) {
  const std::size_t nf = market.n_factors();
  Eigen::VectorXd w(static_cast<Eigen::Index>(n_steps_used * nf));
  parallel_for(n_steps_used, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k)
      for (std::size_t i = 0; i < nf; ++i) {
        double node = shock_node(market.factors()[i], grid, k);
        w[static_cast<Eigen::Index>(k * nf + i)] = market.factors()[i].evaluate(t, node, cfg);
      }
  });
  return w;
}

}  // namespace

Eigen::MatrixXd spot_paths(const MarketSpec& market, const PathEnsemble& ensemble,
                           Measure measure, const std::vector<double>& output_times, int threads,
                           const QuadratureConfig& cfg) {
  if (ensemble.n_factors != market.n_factors())
    throw std::invalid_argument("spot_paths: ensemble factor count does not match the market");
  if (output_times.empty()) throw std::invalid_argument("spot_paths: no output times");
  const TimeGrid& grid = ensemble.grid;
  const std::size_t nf = market.n_factors();
  const std::size_t n_out = output_times.size();

  std::vector<std::size_t> cut(n_out);
  std::vector<double> level(n_out);
  std::vector<Eigen::VectorXd> weights(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    double t = output_times[o];
    if (!(t > 0.0 && t <= market.horizon()))
      throw std::invalid_argument("spot_paths: output times must lie in (0, horizon]");
    cut[o] = grid.index_of(t);
    if (cut[o] == 0) throw std::invalid_argument("spot_paths: output times must be positive");
    level[o] = measure == Measure::risk_neutral ? risk_neutral_seasonality(market, t, cfg)
                                                : market.seasonality()(t);
    weights[o] = shock_weights(market, grid, t, cut[o], threads, cfg);
  }
  std::size_t max_cut = *std::max_element(cut.begin(), cut.end());

  Eigen::MatrixXd out(static_cast<Eigen::Index>(ensemble.n_paths),
                      static_cast<Eigen::Index>(n_out));
  parallel_for(ensemble.n_paths, threads, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd xi(static_cast<Eigen::Index>(max_cut * nf));
    for (std::size_t p = lo; p < hi; ++p) {
      for (std::size_t k = 0; k < max_cut; ++k)
        for (std::size_t i = 0; i < nf; ++i)
          xi[static_cast<Eigen::Index>(k * nf + i)] = ensemble.increment(p, k, i);
      for (std::size_t o = 0; o < n_out; ++o) {
        Eigen::Index len = static_cast<Eigen::Index>(cut[o] * nf);
        out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(o)) =
            level[o] + weights[o].dot(xi.head(len));
      }
    }
  });
  return out;
}

Eigen::MatrixXd forward_paths(const MarketSpec& market, const PathEnsemble& ensemble,
                              Measure measure, std::size_t maturity_index, int threads,
                              const QuadratureConfig& cfg) {
  if (ensemble.n_factors != market.n_factors())
    throw std::invalid_argument("forward_paths: ensemble factor count does not match the market");
  if (maturity_index >= market.n_maturities())
    throw std::invalid_argument("forward_paths: maturity index out of range");
  const TimeGrid& grid = ensemble.grid;
  const double maturity = market.maturities()[maturity_index];
  if (grid.t_end() > maturity)
    throw std::invalid_argument("forward_paths: grid extends past the maturity");

  const std::size_t nf = market.n_factors();
  const std::size_t n_steps = grid.n_steps();
  Eigen::VectorXd w = shock_weights(market, grid, maturity, n_steps, threads, cfg);
  Eigen::VectorXd drift = Eigen::VectorXd::Zero(w.size());
  if (measure == Measure::physical) {
    for (std::size_t k = 0; k < n_steps; ++k)
      for (std::size_t i = 0; i < nf; ++i) {
        double node = shock_node(market.factors()[i], grid, k);
        Eigen::Index idx = static_cast<Eigen::Index>(k * nf + i);
        drift[idx] = w[idx] * market.theta().value_at(node)[i] * grid.dt(k);
      }
  }
  double f0 = risk_neutral_seasonality(market, maturity, cfg);

  Eigen::MatrixXd out(static_cast<Eigen::Index>(ensemble.n_paths),
                      static_cast<Eigen::Index>(n_steps + 1));
  parallel_for(ensemble.n_paths, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      double f = f0;
      out(static_cast<Eigen::Index>(p), 0) = f;
      for (std::size_t k = 0; k < n_steps; ++k) {
        for (std::size_t i = 0; i < nf; ++i) {
          Eigen::Index idx = static_cast<Eigen::Index>(k * nf + i);
          f += w[idx] * ensemble.increment(p, k, i) + drift[idx];
        }
        out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k + 1)) = f;
      }
    }
  });
  return out;
}

Eigen::VectorXd girsanov_density(const MarketSpec& market, const PathEnsemble& ensemble,
                                 int threads) {
  if (ensemble.n_factors != market.n_factors())
    throw std::invalid_argument(
        "girsanov_density: ensemble factor count does not match the market");
  const TimeGrid& grid = ensemble.grid;
  const std::size_t nf = market.n_factors();
  const std::size_t n_steps = grid.n_steps();

  // theta at the same per-factor nodes as the shock weights, so the discrete
  // measure change is exact for the discrete forward dynamics.
  Eigen::MatrixXd theta(n_steps, nf);
  for (std::size_t k = 0; k < n_steps; ++k)
    for (std::size_t i = 0; i < nf; ++i)
      theta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          market.theta().value_at(shock_node(market.factors()[i], grid, k))[i];

  Eigen::VectorXd out(static_cast<Eigen::Index>(ensemble.n_paths));
  parallel_for(ensemble.n_paths, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      double log_z = 0.0;
      for (std::size_t k = 0; k < n_steps; ++k)
        for (std::size_t i = 0; i < nf; ++i) {
          double th = theta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
          log_z -= th * ensemble.increment(p, k, i) + 0.5 * th * th * grid.dt(k);
        }
      out[static_cast<Eigen::Index>(p)] = std::exp(log_z);
    }
  });
  return out;
}

Eigen::MatrixXd fbm_paths_exact(HurstExponent h, const std::vector<double>& times,
                                std::size_t n_paths, std::uint64_t seed, int threads) {
  const std::size_t n = times.size();
  if (n == 0) throw std::invalid_argument("fbm_paths_exact: no times");
  if (n > 2048) throw std::invalid_argument("fbm_paths_exact: at most 2048 times");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] > 0.0)) throw std::invalid_argument("fbm_paths_exact: times must be positive");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("fbm_paths_exact: times must be strictly increasing");
  }

  const double two_h = 2.0 * h.value();
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double c = 0.5 * (std::pow(times[i], two_h) + std::pow(times[j], two_h) -
                        std::pow(times[i] - times[j], two_h));
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
      cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
    }

  Eigen::MatrixXd root;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    root = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success)
      throw regularization_error("fbm_paths_exact: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    double max_ev = ev.maxCoeff();
    if (ev.minCoeff() < -1e-10 * std::max(max_ev, 0.0))
      throw regularization_error("fbm_paths_exact: covariance is indefinite beyond roundoff");
    root = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  Eigen::MatrixXd out(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(n));
  parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t p = lo; p < hi; ++p) {
      std::uint64_t stream = rng::stream_seed(seed, p);
      for (std::size_t j = 0; j < n; ++j)
        z[static_cast<Eigen::Index>(j)] = rng::gaussian(stream, j);
      out.row(static_cast<Eigen::Index>(p)) = (root * z).transpose();
    }
  });
  return out;
}

double ou_path_equivalence(double alpha, const KernelSpec& base, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed, int threads,
                           const QuadratureConfig& cfg) {
  const std::size_t n = grid.n_steps();
  KernelSpec ou = KernelSpec::volterra_ou(alpha, base);

  // Lower-triangular tables of both kernels over (grid point, shock node).
  Eigen::MatrixXd ky = Eigen::MatrixXd::Zero(n + 1, n);
  Eigen::MatrixXd kz = Eigen::MatrixXd::Zero(n + 1, n);
  parallel_for(n + 1, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      double t = grid.point(j);
      for (std::size_t k = 0; k < j; ++k) {
        double node = shock_node(base, grid, k);
        ky(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = ou.evaluate(t, node, cfg);
        kz(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            base.evaluate(t, node, cfg);
      }
    }
  });

  std::vector<double> worst(n_paths, 0.0);
  PathEnsemble view{grid, n_paths, 1, seed};
  parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd dw(static_cast<Eigen::Index>(n));
    for (std::size_t p = lo; p < hi; ++p) {
      for (std::size_t k = 0; k < n; ++k)
        dw[static_cast<Eigen::Index>(k)] = view.increment(p, k, 0);
      double y_euler = 0.0;
      double z_prev = 0.0;
      double gap = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        Eigen::Index len = static_cast<Eigen::Index>(j);
        double y_ma = ky.row(static_cast<Eigen::Index>(j)).head(len).dot(dw.head(len));
        double z = kz.row(static_cast<Eigen::Index>(j)).head(len).dot(dw.head(len));
        y_euler = y_euler * (1.0 + alpha * grid.dt(j - 1)) + (z - z_prev);
        z_prev = z;
        gap = std::max(gap, std::abs(y_ma - y_euler));
      }
      worst[p] = gap;
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

Estimator mc_estimate(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("mc_estimate: need at least two values");
  Estimator est;
  est.n = values.size();
  double n = static_cast<double>(est.n);
  est.mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double d = values[i] - est.mean;
    sq[i] = d * d;
  }
  est.std_err = std::sqrt(pairwise_sum(sq) / (n - 1.0)) / std::sqrt(n);
  return est;
}

}  // namespace gvm
