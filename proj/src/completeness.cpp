#include "gvm/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gvm/errors.hpp"
#include "gvm/parallel.hpp"
#include "gvm/rng.hpp"

namespace gvm {

namespace {

constexpr double kRankTol = 1e-12;

double scaled_det_tolerance(const Eigen::MatrixXd& m) {
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) scale *= m.row(i).norm();
  return kRankTol * scale;
}

}  // namespace

Eigen::MatrixXd left_inverse(const KernelMatrix& kmat) {
  const Eigen::MatrixXd& k = kmat.values;
  if (k.rows() < k.cols())
    throw std::invalid_argument("left_inverse: need at least as many maturities as factors");
  if (k.rows() == 0) throw std::invalid_argument("left_inverse: empty matrix");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double sv_max = sv(0);
  double sv_min = sv(sv.size() - 1);
  if (!(sv_min > kRankTol * sv_max))
    throw incompleteness_error("left_inverse: loading matrix is rank deficient", kmat.t);

  Eigen::MatrixXd pinv =
      svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  double residual = (pinv * k - Eigen::MatrixXd::Identity(k.cols(), k.cols())).norm();
  if (!(residual <= 1e-10))
    throw incompleteness_error("left_inverse: ill-conditioned loading matrix", kmat.t);
  return pinv;
}

double vandermonde_det(const VandermondeCase& c) {
  const std::size_t n = c.exponents.size();
  if (n == 0 || c.points.size() != n)
    throw std::invalid_argument("vandermonde_det: exponents and points must match and be nonempty");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.points[i] > 0.0))
      throw std::invalid_argument("vandermonde_det: points must be positive");
    if (i > 0 && !(c.exponents[i] > c.exponents[i - 1]))
      throw std::invalid_argument("vandermonde_det: exponents must be strictly increasing");
    if (i > 0 && !(c.points[i] > c.points[i - 1]))
      throw std::invalid_argument("vandermonde_det: points must be strictly increasing");
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::pow(c.points[j], c.exponents[i]);
  if (n == 1) return m(0, 0);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

std::vector<double> default_scan_grid(const MarketSpec& market, std::size_t points) {
  if (points < 2) throw std::invalid_argument("default_scan_grid: need at least two points");
  double t1 = market.maturities().front();
  double lo = std::min(1e-6, 0.5 * t1);
  double hi = t1 * (1.0 - 1e-9);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

CompletenessReport scan(const MarketSpec& market, const std::vector<double>& grid, int threads) {
  if (grid.empty()) throw std::invalid_argument("scan: empty grid");
  double t1 = market.maturities().front();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] < t1))
      throw std::invalid_argument("scan: grid times must lie in [0, first maturity)");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("scan: grid must be strictly increasing");
  }

  const std::size_t m = market.n_maturities();
  const std::size_t n = market.n_factors();
  const bool square = (m == n);

  CompletenessReport report;
  report.grid = grid;
  report.min_singular_value.assign(grid.size(), 0.0);
  if (square) report.determinant.assign(grid.size(), 0.0);
  std::vector<char> flagged(grid.size(), 0);

  parallel_for(grid.size(), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      KernelMatrix kmat = kernel_matrix(market, grid[i]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(kmat.values);
      const auto& sv = svd.singularValues();
      double sv_max = sv(0);
      double sv_min = sv(sv.size() - 1);
      report.min_singular_value[i] = sv_min;
      bool bad = !(sv_min > kRankTol * sv_max);
      if (square) {
        double det = Eigen::PartialPivLU<Eigen::MatrixXd>(kmat.values).determinant();
        report.determinant[i] = det;
        if (!(std::abs(det) > scaled_det_tolerance(kmat.values))) bad = true;
      }
      flagged[i] = bad ? 1 : 0;
    }
  });

  auto det_at = [&](double t) {
    KernelMatrix kmat = kernel_matrix(market, t);
    return Eigen::PartialPivLU<Eigen::MatrixXd>(kmat.values).determinant();
  };

  if (square) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
      double fa = report.determinant[i - 1];
      double fb = report.determinant[i];
      if (fa == 0.0 || fb == 0.0 || fa * fb > 0.0) continue;
      ++report.zero_crossings;
      double a = grid[i - 1];
      double b = grid[i];
      while (b - a > 1e-9) {
        double mid = 0.5 * (a + b);
        double fm = det_at(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if (fa * fm < 0.0) {
          b = mid;
        } else {
          a = mid;
          fa = fm;
        }
      }
      report.degenerate_times.push_back(0.5 * (a + b));
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (flagged[i]) report.degenerate_times.push_back(grid[i]);
  std::sort(report.degenerate_times.begin(), report.degenerate_times.end());

  std::size_t worst_run = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    run = flagged[i] ? run + 1 : 0;
    worst_run = std::max(worst_run, run);
  }
  if (worst_run >= 3) {
    report.verdict = CompletenessReport::Verdict::incomplete;
  } else if (worst_run > 0 || report.zero_crossings > 0) {
    report.verdict = CompletenessReport::Verdict::complete_except_null_set;
  } else {
    report.verdict = CompletenessReport::Verdict::complete;
  }
  return report;
}

TwoFactorResult two_factor_analytic_check(TwoFactorFamily family, const TwoFactorParams& p) {
  if (!(p.maturity1 > 0.0 && p.maturity2 > p.maturity1))
    throw std::invalid_argument("two_factor_analytic_check: need 0 < maturity1 < maturity2");
  if (p.samples < 1) throw std::invalid_argument("two_factor_analytic_check: need samples >= 1");

  KernelSpec k1 = KernelSpec::constant(1.0);
  KernelSpec k2 = KernelSpec::constant(1.0);
  switch (family) {
    case TwoFactorFamily::rl_ou:
    case TwoFactorFamily::fou: {
      if (p.alpha1 != p.alpha2)
        throw std::invalid_argument("two_factor_analytic_check: this family requires a shared rate");
      if (!(p.h1 > 0.5 && p.h2 > 0.5 && p.h1 < 1.0 && p.h2 < 1.0))
        throw std::invalid_argument(
            "two_factor_analytic_check: this family requires Hurst indices in (1/2, 1)");
      if (!(p.h1 < p.h2))
        throw std::invalid_argument(
            "two_factor_analytic_check: this family requires distinct, ordered Hurst indices");
      bool rl = (family == TwoFactorFamily::rl_ou);
      KernelSpec b1 = rl ? KernelSpec::rl(HurstExponent(p.h1)) : KernelSpec::fbm(HurstExponent(p.h1));
      KernelSpec b2 = rl ? KernelSpec::rl(HurstExponent(p.h2)) : KernelSpec::fbm(HurstExponent(p.h2));
      if (p.alpha1 == 0.0) {
        k1 = b1;
        k2 = b2;
      } else {
        k1 = KernelSpec::volterra_ou(p.alpha1, b1);
        k2 = KernelSpec::volterra_ou(p.alpha2, b2);
      }
      break;
    }
    case TwoFactorFamily::mixed: {
      if (!(p.h1 > 0.5 && p.h1 < 1.0))
        throw std::invalid_argument(
            "two_factor_analytic_check: the mixed family requires a Hurst index in (1/2, 1)");
      if (!(p.alpha1 <= p.alpha2))
        throw std::invalid_argument("two_factor_analytic_check: the mixed family requires "
                                    "alpha1 <= alpha2");
      k1 = KernelSpec::std_ou(p.alpha1);
      k2 = KernelSpec::volterra_ou(p.alpha2, KernelSpec::fbm(HurstExponent(p.h1)));
      break;
    }
  }

  TwoFactorResult result;
  result.samples = p.samples;
  result.min_scaled_det = std::numeric_limits<double>::infinity();
  result.pass = true;
  for (int i = 0; i < p.samples; ++i) {
    auto c = static_cast<std::uint64_t>(3 * i);
    double u1 = rng::uniform01(p.seed, c);
    double u2 = rng::uniform01(p.seed, c + 1);
    double u3 = rng::uniform01(p.seed, c + 2);
    double t1 = p.maturity1 * (0.8 + 0.4 * u1);
    double t2 = std::max(p.maturity2 * (0.8 + 0.4 * u2), t1 * 1.05);
    double s = t1 * (0.02 + 0.96 * u3);

    Eigen::Matrix2d m;
    m << k1.evaluate(t1, s), k2.evaluate(t1, s), k1.evaluate(t2, s), k2.evaluate(t2, s);
    double scale = m.row(0).norm() * m.row(1).norm();
    double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    double scaled = scale > 0.0 ? std::abs(det) / scale : 0.0;
    if (scaled < result.min_scaled_det) {
      result.min_scaled_det = scaled;
      result.worst_time = s;
    }
    if (!(scaled > kRankTol)) result.pass = false;
  }
  return result;
}

}  // namespace gvm
