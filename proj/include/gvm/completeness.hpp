#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gvm/market.hpp"

namespace gvm {

// Moore-Penrose left inverse of the m x n loading matrix (m >= n). Throws
// incompleteness_error when the loadings are rank-deficient at kmat.t.
Eigen::MatrixXd left_inverse(const KernelMatrix& kmat);

// Generalized Vandermonde determinant det[x_j^{alpha_i}] for strictly
// increasing exponents and strictly increasing positive points; positive by
// total positivity of the power family.
struct VandermondeCase {
  std::vector<double> exponents;
  std::vector<double> points;
};
double vandermonde_det(const VandermondeCase& c);

struct CompletenessReport {
  enum class Verdict { complete, complete_except_null_set, incomplete };
  std::vector<double> grid;
  std::vector<double> min_singular_value;
  std::vector<double> determinant;       // filled only when m == n
  int zero_crossings = 0;                // sign changes of the determinant sequence
  std::vector<double> degenerate_times;  // refined roots and flagged grid times
  Verdict verdict = Verdict::complete;
};

// Uniform grid on [max(1e-6, 0), T_1) suitable for scanning the loadings.
std::vector<double> default_scan_grid(const MarketSpec& market, std::size_t points = 1024);

// Rank scan of the loading matrix over a time grid. Determinant sign changes
// are refined by bisection to 1e-9 and recorded in degenerate_times.
CompletenessReport scan(const MarketSpec& market, const std::vector<double>& grid,
                        int threads = 1);

// Analytic spot-check of the two-factor completeness results:
//   rl_ou  - two OU factors over rl bases, shared rate, 1/2 < H1 < H2
//   fou    - two OU factors over fbm bases, shared rate, 1/2 < H1 < H2
//   mixed  - one classical OU factor plus one OU-over-fbm factor, H > 1/2
enum class TwoFactorFamily { rl_ou, fou, mixed };

struct TwoFactorParams {
  double alpha1 = 0.0;  // rl_ou/fou: shared rate (alpha2 must match); mixed: first rate
  double alpha2 = 0.0;
  double h1 = 0.0;      // rl_ou/fou: first Hurst; mixed: the single Hurst
  double h2 = 0.0;
  double maturity1 = 1.0;
  double maturity2 = 2.0;
  int samples = 50;
  std::uint64_t seed = 20260817;
};

struct TwoFactorResult {
  bool pass = false;
  double min_scaled_det = 0.0;  // min over samples of |det| / product of row norms
  double worst_time = 0.0;
  int samples = 0;
};

TwoFactorResult two_factor_analytic_check(TwoFactorFamily family, const TwoFactorParams& p);

}  // namespace gvm
