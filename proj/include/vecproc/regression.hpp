#pragma once

// Fixed-design least squares with Gaussian noise in Y, the peeling threshold
// delta_n, the rate experiment, and bounded-loss ERM with its excess-risk bound.

#include <cstdint>
#include <functional>
#include <vector>

#include "vecproc/concentration.hpp"
#include "vecproc/empirical_process.hpp"
#include "vecproc/function_class.hpp"
#include "vecproc/report.hpp"

namespace vecproc {

struct LeastSquaresFit {
  std::size_t index = 0;
  /// ||ghat - g0||_{2,P_n}
  double error = 0.0;
  /// ||ghat - g0||^2_{2,P_n} and 2 <eps, ghat - g0>_{2,P_n}
  double basic_lhs = 0.0;
  double basic_rhs = 0.0;
};

/// Exhaustive argmin of (1/n) sum_i ||Y_i - g(x_i)||^2 over a finite class
/// evaluated on the design, with Y_i = g0(x_i) + eps_i. Ties go to the lowest index.
/// noise holds eps_i row by row (points x dim_y).
LeastSquaresFit least_squares_fit(const ClassSample& cls, std::size_t g0, const std::vector<double>& noise);

/// Draws n centred Gaussian noise vectors with the given covariance.
std::vector<double> draw_noise(const CovarianceSpectrum& spectrum, std::size_t n, Rng& rng);

/// Smallest delta (relative precision 1e-6) with
/// sqrt(n) delta^2 >= 8 (J(delta) + 4 delta sqrt(1 + t) + delta sqrt(8t/3)).
/// Throws for t < 3/8, negative J, J/delta^2 increasing on a check grid, or no root below 10.
double solve_delta_n(const std::function<double(double)>& j_curve, std::size_t n, double t);

/// sqrt(n) delta^2 - 8 (J(delta) + 4 delta sqrt(1 + t) + delta sqrt(8t/3))
double delta_n_residual(const std::function<double(double)>& j_curve, std::size_t n, double t, double delta);

/// Piecewise-linear lattice net on [0,1] for each output coordinate: knots at
/// multiples of h = 1/knots, values in eps Z with |v| <= k_b and
/// |v_{j+1} - v_j| <= k_b h. The argmin over all paths is a dynamic program.
struct SplineNet {
  int knots = 1;
  double h = 1.0;
  double eps = 0.25;
  double k_b = 1.0;
  /// lattice values are eps * q for |q| <= q_max
  int q_max = 4;
  /// |q_{j+1} - q_j| <= step_max
  int step_max = 4;

  static SplineNet for_sample_size(std::size_t n, double k_b);
  /// log of the number of paths for one coordinate
  double log_paths() const;
  /// Best path for one coordinate against responses y at the given 1-d points;
  /// returns fitted values at the points and writes the minimal loss.
  std::vector<double> fit(const std::vector<double>& x, const std::vector<double>& y, double* loss) const;
};

struct RateRow {
  std::size_t n = 0;
  int knots = 0;
  double eps = 0.0;
  double log_cardinality = 0.0;
  double delta_n = 0.0;
  double median_error = 0.0;
  double q90_error = 0.0;
  /// fraction of replicates where the estimator was g0 itself
  double g0_selected = 0.0;
  double coverage_freq = 0.0;
  double coverage_se = 0.0;
  double coverage_bound = 0.0;
  bool coverage_ok = true;
  std::size_t basic_violations = 0;
};

struct RateFit {
  std::vector<RateRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double theory_exponent = 0.0;
  double t = 2.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  bool basic_ok() const;
  bool coverage_ok() const;
};

struct RateConfig {
  std::vector<std::size_t> n_grid{64, 256, 1024, 4096};
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  std::size_t dim_y = 3;
  double k_b = 1.0;
  double t = 2.0;
  std::vector<double> noise_spectrum{0.5, 0.3, 0.2};
};

/// d = m = 1, midpoint design, g0 drawn from the smooth ball class; the
/// candidate class is {g0} followed by the spline net.
RateFit rate_experiment(const RateConfig& config);

/// Least-squares slope and intercept of y on x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// sup over chain ends of <eps, g>_{2,P_n} against J_n/sqrt(n) + 4 R_n sqrt((1+t)/n), bound e^{-t}.
TailReport gaussian_chaining_check(const ClassSample& sample, const ChainingPlan& plan,
                                   const CovarianceSpectrum& noise, const std::vector<double>& t_grid,
                                   std::size_t reps, std::uint64_t seed);

struct ErmConfig {
  std::vector<std::size_t> n_grid{100, 400, 1600};
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  std::size_t members = 10;
  std::size_t dim_y = 2;
  double k_b = 1.0;
  /// loss = min(||y - yhat||, cap); c in the bound is the cap
  double cap = 1.0;
  /// noise atoms are +-noise_scale e_k, equally likely
  double noise_scale = 0.3;
  double failure_prob = 0.05;
  std::size_t quadrature_nodes = 2000;
  std::size_t sign_draws = 256;
  /// index of the regression function inside the class
  std::size_t truth = 0;
};

struct ErmRow {
  std::size_t n = 0;
  double median_excess = 0.0;
  double q95_excess = 0.0;
  double median_rademacher = 0.0;
  double bound_at_median = 0.0;
  double violation_freq = 0.0;
  double violation_se = 0.0;
  bool bound_ok = true;
  std::size_t decomposition_violations = 0;
};

struct ErmReport {
  std::vector<ErmRow> rows;
  std::vector<double> risks;
  std::size_t best = 0;
  bool all_ok() const;
};

ErmReport erm_lipschitz_experiment(const ErmConfig& config);

}  // namespace vecproc
