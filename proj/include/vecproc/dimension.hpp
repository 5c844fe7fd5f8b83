#pragma once

// Box-counting dimension fits and (M, tau)-homogeneity checks on finite clouds.

#include <cstdint>
#include <vector>

#include "vecproc/covering.hpp"

namespace vecproc {

struct DimensionFit {
  std::vector<double> delta_grid;
  std::vector<double> entropies;
  double slope = 0.0;
  double intercept = 0.0;
  /// Half-open index range [fit_begin, fit_end) of the grid used in the fit.
  std::size_t fit_begin = 0;
  std::size_t fit_end = 0;
};

/// Geometric grid between 2 x the median nearest-neighbour distance and
/// diameter / 4, in decreasing order.
std::vector<double> default_delta_grid(const PointCloud& cloud, std::size_t count = 8);

double diameter(const PointCloud& cloud);

/// Greedy entropies H(delta) and the least-squares slope of H against
/// log(1/delta) over [fit_begin, fit_end) (whole grid by default).
DimensionFit box_dimension_estimate(const PointCloud& cloud, const std::vector<double>& delta_grid,
                                    std::size_t fit_begin = 0, std::size_t fit_end = 0);

struct HomogeneityTrial {
  std::size_t center = 0;
  double big_r = 0.0;
  double small_r = 0.0;
  std::size_t local_points = 0;
  std::size_t measured = 0;
  bool exact = false;
  double bound = 0.0;
  bool ok = true;
};

struct HomogeneityReport {
  double m = 1.0;
  double tau = 0.0;
  std::vector<HomogeneityTrial> trials;
  bool all_ok = true;
};

struct HomogeneityOptions {
  /// R is drawn log-uniformly from [r_min_frac, r_max_frac] x diameter.
  double r_min_frac = 0.05;
  double r_max_frac = 0.5;
  /// R / r is drawn log-uniformly from [ratio_min, ratio_max].
  double ratio_min = 1.5;
  double ratio_max = 8.0;
  /// Local sets up to this size are covered exactly.
  std::size_t exact_threshold = 12;
};

/// Measures N(r, B(z, R) ∩ E) and compares with M (R/r)^tau on random trials.
HomogeneityReport homogeneity_check(const PointCloud& cloud, double m, double tau, std::size_t n_trials,
                                    std::uint64_t seed, HomogeneityOptions options = {});

struct AssouadEstimate {
  double m = 1.0;
  double tau = 0.0;
  std::size_t trials = 0;
};

/// Heuristic upper estimate: slope of the per-bin worst local entropy against
/// log(R/r), then the smallest M that makes every trial pass at that tau.
AssouadEstimate assouad_estimate(const PointCloud& cloud, std::uint64_t seed, std::size_t n_trials = 200);

}  // namespace vecproc
