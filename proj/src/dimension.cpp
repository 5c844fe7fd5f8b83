#include "vecproc/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vecproc/parallel.hpp"
#include "vecproc/rng.hpp"

namespace vecproc {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  l.intercept = my - l.slope * mx;
  return l;
}

}  // namespace

double diameter(const PointCloud& cloud) {
  std::vector<double> far(cloud.size(), 0.0);
  parallel_for(cloud.size(), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) far[i] = std::max(far[i], cloud.distance(i, j));
  }, 64);
  return far.empty() ? 0.0 : *std::max_element(far.begin(), far.end());
}

std::vector<double> default_delta_grid(const PointCloud& cloud, std::size_t count) {
  if (cloud.size() < 2) throw std::invalid_argument("default_delta_grid: need at least two points");
  if (count < 2) throw std::invalid_argument("default_delta_grid: need at least two radii");
  std::vector<double> nn(cloud.size(), std::numeric_limits<double>::infinity());
  parallel_for(cloud.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (j != i) nn[i] = std::min(nn[i], cloud.distance(i, j));
    }
  }, 64);
  std::sort(nn.begin(), nn.end());
  const double lo = 2.0 * nn[nn.size() / 2];
  const double hi = diameter(cloud) / 4.0;
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("default_delta_grid: cloud too degenerate for a window");
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = hi * std::pow(lo / hi, static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return grid;
}

DimensionFit box_dimension_estimate(const PointCloud& cloud, const std::vector<double>& delta_grid,
                                    std::size_t fit_begin, std::size_t fit_end) {
  if (cloud.empty()) throw std::invalid_argument("box_dimension_estimate: empty cloud");
  if (delta_grid.size() < 4) throw std::invalid_argument("box_dimension_estimate: need at least 4 radii");
  for (std::size_t k = 0; k < delta_grid.size(); ++k) {
    if (!(delta_grid[k] > 0.0)) throw std::invalid_argument("box_dimension_estimate: radii must be positive");
    if (k > 0 && !(delta_grid[k] < delta_grid[k - 1])) {
      throw std::invalid_argument("box_dimension_estimate: radii must be strictly decreasing");
    }
  }
  if (fit_end == 0) fit_end = delta_grid.size();
  if (fit_begin + 2 > fit_end || fit_end > delta_grid.size()) {
    throw std::invalid_argument("box_dimension_estimate: bad fit range");
  }
  DimensionFit fit;
  fit.delta_grid = delta_grid;
  fit.fit_begin = fit_begin;
  fit.fit_end = fit_end;
  for (double delta : delta_grid) fit.entropies.push_back(entropy(cloud, delta, CoverMode::greedy));
  std::vector<double> x, y;
  for (std::size_t k = fit_begin; k < fit_end; ++k) {
    x.push_back(std::log(1.0 / delta_grid[k]));
    y.push_back(fit.entropies[k]);
  }
  const Line l = least_squares(x, y);
  fit.slope = l.slope;
  fit.intercept = l.intercept;
  return fit;
}

namespace {

HomogeneityTrial run_trial(const PointCloud& cloud, double diam, std::uint64_t seed, std::size_t t,
                           const HomogeneityOptions& opt) {
  Rng rng(seed, t);
  HomogeneityTrial tr;
  tr.center = static_cast<std::size_t>(rng.below(cloud.size()));
  tr.big_r = diam * std::exp(rng.uniform(std::log(opt.r_min_frac), std::log(opt.r_max_frac)));
  const double ratio = std::exp(rng.uniform(std::log(opt.ratio_min), std::log(opt.ratio_max)));
  tr.small_r = tr.big_r / ratio;
  std::vector<std::size_t> local;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.distance(tr.center, i) <= tr.big_r) local.push_back(i);
  }
  tr.local_points = local.size();
  const PointCloud sub = cloud.subset(local);
  if (tr.small_r <= 0.0) {
    tr.measured = greedy_cover_allow_zero(sub, 0.0).size();
    tr.exact = true;
  } else if (local.size() <= opt.exact_threshold) {
    tr.measured = exact_cover_number(sub, tr.small_r);
    tr.exact = true;
  } else {
    tr.measured = greedy_cover(sub, tr.small_r).size();
  }
  return tr;
}

}  // namespace

HomogeneityReport homogeneity_check(const PointCloud& cloud, double m, double tau, std::size_t n_trials,
                                    std::uint64_t seed, HomogeneityOptions options) {
  if (!(m >= 1.0)) throw std::invalid_argument("homogeneity_check: M must be at least 1");
  if (!(tau > 0.0)) throw std::invalid_argument("homogeneity_check: tau must be positive");
  if (cloud.empty()) throw std::invalid_argument("homogeneity_check: empty cloud");
  if (options.exact_threshold > kExactLimit) throw std::invalid_argument("homogeneity_check: exact threshold above 20");
  if (!(options.r_min_frac > 0.0 && options.r_max_frac >= options.r_min_frac && options.ratio_min >= 1.0 &&
        options.ratio_max >= options.ratio_min)) {
    throw std::invalid_argument("homogeneity_check: bad radius options");
  }
  const double diam = diameter(cloud);
  HomogeneityReport rep;
  rep.m = m;
  rep.tau = tau;
  rep.trials.resize(n_trials);
  parallel_for(n_trials, [&](std::size_t t) { rep.trials[t] = run_trial(cloud, diam, seed, t, options); });
  for (auto& tr : rep.trials) {
    tr.bound = m * std::pow(tr.small_r > 0.0 ? tr.big_r / tr.small_r : 1.0, tau);
    tr.ok = static_cast<double>(tr.measured) <= tr.bound;
    rep.all_ok = rep.all_ok && tr.ok;
  }
  return rep;
}

AssouadEstimate assouad_estimate(const PointCloud& cloud, std::uint64_t seed, std::size_t n_trials) {
  if (cloud.size() < 10) throw std::invalid_argument("assouad_estimate: need at least 10 points");
  HomogeneityOptions opt;
  opt.r_min_frac = 0.125;
  opt.r_max_frac = 0.5;
  opt.ratio_min = 1.0;
  opt.ratio_max = 32.0;
  const double diam = diameter(cloud);
  AssouadEstimate est;
  est.trials = n_trials;
  if (!(diam > 0.0)) return est;
  std::vector<HomogeneityTrial> trials(n_trials);
  parallel_for(n_trials, [&](std::size_t t) { trials[t] = run_trial(cloud, diam, seed, t, opt); });

  constexpr std::size_t kBins = 8;
  const double span = std::log(opt.ratio_max / opt.ratio_min);
  std::vector<double> best_n(kBins, -1.0), best_x(kBins, 0.0);
  for (const auto& tr : trials) {
    const double x = std::log(tr.big_r / tr.small_r);
    auto bin = static_cast<std::size_t>((x - std::log(opt.ratio_min)) / span * kBins);
    bin = std::min(bin, kBins - 1);
    const double y = std::log(static_cast<double>(tr.measured));
    if (y > best_n[bin]) {
      best_n[bin] = y;
      best_x[bin] = x;
    }
  }
  std::vector<double> x, y;
  for (std::size_t b = 0; b < kBins; ++b) {
    if (best_n[b] >= 0.0) {
      x.push_back(best_x[b]);
      y.push_back(best_n[b]);
    }
  }
  est.tau = x.size() >= 2 ? std::max(0.0, least_squares(x, y).slope) : 0.0;
  est.m = 1.0;
  for (const auto& tr : trials) {
    est.m = std::max(est.m, static_cast<double>(tr.measured) / std::pow(tr.big_r / tr.small_r, est.tau));
  }
  return est;
}

}  // namespace vecproc
