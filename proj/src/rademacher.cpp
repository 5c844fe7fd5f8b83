#include "vecproc/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vecproc/parallel.hpp"
#include "vecproc/rng.hpp"

namespace vecproc {

namespace {

// Patterns are split into this many fixed chunks so the summation order never
// depends on the worker count.
constexpr std::size_t kChunks = 1024;

template <class Value>
double enumerate_mean(std::size_t signs, const Value& value) {
  const std::size_t patterns = std::size_t{1} << signs;
  const std::size_t chunks = std::min(kChunks, patterns);
  const std::size_t per = (patterns + chunks - 1) / chunks;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<int> sg(signs);
    double s = 0.0;
    for (std::size_t p = c * per; p < std::min(patterns, (c + 1) * per); ++p) {
      for (std::size_t i = 0; i < signs; ++i) sg[i] = ((p >> i) & 1U) ? 1 : -1;
      s += value(sg);
    }
    partial[c] = s;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total / static_cast<double>(patterns);
}

struct McResult {
  double mean = 0.0;
  double se = 0.0;
};

template <class Value>
McResult monte_carlo_mean(std::size_t signs, std::size_t reps, std::uint64_t seed, const Value& value) {
  if (reps < 2) throw std::invalid_argument("rademacher: Monte Carlo needs at least 2 draws");
  std::vector<double> vals(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed, r);
    std::vector<int> sg(signs);
    for (auto& v : sg) v = rng.sign();
    vals[r] = value(sg);
  }, 64);
  double s = 0.0, s2 = 0.0;
  for (double v : vals) {
    s += v;
    s2 += v * v;
  }
  const double nr = static_cast<double>(reps);
  McResult out;
  out.mean = s / nr;
  out.se = std::sqrt(std::max(0.0, s2 / nr - out.mean * out.mean) / (nr - 1.0));
  return out;
}

}  // namespace

RademacherEstimate norm_rademacher(const ClassSample& sample, RademacherMode mode, std::size_t reps,
                                   std::uint64_t seed) {
  if (sample.members == 0) throw std::invalid_argument("norm_rademacher: empty class");
  if (sample.points == 0) throw std::invalid_argument("norm_rademacher: empty design");
  const std::size_t n = sample.points, dy = sample.dim_y;
  const auto value = [&](const std::vector<int>& sg) {
    std::vector<double> acc(dy);
    double best = 0.0;
    for (std::size_t g = 0; g < sample.members; ++g) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = sample.at(g, i);
        for (std::size_t k = 0; k < dy; ++k) acc[k] += sg[i] * v[k];
      }
      best = std::max(best, norm(std::span<const double>(acc)));
    }
    return best / static_cast<double>(n);
  };
  RademacherEstimate est;
  est.form = "norm";
  est.mode = mode;
  est.signs = n;
  if (mode == RademacherMode::exact) {
    if (n > kMaxExactSigns) throw std::invalid_argument("norm_rademacher: exact mode needs n <= 20");
    est.value = enumerate_mean(n, value);
  } else {
    const auto mc = monte_carlo_mean(n, reps, seed, value);
    est.value = mc.mean;
    est.se = mc.se;
    est.reps = reps;
  }
  return est;
}

CoordinatewiseEstimate coordinatewise_rademacher(const ClassSample& sample, const OrthonormalBasis& basis,
                                                 RademacherMode mode, std::size_t reps, std::uint64_t seed) {
  if (sample.members == 0) throw std::invalid_argument("coordinatewise_rademacher: empty class");
  if (sample.points == 0) throw std::invalid_argument("coordinatewise_rademacher: empty design");
  if (basis.dim() != sample.dim_y) throw std::invalid_argument("coordinatewise_rademacher: basis dimension mismatch");
  const std::size_t n = sample.points, dy = sample.dim_y, members = sample.members;
  const std::size_t signs = n * dy;
  const ClassSample coef = rotate(sample, basis);

  CoordinatewiseEstimate est;
  est.signs = signs;
  est.mode = mode;
  double scale = 0.0;
  for (double v : coef.data) scale = std::max(scale, std::abs(v));
  std::vector<std::size_t> effective;
  for (std::size_t s = 0; s < signs; ++s) {
    const double first = coef.data[s];
    for (std::size_t g = 1; g < members; ++g) {
      if (std::abs(coef.data[g * signs + s] - first) > 1e-14 * scale) {
        effective.push_back(s);
        break;
      }
    }
  }
  est.effective_signs = effective.size();
  if (mode == RademacherMode::exact) {
    if (signs > kMaxExactSigns) throw std::invalid_argument("coordinatewise_rademacher: exact mode needs n d_Y <= 20");
    const auto value = [&](const std::vector<int>& sg) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < members; ++g) {
        double s = 0.0;
        for (std::size_t e = 0; e < effective.size(); ++e) s += sg[e] * coef.data[g * signs + effective[e]];
        best = std::max(best, s);
      }
      return best;
    };
    est.average = effective.empty() ? 0.0 : enumerate_mean(effective.size(), value);
  } else {
    const auto value = [&](const std::vector<int>& sg) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < members; ++g) {
        double s = 0.0;
        for (std::size_t k = 0; k < signs; ++k) s += sg[k] * coef.data[g * signs + k];
        best = std::max(best, s);
      }
      return best;
    };
    const auto mc = monte_carlo_mean(signs, reps, seed, value);
    est.average = mc.mean;
    est.se = mc.se;
    est.reps = reps;
  }
  est.normalized = est.average / static_cast<double>(n);
  est.pattern_sum = std::ldexp(est.average, static_cast<int>(est.effective_signs));
  return est;
}

ClassSample rotate(const ClassSample& sample, const OrthonormalBasis& basis) {
  if (basis.dim() != sample.dim_y) throw std::invalid_argument("rotate: basis dimension mismatch");
  ClassSample out(sample.members, sample.points, sample.dim_y);
  for (std::size_t g = 0; g < sample.members; ++g) {
    for (std::size_t i = 0; i < sample.points; ++i) {
      const auto v = sample.at(g, i);
      auto w = out.at(g, i);
      for (std::size_t k = 0; k < sample.dim_y; ++k) w[k] = inner(v, basis[k].coords());
    }
  }
  return out;
}

ClassSample scale(const ClassSample& sample, double lambda) {
  ClassSample out = sample;
  for (auto& v : out.data) v *= lambda;
  return out;
}

ClassSample counterexample_sample() {
  ClassSample s(2, 2, 2);
  // g_1 = projection onto y = x, g_2 = projection onto y = -x
  const double g1[2][2] = {{0.5, 0.5}, {0.5, 0.5}};
  const double g2[2][2] = {{0.5, -0.5}, {-0.5, 0.5}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      s.at(0, i)[k] = g1[i][k];
      s.at(1, i)[k] = g2[i][k];
    }
  }
  return s;
}

OrthonormalBasis rotated_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  return OrthonormalBasis({HPoint{r, r}, HPoint{r, -r}});
}

BasisDemo basis_dependence_demo() {
  const auto s = counterexample_sample();
  const auto rot = rotated_basis();
  BasisDemo demo;
  demo.standard = coordinatewise_rademacher(s, OrthonormalBasis::identity(2), RademacherMode::exact);
  demo.rotated = coordinatewise_rademacher(s, rot, RademacherMode::exact);
  demo.norm_standard = norm_rademacher(s, RademacherMode::exact).value;
  demo.norm_rotated = norm_rademacher(rotate(s, rot), RademacherMode::exact).value;
  demo.quoted_rotated = 5.0 * std::sqrt(2.0);
  demo.dependent = demo.standard.pattern_sum != demo.rotated.pattern_sum &&
                   demo.standard.normalized != demo.rotated.normalized;
  return demo;
}

EntropyBoundCheck rademacher_entropy_bound_check(const ClassSample& sample, int depth, std::size_t reps,
                                                 std::uint64_t seed) {
  const auto plan = build_chaining_plan(sample, depth);
  EntropyBoundCheck out;
  out.depth = depth;
  out.r_n = plan.r_n;
  out.j_n = plan.j_n;
  const double rn = std::sqrt(static_cast<double>(sample.points));
  double j_log2 = 0.0;
  for (int s = 0; s <= depth; ++s) {
    const double h = std::max(plan.levels[static_cast<std::size_t>(s + 1)].entropy, std::log(2.0));
    j_log2 += std::ldexp(plan.r_n, -s) * std::sqrt(2.0 * h);
  }
  out.bound = std::ldexp(plan.r_n, -(depth + 1)) + 2.0 * plan.j_n / rn;
  out.bound_log2 = std::ldexp(plan.r_n, -(depth + 1)) + 2.0 * j_log2 / rn;
  const bool exact = sample.points <= kMaxExactSigns;
  out.estimate = norm_rademacher(sample, exact ? RademacherMode::exact : RademacherMode::monte_carlo, reps, seed);
  const double slack = exact ? 1e-12 : 3.0 * out.estimate.se;
  out.ok = out.estimate.value <= out.bound + slack;
  out.ok_log2 = out.estimate.value <= out.bound_log2 + slack;
  return out;
}

}  // namespace vecproc
