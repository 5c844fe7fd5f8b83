#include "vecproc/empirical_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vecproc/covering.hpp"
#include "vecproc/parallel.hpp"
#include "vecproc/rng.hpp"

namespace vecproc {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

HPoint empirical_mean(const GridFunction& g, const EmpiricalDesign& design) {
  if (design.empty()) throw std::invalid_argument("empirical_mean: empty design");
  HPoint mean(g.dim_y());
  for (std::size_t i = 0; i < design.size(); ++i) mean += g.evaluate(design[i]);
  mean *= 1.0 / static_cast<double>(design.size());
  return mean;
}

std::vector<HPoint> true_means(const FunctionClass& cls) {
  std::vector<HPoint> out;
  out.reserve(cls.size());
  for (const auto& g : cls.members()) out.push_back(g.generator().mean_uniform());
  return out;
}

namespace {

/// ||(1/n) sum_i g(X_i) - mean|| for every member of an evaluated sample.
std::vector<double> deviations(const ClassSample& s, const std::vector<HPoint>& means) {
  std::vector<double> out(s.members);
  std::vector<double> acc(s.dim_y);
  for (std::size_t g = 0; g < s.members; ++g) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < s.points; ++i) {
      const auto v = s.at(g, i);
      for (std::size_t k = 0; k < s.dim_y; ++k) acc[k] += v[k];
    }
    double n2 = 0.0;
    for (std::size_t k = 0; k < s.dim_y; ++k) {
      const double diff = acc[k] / static_cast<double>(s.points) - means[g][k];
      n2 += diff * diff;
    }
    out[g] = std::sqrt(n2);
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, x);
  return best;
}

}  // namespace

double sup_deviation(const FunctionClass& cls, const EmpiricalDesign& design, const std::vector<HPoint>& means,
                     std::size_t* argmax) {
  if (means.size() != cls.size()) throw std::invalid_argument("sup_deviation: one mean per member required");
  if (design.empty()) throw std::invalid_argument("sup_deviation: empty design");
  const auto dev = deviations(evaluate_on(cls, design), means);
  std::size_t best = 0;
  for (std::size_t g = 1; g < dev.size(); ++g) {
    if (dev[g] > dev[best]) best = g;
  }
  if (argmax != nullptr) *argmax = best;
  return dev.empty() ? 0.0 : dev[best];
}

bool SymmetrizationReport::all_ok() const {
  if (!ok_ghost || !ok_sigma) return false;
  for (const auto& t : tails) {
    if (!t.ok) return false;
  }
  return true;
}

SymmetrizationReport symmetrization_check(const FunctionClass& cls, std::size_t n, std::size_t reps,
                                          std::uint64_t seed, const std::vector<double>& a_grid) {
  if (cls.empty()) throw std::invalid_argument("symmetrization_check: empty class");
  if (n == 0) throw std::invalid_argument("symmetrization_check: n must be positive");
  if (reps < 1000) throw std::invalid_argument("symmetrization_check: need at least 1000 replicates");
  const auto means = true_means(cls);
  const std::size_t members = cls.size();
  const std::size_t dy = cls.dim_y();
  std::vector<double> dev(reps), ghost(reps), sigma(reps);
  std::vector<double> per_member(reps * members);
  parallel_for(reps, [&](std::size_t r) {
    const auto x = EmpiricalDesign::uniform(n, cls.input_dim(), derive_seed(seed, 0), r);
    const auto x2 = EmpiricalDesign::uniform(n, cls.input_dim(), derive_seed(seed, 1), r);
    Rng signs(derive_seed(seed, 2), r);
    const auto s1 = evaluate_on(cls, x);
    const auto s2 = evaluate_on(cls, x2);
    std::vector<int> sg(n);
    for (auto& v : sg) v = signs.sign();
    const auto d = deviations(s1, means);
    std::copy(d.begin(), d.end(), per_member.begin() + static_cast<std::ptrdiff_t>(r * members));
    dev[r] = max_of(d);
    double best_ghost = 0.0, best_sigma = 0.0;
    std::vector<double> a(dy), b(dy);
    for (std::size_t g = 0; g < members; ++g) {
      std::fill(a.begin(), a.end(), 0.0);
      std::fill(b.begin(), b.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v1 = s1.at(g, i);
        const auto v2 = s2.at(g, i);
        for (std::size_t k = 0; k < dy; ++k) {
          a[k] += v1[k] - v2[k];
          b[k] += sg[i] * v1[k];
        }
      }
      best_ghost = std::max(best_ghost, norm(std::span<const double>(a)) / static_cast<double>(n));
      best_sigma = std::max(best_sigma, norm(std::span<const double>(b)) / static_cast<double>(n));
    }
    ghost[r] = best_ghost;
    sigma[r] = best_sigma;
  }, 16);

  SymmetrizationReport rep;
  rep.n = n;
  rep.reps = reps;
  rep.seed = seed;
  const double nr = static_cast<double>(reps);
  double s_dg = 0.0, s_dg2 = 0.0, s_ds = 0.0, s_ds2 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    rep.mean_deviation += dev[r];
    rep.mean_ghost += ghost[r];
    rep.mean_sigma += sigma[r];
    const double dg = dev[r] - ghost[r];
    const double ds = dev[r] - 2.0 * sigma[r];
    s_dg += dg;
    s_dg2 += dg * dg;
    s_ds += ds;
    s_ds2 += ds * ds;
  }
  rep.mean_deviation /= nr;
  rep.mean_ghost /= nr;
  rep.mean_sigma /= nr;
  rep.se_ghost = std::sqrt(std::max(0.0, s_dg2 / nr - (s_dg / nr) * (s_dg / nr)) / (nr - 1.0));
  rep.se_sigma = std::sqrt(std::max(0.0, s_ds2 / nr - (s_ds / nr) * (s_ds / nr)) / (nr - 1.0));
  rep.ok_ghost = rep.mean_deviation <= rep.mean_ghost + 3.0 * rep.se_ghost;
  rep.ok_sigma = rep.mean_deviation <= 2.0 * rep.mean_sigma + 3.0 * rep.se_sigma;

  for (double a : a_grid) {
    TailComparison tc;
    tc.a = a;
    for (std::size_t g = 0; g < members; ++g) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < reps; ++r) hits += per_member[r * members + g] > a / 2.0 ? 1 : 0;
      tc.premise = std::max(tc.premise, static_cast<double>(hits) / nr);
    }
    tc.premise_ok = tc.premise <= 0.5;
    std::size_t hd = 0, hs = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      hd += dev[r] > a ? 1 : 0;
      hs += sigma[r] > a / 4.0 ? 1 : 0;
    }
    tc.p_deviation = static_cast<double>(hd) / nr;
    tc.p_symmetrized = static_cast<double>(hs) / nr;
    const double se_d = std::sqrt(tc.p_deviation * (1.0 - tc.p_deviation) / nr);
    const double se_s = std::sqrt(tc.p_symmetrized * (1.0 - tc.p_symmetrized) / nr);
    tc.se = std::sqrt(se_d * se_d + 16.0 * se_s * se_s);
    // only meaningful where the premise holds; elsewhere the comparison is vacuous
    tc.ok = !tc.premise_ok || tc.p_deviation <= 4.0 * tc.p_symmetrized + 3.0 * tc.se;
    rep.tails.push_back(tc);
  }
  return rep;
}

GcCurve gc_decay_curve(const FunctionClass& cls, const std::vector<std::size_t>& n_grid, std::size_t reps,
                       std::uint64_t seed) {
  if (cls.empty()) throw std::invalid_argument("gc_decay_curve: empty class");
  if (reps == 0) throw std::invalid_argument("gc_decay_curve: need at least one replicate");
  const auto means = true_means(cls);
  GcCurve curve;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const std::size_t n = n_grid[k];
    if (n == 0) throw std::invalid_argument("gc_decay_curve: n must be positive");
    std::vector<double> dev(reps);
    parallel_for(reps, [&](std::size_t r) {
      const auto x = EmpiricalDesign::uniform(n, cls.input_dim(), derive_seed(seed, k), r);
      dev[r] = max_of(deviations(evaluate_on(cls, x), means));
    });
    curve.rows.push_back({n, median(dev), quantile(dev, 0.25), quantile(dev, 0.75)});
  }
  if (curve.rows.size() >= 2) {
    std::size_t down = 0;
    for (std::size_t k = 1; k < curve.rows.size(); ++k) down += curve.rows[k].median <= curve.rows[k - 1].median;
    curve.monotone_fraction = static_cast<double>(down) / static_cast<double>(curve.rows.size() - 1);
    const double last = curve.rows.back().median;
    curve.decay_ratio = last > 0.0 ? curve.rows.front().median / last : std::numeric_limits<double>::infinity();
  }
  return curve;
}

// ---------------------------------------------------------------------------

int default_chain_depth(std::size_t n) {
  return static_cast<int>(std::ceil(std::log2(std::sqrt(static_cast<double>(std::max<std::size_t>(1, n)))))) + 2;
}

std::vector<std::size_t> ChainingPlan::chain_ends() const {
  std::vector<std::size_t> ends;
  for (const auto& c : chains) ends.push_back(static_cast<std::size_t>(c.back()));
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  return ends;
}

double chaining_j(const ChainingPlan& plan) {
  double j = 0.0;
  for (int s = 0; s <= plan.depth; ++s) {
    j += std::ldexp(plan.r_n, -s) * std::sqrt(2.0 * plan.levels[static_cast<std::size_t>(s + 1)].entropy);
  }
  return j;
}

ChainingPlan build_chaining_plan(const ClassSample& sample, int depth) {
  if (sample.members == 0) throw std::invalid_argument("build_chaining_plan: empty class");
  if (sample.points == 0) throw std::invalid_argument("build_chaining_plan: empty design");
  if (depth < 1) throw std::invalid_argument("build_chaining_plan: S must be at least 1");
  const std::size_t members = sample.members;
  ChainingPlan plan;
  plan.depth = depth;
  for (std::size_t g = 0; g < members; ++g) plan.r_n = std::max(plan.r_n, sample.l2_norm(g));

  std::vector<double> dist(members * members, 0.0);
  parallel_for(members, [&](std::size_t a) {
    for (std::size_t b = 0; b < members; ++b) dist[a * members + b] = a == b ? 0.0 : sample.distance(a, b);
  }, 8);

  const PointCloud cloud = PointCloud::l2_empirical(sample);
  plan.levels.resize(static_cast<std::size_t>(depth + 2));
  plan.levels[0].radius = plan.r_n;
  for (int s = 1; s <= depth + 1; ++s) {
    auto& level = plan.levels[static_cast<std::size_t>(s)];
    level.radius = std::ldexp(plan.r_n, -s);
    level.centers = greedy_cover_allow_zero(cloud, level.radius).center_indices;
    std::sort(level.centers.begin(), level.centers.end());
    level.count = level.centers.size();
    level.entropy = std::log(static_cast<double>(level.count));
  }
  plan.j_n = chaining_j(plan);

  plan.chains.assign(members, std::vector<long>(static_cast<std::size_t>(depth + 2), kZeroFunction));
  plan.link_lengths.assign(members, std::vector<double>(static_cast<std::size_t>(depth + 1), 0.0));
  for (std::size_t g = 0; g < members; ++g) {
    auto& chain = plan.chains[g];
    std::size_t current = g;
    for (int s = depth + 1; s >= 1; --s) {
      const auto& centers = plan.levels[static_cast<std::size_t>(s)].centers;
      std::size_t best = centers.front();
      for (auto c : centers) {
        if (dist[current * members + c] < dist[current * members + best]) best = c;
      }
      chain[static_cast<std::size_t>(s)] = static_cast<long>(best);
      current = best;
    }
    for (int s = 0; s <= depth; ++s) {
      const auto upper = static_cast<std::size_t>(chain[static_cast<std::size_t>(s + 1)]);
      const double len = s == 0 ? sample.l2_norm(upper)
                                : dist[upper * members + static_cast<std::size_t>(chain[static_cast<std::size_t>(s)])];
      plan.link_lengths[g][static_cast<std::size_t>(s)] = len;
      const double radius = std::ldexp(plan.r_n, -s);
      const double ratio = radius > 0.0 ? len / radius : (len > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      plan.max_link_ratio = std::max(plan.max_link_ratio, ratio);
    }
  }
  plan.links_ok = plan.max_link_ratio <= 1.0 + 1e-12;
  return plan;
}

TailReport chaining_tail_check(const ClassSample& sample, const ChainingPlan& plan, const std::vector<double>& t_grid,
                               std::size_t reps, std::uint64_t seed) {
  const auto ends = plan.chain_ends();
  const std::size_t n = sample.points;
  std::vector<double> stats(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed, r);
    std::vector<int> sg(n);
    for (auto& v : sg) v = rng.sign();
    std::vector<double> acc(sample.dim_y);
    double best = 0.0;
    for (auto e : ends) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = sample.at(e, i);
        for (std::size_t k = 0; k < sample.dim_y; ++k) acc[k] += sg[i] * v[k];
      }
      best = std::max(best, norm(std::span<const double>(acc)) / static_cast<double>(n));
    }
    stats[r] = best;
  }, 64);
  const double rn = static_cast<double>(n);
  std::vector<double> thr, bnd;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("chaining_tail_check: t must be positive");
    thr.push_back(std::sqrt(2.0) * plan.j_n / std::sqrt(rn) + 6.0 * plan.r_n * std::sqrt((1.0 + t) / rn));
    bnd.push_back(2.0 * std::exp(-t));
  }
  return make_tail_report("rademacher_chain", "t", t_grid, thr, stats, bnd, seed);
}

std::vector<double> population_distances(const FunctionClass& cls) {
  const auto ref = cls.input_dim() == 1 ? EmpiricalDesign::midpoints(4096)
                                        : EmpiricalDesign::uniform(20000, cls.input_dim(), 0x5eedULL, 0);
  const auto s = evaluate_on(cls, ref);
  const std::size_t m = cls.size();
  std::vector<double> out(m * m, 0.0);
  parallel_for(m, [&](std::size_t a) {
    for (std::size_t b = 0; b < m; ++b) out[a * m + b] = a == b ? 0.0 : s.distance(a, b);
  }, 8);
  return out;
}

std::vector<EquicontinuityRow> equicontinuity_curve(const FunctionClass& cls, std::size_t g0,
                                                    const std::vector<double>& radius_grid,
                                                    const std::vector<std::size_t>& n_grid, std::size_t reps,
                                                    std::uint64_t seed) {
  if (g0 >= cls.size()) throw std::invalid_argument("equicontinuity_curve: g0 not in the class");
  if (reps == 0) throw std::invalid_argument("equicontinuity_curve: need at least one replicate");
  const auto means = true_means(cls);
  const auto pop = population_distances(cls);
  const std::size_t m = cls.size();
  std::vector<EquicontinuityRow> rows;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const std::size_t n = n_grid[k];
    if (n == 0) throw std::invalid_argument("equicontinuity_curve: n must be positive");
    // per replicate, ||nu_n(g) - nu_n(g0)|| for every member
    std::vector<double> stat(reps * m);
    parallel_for(reps, [&](std::size_t r) {
      const auto x = EmpiricalDesign::uniform(n, cls.input_dim(), derive_seed(seed, k), r);
      const auto s = evaluate_on(cls, x);
      std::vector<double> acc(cls.dim_y());
      for (std::size_t g = 0; g < m; ++g) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const auto a = s.at(g, i);
          const auto b = s.at(g0, i);
          for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += a[j] - b[j];
        }
        double n2 = 0.0;
        for (std::size_t j = 0; j < acc.size(); ++j) {
          const double v = acc[j] / static_cast<double>(n) - (means[g][j] - means[g0][j]);
          n2 += v * v;
        }
        stat[r * m + g] = std::sqrt(static_cast<double>(n) * n2);
      }
    });
    for (double radius : radius_grid) {
      EquicontinuityRow row;
      row.n = n;
      row.radius = radius;
      std::vector<double> sup(reps, 0.0);
      for (std::size_t g = 0; g < m; ++g) {
        if (pop[g0 * m + g] > radius) continue;
        ++row.members_in_ball;
        for (std::size_t r = 0; r < reps; ++r) sup[r] = std::max(sup[r], stat[r * m + g]);
      }
      row.median = median(sup);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace vecproc
