#pragma once

// Empirical measures over finite classes: uniform deviations, symmetrization,
// Glivenko-Cantelli curves, chaining plans and their tail checks.

#include <cstdint>
#include <vector>

#include "vecproc/function_class.hpp"
#include "vecproc/report.hpp"

namespace vecproc {

/// P_n g = (1/n) sum_i g(X_i)
HPoint empirical_mean(const GridFunction& g, const EmpiricalDesign& design);

/// P g under the uniform law on the cube, in closed form from the generators.
std::vector<HPoint> true_means(const FunctionClass& cls);

/// max_g ||P_n g - P g||; argmax (lowest index on ties) written when non-null.
double sup_deviation(const FunctionClass& cls, const EmpiricalDesign& design, const std::vector<HPoint>& means,
                     std::size_t* argmax = nullptr);

struct TailComparison {
  double a = 0.0;
  /// max over members of P(||(P_n - P) g|| > a/2); the comparison needs it <= 1/2
  double premise = 0.0;
  bool premise_ok = false;
  double p_deviation = 0.0;       // P(||P_n - P||_G > a)
  double p_symmetrized = 0.0;     // P(||P_n^sigma||_G > a/4)
  double se = 0.0;
  bool ok = true;
};

struct SymmetrizationReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double mean_deviation = 0.0;   // E ||P_n - P||_G
  double mean_ghost = 0.0;       // E ||P_n - P'_n||_G
  double mean_sigma = 0.0;       // E ||P_n^sigma||_G
  double se_ghost = 0.0;         // SE of the paired difference deviation - ghost
  double se_sigma = 0.0;         // SE of the paired difference deviation - 2 sigma
  bool ok_ghost = true;
  bool ok_sigma = true;
  std::vector<TailComparison> tails;
  bool all_ok() const;
};

/// Uniform designs of size n (plus an independent ghost sample) per replicate.
SymmetrizationReport symmetrization_check(const FunctionClass& cls, std::size_t n, std::size_t reps,
                                          std::uint64_t seed, const std::vector<double>& a_grid = {});

struct GcRow {
  std::size_t n = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct GcCurve {
  std::vector<GcRow> rows;
  /// fraction of consecutive n steps where the median does not increase
  double monotone_fraction = 1.0;
  /// median at the first n over median at the last n (inf if the last is 0)
  double decay_ratio = 0.0;
};

GcCurve gc_decay_curve(const FunctionClass& cls, const std::vector<std::size_t>& n_grid, std::size_t reps,
                       std::uint64_t seed);

inline constexpr long kZeroFunction = -1;

struct ChainLevel {
  double radius = 0.0;
  /// Member indices of the centers; level 0 is the zero function alone.
  std::vector<std::size_t> centers;
  std::size_t count = 1;
  double entropy = 0.0;
};

struct ChainingPlan {
  int depth = 1;  // S
  double r_n = 0.0;
  /// levels 0..S+1
  std::vector<ChainLevel> levels;
  double j_n = 0.0;
  /// chains[g][s] = member index of g^s, or kZeroFunction; s = 0..S+1
  std::vector<std::vector<long>> chains;
  /// link_lengths[g][s] = ||g^{s+1} - g^s||_{2,P_n}, s = 0..S
  std::vector<std::vector<double>> link_lengths;
  /// max over links of length / (2^{-s} R_n)
  double max_link_ratio = 0.0;
  bool links_ok = true;

  /// Distinct chain ends g^{S+1}, ascending.
  std::vector<std::size_t> chain_ends() const;
};

/// ceil(log2 sqrt(n)) + 2
int default_chain_depth(std::size_t n);

/// Nested greedy covers at radii 2^{-s} R_n under ||.||_{2,P_n}; chains follow
/// nearest centers from level S+1 down (lowest member index on ties).
ChainingPlan build_chaining_plan(const ClassSample& sample, int depth);

/// sum_{s=0}^{S} 2^{-s} R_n sqrt(2 H_{s+1}) from the stored entropies.
double chaining_j(const ChainingPlan& plan);

/// sup_g ||sum_s P_n^sigma (g^{s+1} - g^s)|| against
/// sqrt(2) J_n / sqrt(n) + 6 R_n sqrt((1+t)/n), bound 2 e^{-t}.
TailReport chaining_tail_check(const ClassSample& sample, const ChainingPlan& plan, const std::vector<double>& t_grid,
                               std::size_t reps, std::uint64_t seed);

struct EquicontinuityRow {
  std::size_t n = 0;
  double radius = 0.0;
  std::size_t members_in_ball = 0;
  double median = 0.0;
};

/// Median over replicates of sup_{||g - g0||_{2,P} <= radius} ||nu_n(g) - nu_n(g0)||.
std::vector<EquicontinuityRow> equicontinuity_curve(const FunctionClass& cls, std::size_t g0,
                                                    const std::vector<double>& radius_grid,
                                                    const std::vector<std::size_t>& n_grid, std::size_t reps,
                                                    std::uint64_t seed);

/// ||g_a - g_b||_{2,P} for every pair, by quadrature on a fixed reference design.
std::vector<double> population_distances(const FunctionClass& cls);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

}  // namespace vecproc
