#pragma once

// Norm-form and coordinate-wise Rademacher complexities of finite classes,
// the two-point basis-dependence fixture and the entropy upper bound.

#include <cstdint>
#include <string>

#include "vecproc/empirical_process.hpp"
#include "vecproc/function_class.hpp"
#include "vecproc/hilbert.hpp"

namespace vecproc {

enum class RademacherMode { exact, monte_carlo };

inline constexpr std::size_t kMaxExactSigns = 20;

struct RademacherEstimate {
  double value = 0.0;
  /// norm, coordinatewise or pattern_sum
  std::string form;
  RademacherMode mode = RademacherMode::exact;
  std::size_t reps = 0;
  double se = 0.0;
  /// number of independent signs (n, or n d_Y for the coordinate-wise form)
  std::size_t signs = 0;
};

/// E_sigma sup_g ||(1/n) sum_i sigma_i g(X_i)||. Exact mode enumerates all
/// 2^n patterns and throws for n > 20.
RademacherEstimate norm_rademacher(const ClassSample& sample, RademacherMode mode, std::size_t reps = 0,
                                   std::uint64_t seed = 0);

struct CoordinatewiseEstimate {
  /// average over sign patterns of sup_g sum_i sum_k sigma_ik g_k(X_i)
  double average = 0.0;
  /// average / n
  double normalized = 0.0;
  /// 2^{effective signs} x average: the unaveraged sum over the patterns of
  /// the signs whose coefficient differs between members
  double pattern_sum = 0.0;
  std::size_t effective_signs = 0;
  std::size_t signs = 0;
  RademacherMode mode = RademacherMode::exact;
  std::size_t reps = 0;
  double se = 0.0;
};

/// Coordinates are taken in the given basis, one sign per (point, coordinate).
/// Signs whose coefficient is the same for every member shift all members
/// alike and average out, so exact mode enumerates only the others.
/// Exact mode throws when n d_Y > 20. pattern_sum is only defined in exact mode.
CoordinatewiseEstimate coordinatewise_rademacher(const ClassSample& sample, const OrthonormalBasis& basis,
                                                 RademacherMode mode, std::size_t reps = 0, std::uint64_t seed = 0);

/// Applies a change of basis to every value of the class.
ClassSample rotate(const ClassSample& sample, const OrthonormalBasis& basis);
ClassSample scale(const ClassSample& sample, double lambda);

struct BasisDemo {
  CoordinatewiseEstimate standard;
  CoordinatewiseEstimate rotated;
  double norm_standard = 0.0;
  double norm_rotated = 0.0;
  /// values printed for the fixture in the source text
  double quoted_standard = 2.0;
  double quoted_rotated = 0.0;
  bool dependent = false;
};

/// X_1 = (1,0), X_2 = (0,1); g_1, g_2 the orthogonal projections onto the
/// lines y = x and y = -x; bases e_1, e_2 and (1,1)/sqrt2, (1,-1)/sqrt2.
ClassSample counterexample_sample();
OrthonormalBasis rotated_basis();
BasisDemo basis_dependence_demo();

struct EntropyBoundCheck {
  RademacherEstimate estimate;
  int depth = 0;
  double r_n = 0.0;
  double j_n = 0.0;
  /// 2^{-(S+1)} R_n + 2 J_n / sqrt(n)
  double bound = 0.0;
  /// same with every H_s replaced by max(H_s, log 2)
  double bound_log2 = 0.0;
  bool ok = true;
  bool ok_log2 = true;
};

/// Exact estimate when n <= 20, otherwise Monte Carlo with `reps` draws and 3 SE slack.
EntropyBoundCheck rademacher_entropy_bound_check(const ClassSample& sample, int depth, std::size_t reps = 100000,
                                                 std::uint64_t seed = 0);

}  // namespace vecproc
