#pragma once

// Vector-valued smooth functions g: [0,1]^d -> Y sampled on uniform grids,
// together with the finite classes built from them.
//
// Members are generated from closed-form maps (trigonometric sums plus
// optional monomials), so every partial derivative D^p g is exact both on
// and off the grid. The trigonometric family is one concrete sub-family of
// the smooth class with derivative values in B; it is not the whole class.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vecproc/hilbert.hpp"

namespace vecproc {

/// Multi-index p = (p_1, ..., p_d) with order [p] = p_1 + ... + p_d.
using MultiIndex = std::vector<int>;

int order(const MultiIndex& p) noexcept;
/// p! = p_1! ... p_d!
double multi_factorial(const MultiIndex& p) noexcept;
/// h^p = h_1^{p_1} ... h_d^{p_d}, with 0^0 = 1.
double multi_power(std::span<const double> h, const MultiIndex& p);
/// All p with [p] <= max_order, sorted lexicographically.
std::vector<MultiIndex> multi_indices(int d, int max_order);

/// a cos(w.x) + b sin(w.x)
struct TrigTerm {
  std::vector<double> freq;
  HPoint cos_coef;
  HPoint sin_coef;
};

/// c x^alpha
struct MonomialTerm {
  MultiIndex power;
  HPoint coef;
};

/// Closed-form map R^d -> Y with exact partial derivatives of every order.
class SmoothMap {
 public:
  SmoothMap(int input_dim, std::size_t dim_y);

  void add(TrigTerm term);
  void add(MonomialTerm term);

  int input_dim() const noexcept { return input_dim_; }
  std::size_t dim_y() const noexcept { return dim_y_; }
  std::span<const TrigTerm> trig_terms() const noexcept { return trig_; }
  std::span<const MonomialTerm> monomial_terms() const noexcept { return mono_; }

  HPoint value(std::span<const double> x) const;
  HPoint derivative(const MultiIndex& p, std::span<const double> x) const;
  /// Writes D^p g(x) into out (length dim_y) without allocating.
  void derivative_into(const MultiIndex& p, std::span<const double> x, std::span<double> out) const;
  /// Integral of g over the unit cube under the uniform law.
  HPoint mean_uniform() const;
  /// Upper bound on sup_{x in cube, |h| = 1} |g^{(k)}(x)(h, ..., h)|_Y.
  double directional_bound(int k) const;

 private:
  int input_dim_;
  std::size_t dim_y_;
  std::vector<TrigTerm> trig_;
  std::vector<MonomialTerm> mono_;
};

/// A function on [0,1]^d sampled at resolution^d nodes (row-major, axis 0
/// slowest), with D^p g stored for every [p] <= m.
class GridFunction {
 public:
  static GridFunction sample(SmoothMap generator, int m, int resolution);

  int input_dim() const noexcept { return generator_.input_dim(); }
  int smoothness() const noexcept { return m_; }
  std::size_t dim_y() const noexcept { return generator_.dim_y(); }
  int resolution() const noexcept { return resolution_; }
  std::size_t node_count() const noexcept { return node_count_; }
  std::vector<double> node(std::size_t i) const;

  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  /// Position of p in indices(); throws if [p] > m.
  std::size_t index_of(const MultiIndex& p) const;

  std::span<const double> value(std::size_t node) const { return deriv(0, node); }
  std::span<const double> deriv(std::size_t index, std::size_t node) const;
  /// All stored coordinates, ordered [index][node][coordinate].
  std::span<const double> raw() const noexcept { return data_; }

  HPoint evaluate(std::span<const double> x) const { return generator_.value(x); }
  HPoint evaluate_derivative(const MultiIndex& p, std::span<const double> x) const {
    return generator_.derivative(p, x);
  }
  const SmoothMap& generator() const noexcept { return generator_; }

 private:
  GridFunction(SmoothMap generator, int m, int resolution);

  SmoothMap generator_;
  int m_;
  int resolution_;
  std::size_t node_count_;
  std::vector<MultiIndex> indices_;
  std::vector<double> data_;
};

/// B is the Euclidean ball of the given radius.
struct BallSet {
  double radius;
};

/// B = { theta_1 psi_1 + ... + theta_r psi_r : |f|_Y <= radius }.
struct SpanSet {
  std::vector<HPoint> psi;
  double radius;
};

/// B = functions on [0,1]^{out_dim} whose partials of order <= out_order are
/// bounded by `bound`, represented by values on an out_grid^{out_dim} grid
/// scaled by 1/sqrt(d_Y) so that |.|_Y is the discrete L2 norm.
struct SmoothOutputSet {
  int out_dim;
  int out_order;
  double bound;
  int out_grid;
};

using BDescriptor = std::variant<BallSet, SpanSet, SmoothOutputSet>;

std::string describe(const BDescriptor& b);

struct MembershipReport {
  bool ok = true;
  /// Largest amount by which a stored value exceeds its constraint.
  double max_excess = 0.0;
  std::size_t values_checked = 0;
};

/// Input points in [0,1]^d with uniform weights 1/n.
class EmpiricalDesign {
 public:
  EmpiricalDesign() = default;
  /// Throws if a point leaves the unit cube or dimensions disagree.
  explicit EmpiricalDesign(std::vector<std::vector<double>> points);

  static EmpiricalDesign uniform(std::size_t n, int d, std::uint64_t seed, std::uint64_t stream = 0);
  /// Midpoints (i + 1/2)/n on [0,1] (d = 1).
  static EmpiricalDesign midpoints(std::size_t n);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  int input_dim() const noexcept { return points_.empty() ? 0 : static_cast<int>(points_[0].size()); }
  std::span<const double> operator[](std::size_t i) const { return points_[i]; }
  const std::vector<std::vector<double>>& points() const noexcept { return points_; }

 private:
  std::vector<std::vector<double>> points_;
};

class FunctionClass {
 public:
  FunctionClass(int d, int m, std::size_t dim_y, int resolution, BDescriptor b, std::uint64_t seed,
                std::vector<GridFunction> members);

  int input_dim() const noexcept { return d_; }
  int smoothness() const noexcept { return m_; }
  std::size_t dim_y() const noexcept { return dim_y_; }
  int resolution() const noexcept { return resolution_; }
  const BDescriptor& b() const noexcept { return b_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const GridFunction& operator[](std::size_t i) const { return members_[i]; }
  std::span<const GridFunction> members() const noexcept { return members_; }

  /// Checks every stored derivative value against B: to `tol` for ball and
  /// span sets, and by finite differences with 5% slack for smooth outputs.
  MembershipReport check_membership(double tol = 1e-9) const;

  /// JSON header line followed by a little-endian float64 payload.
  std::string serialize() const;
  static FunctionClass deserialize(const std::string& bytes);

 private:
  int d_;
  int m_;
  std::size_t dim_y_;
  int resolution_;
  BDescriptor b_;
  std::uint64_t seed_;
  std::vector<GridFunction> members_;
};

struct GeneratorOptions {
  /// Nodes per axis; 0 picks 1025 for d = 1, 65 for d = 2 and 9 otherwise.
  int resolution = 0;
  /// Integer frequencies 0..max_frequency per axis.
  int max_frequency = 3;
};

/// Members whose derivatives of order <= m + 1 all lie in the ball of radius k_b.
FunctionClass generate_finite_dim_ball_class(int d, int m, std::size_t dim_y, double k_b,
                                             std::size_t count, std::uint64_t seed,
                                             GeneratorOptions options = {});

/// Members whose derivative values lie in span(psi) with |f|_Y <= radius.
FunctionClass generate_span_class(int d, int m, std::vector<HPoint> psi, double radius,
                                  std::size_t count, std::uint64_t seed,
                                  GeneratorOptions options = {});

/// Members whose derivative values are smooth functions on [0,1]^{out_dim}
/// (sampled on out_grid^{out_dim} nodes) with partials bounded by `bound`.
FunctionClass generate_smooth_output_class(int d, int m, int out_dim, int out_order, double bound,
                                           int out_grid, std::size_t count, std::uint64_t seed,
                                           GeneratorOptions options = {});

/// Grid approximation of sup_x |g(x)|_Y.
double sup_norm(const GridFunction& g);
/// Grid approximation of sup_x |g1(x) - g2(x)|_Y (same grid required).
double sup_distance(const GridFunction& g1, const GridFunction& g2);

/// ((1/n) sum_i |g(X_i)|^p)^{1/p}, evaluated off-grid through the generator.
double lp_seminorm(const GridFunction& g, double p, const EmpiricalDesign& design);
/// <g1, g2>_{2, P_n}
double semi_inner(const GridFunction& g1, const GridFunction& g2, const EmpiricalDesign& design);

/// G(X_i) = max over members of |g(X_i)|_Y.
std::vector<double> envelope(const FunctionClass& cls, const EmpiricalDesign& design);

struct TaylorReport {
  double lhs;
  double rhs;
  bool ok;
};

/// Values of every member at every design point, stored [member][point][coord].
/// Most sample-level computations only need these numbers, so classes that are
/// not GridFunctions (e.g. linear maps) can be fed in directly.
struct ClassSample {
  std::size_t members = 0;
  std::size_t points = 0;
  std::size_t dim_y = 0;
  std::vector<double> data;

  ClassSample() = default;
  ClassSample(std::size_t members_, std::size_t points_, std::size_t dim_y_)
      : members(members_), points(points_), dim_y(dim_y_), data(members_ * points_ * dim_y_, 0.0) {}

  std::span<const double> at(std::size_t g, std::size_t i) const {
    return {data.data() + (g * points + i) * dim_y, dim_y};
  }
  std::span<double> at(std::size_t g, std::size_t i) { return {data.data() + (g * points + i) * dim_y, dim_y}; }
  /// ||g_a - g_b||_{2,P_n}
  double distance(std::size_t a, std::size_t b) const;
  /// ||g||_{2,P_n}
  double l2_norm(std::size_t g) const;
};

ClassSample evaluate_on(const FunctionClass& cls, const EmpiricalDesign& design);

/// `count` random elements of B: uniform in the ball, uniform coefficients in
/// the span ball, or random trigonometric output functions for smooth outputs.
std::vector<HPoint> sample_b(const BDescriptor& b, std::size_t dim_y, std::size_t count, std::uint64_t seed);

/// Compares the order-m Taylor remainder at a + h against K |h|^{m+1} / (m+1)!.
TaylorReport taylor_remainder_check(const GridFunction& g, std::span<const double> a,
                                    std::span<const double> h, double k);

}  // namespace vecproc
