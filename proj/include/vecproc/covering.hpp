#pragma once

// Covering numbers of finite metric sets and the constructive piecewise
// polynomial cover of a smooth class.

#include <cstdint>
#include <string>
#include <vector>

#include "vecproc/function_class.hpp"
#include "vecproc/hilbert.hpp"

namespace vecproc {

enum class Metric { euclidean, sup_norm, l2_empirical };

std::string to_string(Metric m);

/// Finite metric space. Each item is a flat vector split into blocks of
/// `block` coordinates; euclidean uses the whole vector, sup_norm the largest
/// block norm, l2_empirical the root mean square of block norms.
class PointCloud {
 public:
  PointCloud(Metric metric, std::size_t block, std::vector<std::vector<double>> items);

  static PointCloud euclidean(const std::vector<HPoint>& points);
  static PointCloud euclidean(std::vector<std::vector<double>> rows);
  /// Members of a class under the grid sup norm.
  static PointCloud sup_norm(const FunctionClass& cls);
  /// Members under ||.||_{2,P_n} (one block per design point).
  static PointCloud l2_empirical(const ClassSample& sample);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  Metric metric() const noexcept { return metric_; }
  std::size_t block() const noexcept { return block_; }
  const std::vector<double>& item(std::size_t i) const { return items_[i]; }
  double distance(std::size_t i, std::size_t j) const;
  /// Sub-cloud made of the listed items, same metric.
  PointCloud subset(const std::vector<std::size_t>& indices) const;

 private:
  Metric metric_;
  std::size_t block_;
  std::vector<std::vector<double>> items_;
};

/// Reads a CSV file with one point per row; a non-numeric first row is taken as a header.
PointCloud read_point_csv(const std::string& path);

struct CoverResult {
  double radius = 0.0;
  /// Centers in the order they were chosen.
  std::vector<std::size_t> center_indices;
  /// For each point, the position in center_indices of the first center within
  /// radius (this is the disjointified cell the point belongs to).
  std::vector<std::size_t> assignment;

  std::size_t size() const noexcept { return center_indices.size(); }
};

/// Farthest-point greedy cover: starts at point 0, then repeatedly adds the
/// uncovered point farthest from the current centers (lowest index on ties).
CoverResult greedy_cover(const PointCloud& cloud, double delta);
/// Same, with delta = 0 allowed (groups identical points).
CoverResult greedy_cover_allow_zero(const PointCloud& cloud, double delta);

/// True iff every point lies within cover.radius of its assigned center.
bool cover_is_valid(const PointCloud& cloud, const CoverResult& cover);

/// Largest cloud accepted by the exponential searches.
inline constexpr std::size_t kExactLimit = 20;

/// Minimum number of in-cloud centers covering the cloud at radius delta.
std::size_t exact_cover_number(const PointCloud& cloud, double delta);
/// Largest subset with pairwise distances > delta (brute force).
std::size_t max_packing_number(const PointCloud& cloud, double delta);

enum class CoverMode { exact, greedy };

/// log of the covering number in the chosen mode.
double entropy(const PointCloud& cloud, double delta, CoverMode mode);

struct SmoothCoverPlan {
  double delta = 0.0;
  double k1 = 1.0;
  double big_delta = 0.0;
  /// cubes per axis, ceil(sqrt(d) / Delta)
  int cells_per_axis = 0;
  std::vector<std::vector<double>> net_points;
  /// delta_k = delta / (2 Delta^k e^d), k = 0..m-1
  std::vector<double> level_radii;
  /// Greedy centers of each level cover, in disjointification order.
  std::vector<std::vector<HPoint>> level_centers;

  std::size_t net_size() const noexcept { return net_points.size(); }
};

struct SmoothCover {
  SmoothCoverPlan plan;
  /// Per member: cell index for each (net point l, [p] <= m-1), l slowest.
  std::vector<std::vector<std::uint32_t>> signatures;
  /// Per member: index of its distinct signature (first-seen order).
  std::vector<std::size_t> cell_of_member;
  std::size_t occupied_cells = 0;
};

/// K1 = max(1, max_{k < m} d^{m-k} K_B / (m-k)!)
double smooth_cover_k1(int d, int m, double k_b);
/// Number of net points, ceil(sqrt(d) (4 K1 / delta)^{1/m})^d.
double smooth_cover_net_size(int d, int m, double k1, double delta);

/// Builds the cover from the class's own derivative values plus `b_samples`
/// extra points of B drawn with `seed`.
SmoothCover build_smooth_cover(const FunctionClass& cls, double delta, std::size_t b_samples = 256,
                               std::uint64_t seed = 0);

struct CoverValidityReport {
  std::size_t pairs_checked = 0;
  /// max over same-signature pairs of sup_distance / delta (0 when no pairs)
  double max_ratio = 0.0;
  bool ok = true;
};

CoverValidityReport verify_cover_validity(const FunctionClass& cls, const SmoothCover& cover);

}  // namespace vecproc
