#include "vecproc/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vecproc/parallel.hpp"

namespace vecproc {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::sup_norm: return "sup_norm";
    case Metric::l2_empirical: return "l2_empirical";
  }
  return "unknown";
}

PointCloud::PointCloud(Metric metric, std::size_t block, std::vector<std::vector<double>> items)
    : metric_(metric), block_(block), items_(std::move(items)) {
  for (const auto& it : items_) {
    if (it.size() != items_.front().size()) throw std::invalid_argument("PointCloud: items differ in length");
    for (double v : it) {
      if (!std::isfinite(v)) throw std::invalid_argument("PointCloud: non-finite coordinate");
    }
  }
  if (metric_ != Metric::euclidean && (block_ == 0 || (!items_.empty() && items_.front().size() % block_ != 0))) {
    throw std::invalid_argument("PointCloud: block size does not divide the item length");
  }
}

PointCloud PointCloud::euclidean(const std::vector<HPoint>& points) {
  std::vector<std::vector<double>> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.emplace_back(p.coords().begin(), p.coords().end());
  return euclidean(std::move(rows));
}

PointCloud PointCloud::euclidean(std::vector<std::vector<double>> rows) {
  const std::size_t block = rows.empty() ? 1 : std::max<std::size_t>(1, rows.front().size());
  return PointCloud(Metric::euclidean, block, std::move(rows));
}

PointCloud PointCloud::sup_norm(const FunctionClass& cls) {
  std::vector<std::vector<double>> rows;
  rows.reserve(cls.size());
  for (const auto& g : cls.members()) {
    const auto raw = g.raw();
    // values (p = 0) come first in the raw layout
    rows.emplace_back(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(g.node_count() * g.dim_y()));
  }
  return PointCloud(Metric::sup_norm, cls.dim_y(), std::move(rows));
}

PointCloud PointCloud::l2_empirical(const ClassSample& sample) {
  std::vector<std::vector<double>> rows(sample.members);
  const std::size_t len = sample.points * sample.dim_y;
  for (std::size_t g = 0; g < sample.members; ++g) {
    rows[g].assign(sample.data.begin() + static_cast<std::ptrdiff_t>(g * len),
                   sample.data.begin() + static_cast<std::ptrdiff_t>((g + 1) * len));
  }
  return PointCloud(Metric::l2_empirical, std::max<std::size_t>(1, sample.dim_y), std::move(rows));
}

double PointCloud::distance(std::size_t i, std::size_t j) const {
  const auto& a = items_[i];
  const auto& b = items_[j];
  switch (metric_) {
    case Metric::euclidean: {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
      return std::sqrt(acc);
    }
    case Metric::sup_norm: {
      double best = 0.0;
      for (std::size_t s = 0; s < a.size(); s += block_) {
        double acc = 0.0;
        for (std::size_t k = s; k < s + block_; ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
        best = std::max(best, acc);
      }
      return std::sqrt(best);
    }
    case Metric::l2_empirical: {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
      const std::size_t blocks = a.size() / block_;
      return blocks == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(blocks));
    }
  }
  return 0.0;
}

PointCloud PointCloud::subset(const std::vector<std::size_t>& indices) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(indices.size());
  for (auto i : indices) rows.push_back(items_.at(i));
  return PointCloud(metric_, block_, std::move(rows));
}

PointCloud read_point_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open point file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::invalid_argument("non-numeric value in point file: " + line);
    }
    first = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("point file has no rows: " + path);
  return PointCloud::euclidean(std::move(rows));
}

// ---------------------------------------------------------------------------

CoverResult greedy_cover_allow_zero(const PointCloud& cloud, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("greedy_cover: delta must be nonnegative");
  if (cloud.empty()) throw std::invalid_argument("greedy_cover: empty cloud");
  const std::size_t n = cloud.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  CoverResult out;
  out.radius = delta;
  out.assignment.assign(n, kUnset);
  std::vector<double> mind(n, std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  while (true) {
    const std::size_t pos = out.center_indices.size();
    out.center_indices.push_back(next);
    const std::size_t c = next;
    parallel_for(n, [&](std::size_t i) {
      const double dist = cloud.distance(i, c);
      if (dist < mind[i]) mind[i] = dist;
      if (out.assignment[i] == kUnset && dist <= delta) out.assignment[i] = pos;
    }, 4096);
    double far = -1.0;
    next = kUnset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mind[i] > delta && mind[i] > far) {
        far = mind[i];
        next = i;
      }
    }
    if (next == kUnset) break;
  }
  return out;
}

CoverResult greedy_cover(const PointCloud& cloud, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("greedy_cover: delta must be positive");
  return greedy_cover_allow_zero(cloud, delta);
}

bool cover_is_valid(const PointCloud& cloud, const CoverResult& cover) {
  if (cover.assignment.size() != cloud.size()) return false;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cover.assignment[i] >= cover.center_indices.size()) return false;
    if (cloud.distance(i, cover.center_indices[cover.assignment[i]]) > cover.radius) return false;
  }
  return true;
}

namespace {

void require_small(const PointCloud& cloud, const char* what) {
  if (cloud.empty()) throw std::invalid_argument(std::string(what) + ": empty cloud");
  if (cloud.size() > kExactLimit) {
    throw std::invalid_argument(std::string(what) + ": cloud larger than " + std::to_string(kExactLimit) +
                                " points");
  }
}

struct ExactSearch {
  std::vector<std::uint32_t> covers;
  std::uint32_t full = 0;
  std::size_t best = 0;

  void run(std::uint32_t covered, std::size_t used) {
    if (covered == full) {
      best = std::min(best, used);
      return;
    }
    if (used + 1 >= best) return;
    // every cover must contain a center hitting the lowest uncovered point
    const int u = std::countr_zero(~covered & full);
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < covers.size(); ++j) {
      if (covers[j] >> u & 1u) cand.push_back(j);
    }
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
      const int ca = std::popcount(covers[a] & ~covered), cb = std::popcount(covers[b] & ~covered);
      return ca != cb ? ca > cb : a < b;
    });
    // lower bound: remaining points / largest fresh coverage
    const int remaining = std::popcount(~covered & full);
    int largest = 0;
    for (std::size_t j = 0; j < covers.size(); ++j) largest = std::max(largest, std::popcount(covers[j] & ~covered));
    if (largest == 0) return;
    if (used + static_cast<std::size_t>((remaining + largest - 1) / largest) >= best) return;
    for (auto j : cand) run(covered | covers[j], used + 1);
  }
};

}  // namespace

std::size_t exact_cover_number(const PointCloud& cloud, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("exact_cover_number: delta must be positive");
  require_small(cloud, "exact_cover_number");
  const std::size_t n = cloud.size();
  ExactSearch s;
  s.covers.assign(n, 0);
  s.full = n == 32 ? ~0u : ((1u << n) - 1u);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (cloud.distance(i, j) <= delta) s.covers[j] |= 1u << i;
    }
  }
  s.best = greedy_cover(cloud, delta).size();
  s.run(0, 0);
  return s.best;
}

std::size_t max_packing_number(const PointCloud& cloud, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("max_packing_number: delta must be positive");
  require_small(cloud, "max_packing_number");
  const std::size_t n = cloud.size();
  std::vector<std::uint32_t> conflict(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && cloud.distance(i, j) <= delta) conflict[i] |= 1u << j;
    }
  }
  // maximum independent set in the conflict graph
  std::size_t best = 0;
  auto search = [&](auto&& self, std::uint32_t allowed, std::size_t size) -> void {
    if (allowed == 0) {
      best = std::max(best, size);
      return;
    }
    if (size + static_cast<std::size_t>(std::popcount(allowed)) <= best) return;
    const int v = std::countr_zero(allowed);
    self(self, allowed & ~(1u << v) & ~conflict[static_cast<std::size_t>(v)], size + 1);
    self(self, allowed & ~(1u << v), size);
  };
  search(search, n == 32 ? ~0u : ((1u << n) - 1u), 0);
  return best;
}

double entropy(const PointCloud& cloud, double delta, CoverMode mode) {
  const std::size_t count = mode == CoverMode::exact ? exact_cover_number(cloud, delta) : greedy_cover(cloud, delta).size();
  return std::log(static_cast<double>(count));
}

// ---------------------------------------------------------------------------

double smooth_cover_k1(int d, int m, double k_b) {
  double k1 = 1.0;
  for (int k = 0; k <= m - 1; ++k) {
    double fact = 1.0;
    for (int r = 2; r <= m - k; ++r) fact *= r;
    k1 = std::max(k1, std::pow(static_cast<double>(d), m - k) * k_b / fact);
  }
  return k1;
}

double smooth_cover_net_size(int d, int m, double k1, double delta) {
  const double big_delta = std::pow(delta / (4.0 * k1), 1.0 / m);
  return std::pow(std::ceil(std::sqrt(static_cast<double>(d)) / big_delta), d);
}

namespace {

double b_radius(const BDescriptor& b) {
  return std::visit(
      [](const auto& set) -> double {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, SmoothOutputSet>) {
          return set.bound;
        } else {
          return set.radius;
        }
      },
      b);
}

}  // namespace

SmoothCover build_smooth_cover(const FunctionClass& cls, double delta, std::size_t b_samples, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("build_smooth_cover: delta must lie in (0, 1)");
  if (cls.empty()) throw std::invalid_argument("build_smooth_cover: empty class");
  const int d = cls.input_dim();
  const int m = cls.smoothness();
  const std::size_t dy = cls.dim_y();

  SmoothCover out;
  auto& plan = out.plan;
  plan.delta = delta;
  plan.k1 = smooth_cover_k1(d, m, b_radius(cls.b()));
  plan.big_delta = std::pow(delta / (4.0 * plan.k1), 1.0 / m);
  plan.cells_per_axis = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)) / plan.big_delta));
  const auto c = static_cast<std::size_t>(plan.cells_per_axis);
  std::size_t net = 1;
  for (int j = 0; j < d; ++j) net *= c;
  plan.net_points.resize(net, std::vector<double>(static_cast<std::size_t>(d)));
  for (std::size_t l = 0; l < net; ++l) {
    std::size_t rem = l;
    for (int j = d - 1; j >= 0; --j) {
      plan.net_points[l][static_cast<std::size_t>(j)] = (static_cast<double>(rem % c) + 0.5) / static_cast<double>(c);
      rem /= c;
    }
  }
  const double ed = std::exp(static_cast<double>(d));
  for (int k = 0; k < m; ++k) plan.level_radii.push_back(delta / (2.0 * std::pow(plan.big_delta, k) * ed));

  const auto indices = multi_indices(d, m - 1);
  const auto extra = sample_b(cls.b(), dy, b_samples, seed);

  // per level k: values D^p g(x_l) with [p] = k, ordered (member, l, p)
  std::vector<std::vector<std::uint32_t>> cell_of_value(static_cast<std::size_t>(m));
  plan.level_centers.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    std::vector<std::size_t> level_p;
    for (std::size_t q = 0; q < indices.size(); ++q) {
      if (order(indices[q]) == k) level_p.push_back(q);
    }
    std::vector<std::vector<double>> rows(cls.size() * net * level_p.size(), std::vector<double>(dy));
    parallel_for(cls.size(), [&](std::size_t g) {
      for (std::size_t l = 0; l < net; ++l) {
        for (std::size_t a = 0; a < level_p.size(); ++a) {
          cls[g].generator().derivative_into(indices[level_p[a]], plan.net_points[l],
                                             rows[(g * net + l) * level_p.size() + a]);
        }
      }
    });
    const std::size_t own = rows.size();
    for (const auto& e : extra) rows.emplace_back(e.coords().begin(), e.coords().end());
    const PointCloud cloud(Metric::euclidean, dy, std::move(rows));
    const auto cover = greedy_cover(cloud, plan.level_radii[static_cast<std::size_t>(k)] / 2.0);
    for (auto idx : cover.center_indices) {
      const auto& it = cloud.item(idx);
      plan.level_centers[static_cast<std::size_t>(k)].emplace_back(std::vector<double>(it.begin(), it.end()));
    }
    auto& cells = cell_of_value[static_cast<std::size_t>(k)];
    cells.resize(own);
    for (std::size_t v = 0; v < own; ++v) cells[v] = static_cast<std::uint32_t>(cover.assignment[v]);
  }

  out.signatures.resize(cls.size());
  std::map<std::vector<std::uint32_t>, std::size_t> seen;
  for (std::size_t g = 0; g < cls.size(); ++g) {
    auto& sig = out.signatures[g];
    sig.reserve(net * indices.size());
    std::vector<std::size_t> pos_in_level(static_cast<std::size_t>(m), 0);
    std::vector<std::size_t> level_size(static_cast<std::size_t>(m), 0);
    for (const auto& p : indices) ++level_size[static_cast<std::size_t>(order(p))];
    for (std::size_t l = 0; l < net; ++l) {
      std::fill(pos_in_level.begin(), pos_in_level.end(), 0);
      for (const auto& p : indices) {
        const auto k = static_cast<std::size_t>(order(p));
        const std::size_t v = (g * net + l) * level_size[k] + pos_in_level[k]++;
        sig.push_back(cell_of_value[k][v]);
      }
    }
    const auto [it, inserted] = seen.emplace(sig, seen.size());
    out.cell_of_member.push_back(it->second);
  }
  out.occupied_cells = seen.size();
  return out;
}

CoverValidityReport verify_cover_validity(const FunctionClass& cls, const SmoothCover& cover) {
  if (cover.cell_of_member.size() != cls.size()) throw std::invalid_argument("verify_cover_validity: size mismatch");
  std::vector<std::vector<std::size_t>> groups(cover.occupied_cells);
  for (std::size_t g = 0; g < cls.size(); ++g) groups[cover.cell_of_member[g]].push_back(g);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& grp : groups) {
    for (std::size_t a = 0; a < grp.size(); ++a) {
      for (std::size_t b = a + 1; b < grp.size(); ++b) pairs.emplace_back(grp[a], grp[b]);
    }
  }
  std::vector<double> ratio(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    ratio[k] = sup_distance(cls[pairs[k].first], cls[pairs[k].second]) / cover.plan.delta;
  });
  CoverValidityReport rep;
  rep.pairs_checked = pairs.size();
  for (double r : ratio) rep.max_ratio = std::max(rep.max_ratio, r);
  rep.ok = rep.max_ratio <= 1.0 + 1e-9;
  return rep;
}

}  // namespace vecproc
