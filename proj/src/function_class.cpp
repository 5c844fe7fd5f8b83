#include "vecproc/function_class.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "vecproc/rng.hpp"

namespace vecproc {

using nlohmann::json;

int order(const MultiIndex& p) noexcept {
  int s = 0;
  for (int v : p) s += v;
  return s;
}

double multi_factorial(const MultiIndex& p) noexcept {
  double f = 1.0;
  for (int v : p) {
    for (int k = 2; k <= v; ++k) f *= k;
  }
  return f;
}

double multi_power(std::span<const double> h, const MultiIndex& p) {
  if (h.size() != p.size()) throw std::invalid_argument("multi_power: dimension mismatch");
  double r = 1.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (int k = 0; k < p[j]; ++k) r *= h[j];
  }
  return r;
}

std::vector<MultiIndex> multi_indices(int d, int max_order) {
  if (d <= 0 || max_order < 0) throw std::invalid_argument("multi_indices: bad arguments");
  std::vector<MultiIndex> out;
  MultiIndex p(static_cast<std::size_t>(d), 0);
  // odometer over {0..max_order}^d, lexicographic since the last axis runs fastest
  while (true) {
    if (order(p) <= max_order) out.push_back(p);
    int axis = d - 1;
    while (axis >= 0 && p[static_cast<std::size_t>(axis)] == max_order) {
      p[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
    ++p[static_cast<std::size_t>(axis)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// SmoothMap

SmoothMap::SmoothMap(int input_dim, std::size_t dim_y) : input_dim_(input_dim), dim_y_(dim_y) {
  if (input_dim <= 0 || dim_y == 0) throw std::invalid_argument("SmoothMap: dimensions must be positive");
}

void SmoothMap::add(TrigTerm term) {
  if (term.freq.size() != static_cast<std::size_t>(input_dim_) || term.cos_coef.dim() != dim_y_ ||
      term.sin_coef.dim() != dim_y_) {
    throw std::invalid_argument("SmoothMap: trig term has wrong shape");
  }
  trig_.push_back(std::move(term));
}

void SmoothMap::add(MonomialTerm term) {
  if (term.power.size() != static_cast<std::size_t>(input_dim_) || term.coef.dim() != dim_y_) {
    throw std::invalid_argument("SmoothMap: monomial term has wrong shape");
  }
  for (int v : term.power) {
    if (v < 0) throw std::invalid_argument("SmoothMap: negative monomial power");
  }
  mono_.push_back(std::move(term));
}

HPoint SmoothMap::value(std::span<const double> x) const {
  return derivative(MultiIndex(static_cast<std::size_t>(input_dim_), 0), x);
}

HPoint SmoothMap::derivative(const MultiIndex& p, std::span<const double> x) const {
  HPoint out(dim_y_);
  derivative_into(p, x, out.coords());
  return out;
}

void SmoothMap::derivative_into(const MultiIndex& p, std::span<const double> x,
                                std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(input_dim_) || p.size() != x.size() ||
      out.size() != dim_y_) {
    throw std::invalid_argument("SmoothMap::derivative: dimension mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const int k = order(p);
  const double shift = k * std::numbers::pi / 2.0;
  for (const auto& t : trig_) {
    const double scale = multi_power(t.freq, p);
    if (scale == 0.0) continue;
    double theta = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) theta += t.freq[j] * x[j];
    const double c = scale * std::cos(theta + shift);
    const double s = scale * std::sin(theta + shift);
    for (std::size_t i = 0; i < dim_y_; ++i) out[i] += c * t.cos_coef[i] + s * t.sin_coef[i];
  }
  for (const auto& t : mono_) {
    double factor = 1.0;
    for (std::size_t j = 0; j < p.size() && factor != 0.0; ++j) {
      const int a = t.power[j];
      const int q = p[j];
      if (q > a) {
        factor = 0.0;
        break;
      }
      for (int r = a - q + 1; r <= a; ++r) factor *= r;
      for (int r = 0; r < a - q; ++r) factor *= x[j];
    }
    if (factor == 0.0) continue;
    for (std::size_t i = 0; i < dim_y_; ++i) out[i] += factor * t.coef[i];
  }
}

HPoint SmoothMap::mean_uniform() const {
  HPoint mean(dim_y_);
  for (const auto& t : trig_) {
    // integral of exp(i w.x) over the unit cube factorises over axes
    std::complex<double> z{1.0, 0.0};
    for (double w : t.freq) {
      if (w == 0.0) continue;
      z *= std::complex<double>(std::sin(w) / w, (1.0 - std::cos(w)) / w);
    }
    mean.axpy(z.real(), t.cos_coef);
    mean.axpy(z.imag(), t.sin_coef);
  }
  for (const auto& t : mono_) {
    double v = 1.0;
    for (int a : t.power) v /= (a + 1);
    mean.axpy(v, t.coef);
  }
  return mean;
}

double SmoothMap::directional_bound(int k) const {
  if (k < 0) throw std::invalid_argument("directional_bound: negative order");
  double bound = 0.0;
  for (const auto& t : trig_) {
    const double w = norm(t.freq);
    bound += std::pow(w, k) * (norm(t.cos_coef) + norm(t.sin_coef));
  }
  for (const auto& t : mono_) {
    // g^{(k)}(h,...,h) = sum_{[q]=k} k!/q! h^q D^q, and sum_{[q]=k} k!/q! |h^q| <= d^{k/2}
    double largest = 0.0;
    for (const auto& q : multi_indices(input_dim_, k)) {
      if (order(q) != k) continue;
      double f = 1.0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        if (q[j] > t.power[j]) {
          f = 0.0;
          break;
        }
        for (int r = t.power[j] - q[j] + 1; r <= t.power[j]; ++r) f *= r;
      }
      largest = std::max(largest, f);
    }
    bound += std::pow(static_cast<double>(input_dim_), k / 2.0) * largest * norm(t.coef);
  }
  return bound;
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(SmoothMap generator, int m, int resolution)
    : generator_(std::move(generator)), m_(m), resolution_(resolution) {
  if (m < 0) throw std::invalid_argument("GridFunction: smoothness must be nonnegative");
  if (resolution < 2) throw std::invalid_argument("GridFunction: resolution must be at least 2");
  node_count_ = 1;
  for (int j = 0; j < generator_.input_dim(); ++j) node_count_ *= static_cast<std::size_t>(resolution);
  indices_ = multi_indices(generator_.input_dim(), m);
}

GridFunction GridFunction::sample(SmoothMap generator, int m, int resolution) {
  GridFunction g(std::move(generator), m, resolution);
  const std::size_t dy = g.dim_y();
  g.data_.assign(g.indices_.size() * g.node_count_ * dy, 0.0);
  for (std::size_t node = 0; node < g.node_count_; ++node) {
    const auto x = g.node(node);
    for (std::size_t k = 0; k < g.indices_.size(); ++k) {
      std::span<double> out(g.data_.data() + (k * g.node_count_ + node) * dy, dy);
      g.generator_.derivative_into(g.indices_[k], x, out);
    }
  }
  for (double v : g.data_) {
    if (!std::isfinite(v)) throw std::runtime_error("GridFunction: non-finite sample");
  }
  return g;
}

std::vector<double> GridFunction::node(std::size_t i) const {
  const int d = input_dim();
  std::vector<double> x(static_cast<std::size_t>(d));
  const double step = 1.0 / (resolution_ - 1);
  for (int j = d - 1; j >= 0; --j) {
    x[static_cast<std::size_t>(j)] = static_cast<double>(i % static_cast<std::size_t>(resolution_)) * step;
    i /= static_cast<std::size_t>(resolution_);
  }
  return x;
}

std::size_t GridFunction::index_of(const MultiIndex& p) const {
  const auto it = std::find(indices_.begin(), indices_.end(), p);
  if (it == indices_.end()) throw std::invalid_argument("GridFunction: derivative order not stored");
  return static_cast<std::size_t>(it - indices_.begin());
}

std::span<const double> GridFunction::deriv(std::size_t index, std::size_t node) const {
  const std::size_t dy = dim_y();
  return {data_.data() + (index * node_count_ + node) * dy, dy};
}

// ---------------------------------------------------------------------------
// EmpiricalDesign

EmpiricalDesign::EmpiricalDesign(std::vector<std::vector<double>> points) : points_(std::move(points)) {
  for (const auto& x : points_) {
    if (x.size() != points_.front().size() || x.empty()) {
      throw std::invalid_argument("EmpiricalDesign: inconsistent point dimensions");
    }
    for (double v : x) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("EmpiricalDesign: point outside the unit cube");
    }
  }
}

EmpiricalDesign EmpiricalDesign::uniform(std::size_t n, int d, std::uint64_t seed, std::uint64_t stream) {
  Rng rng(seed, stream);
  std::vector<std::vector<double>> pts(n, std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& x : pts) {
    for (double& v : x) v = rng.uniform();
  }
  return EmpiricalDesign(std::move(pts));
}

EmpiricalDesign EmpiricalDesign::midpoints(std::size_t n) {
  std::vector<std::vector<double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {(static_cast<double>(i) + 0.5) / static_cast<double>(n)};
  return EmpiricalDesign(std::move(pts));
}

// ---------------------------------------------------------------------------
// FunctionClass

std::string describe(const BDescriptor& b) {
  return std::visit(
      [](const auto& set) -> std::string {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, BallSet>) {
          return "ball(radius=" + std::to_string(set.radius) + ")";
        } else if constexpr (std::is_same_v<T, SpanSet>) {
          return "span(r=" + std::to_string(set.psi.size()) + ", radius=" + std::to_string(set.radius) + ")";
        } else {
          return "smooth_output(d'=" + std::to_string(set.out_dim) + ", m'=" + std::to_string(set.out_order) +
                 ", M=" + std::to_string(set.bound) + ", grid'=" + std::to_string(set.out_grid) + ")";
        }
      },
      b);
}

FunctionClass::FunctionClass(int d, int m, std::size_t dim_y, int resolution, BDescriptor b,
                             std::uint64_t seed, std::vector<GridFunction> members)
    : d_(d), m_(m), dim_y_(dim_y), resolution_(resolution), b_(std::move(b)), seed_(seed),
      members_(std::move(members)) {
  for (const auto& g : members_) {
    if (g.input_dim() != d || g.smoothness() != m || g.dim_y() != dim_y || g.resolution() != resolution) {
      throw std::invalid_argument("FunctionClass: member metadata differs from the class");
    }
  }
}

namespace {

/// Orthonormal basis (as rows) of span(psi); throws on degenerate input.
std::vector<HPoint> orthonormal_span(const std::vector<HPoint>& psi) {
  if (psi.empty()) throw std::invalid_argument("span set: empty basis (B would be {0})");
  std::vector<HPoint> q;
  for (const auto& v : psi) {
    if (v.dim() != psi.front().dim()) throw std::invalid_argument("span set: inconsistent dimensions");
    HPoint w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) w.axpy(-inner(w, u), u);
    }
    const double len = norm(w);
    if (len < 1e-10 * std::max(1.0, norm(v))) throw std::invalid_argument("span set: linearly dependent basis");
    w *= 1.0 / len;
    q.push_back(std::move(w));
  }
  return q;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// max |Delta^q f / h^[q]| over the output grid for every 0 <= [q] <= order.
double max_scaled_difference(std::span<const double> f, int out_dim, int out_grid, int max_order) {
  const double h = 1.0 / (out_grid - 1);
  double worst = 0.0;
  const auto qs = multi_indices(out_dim, max_order);
  std::vector<int> base(static_cast<std::size_t>(out_dim));
  std::size_t total = 1;
  for (int j = 0; j < out_dim; ++j) total *= static_cast<std::size_t>(out_grid);
  for (const auto& q : qs) {
    const auto rs = multi_indices(out_dim, order(q));
    for (std::size_t node = 0; node < total; ++node) {
      std::size_t rem = node;
      bool inside = true;
      for (int j = out_dim - 1; j >= 0; --j) {
        base[static_cast<std::size_t>(j)] = static_cast<int>(rem % static_cast<std::size_t>(out_grid));
        rem /= static_cast<std::size_t>(out_grid);
        if (base[static_cast<std::size_t>(j)] + q[static_cast<std::size_t>(j)] >= out_grid) inside = false;
      }
      if (!inside) continue;
      double acc = 0.0;
      for (const auto& r : rs) {
        bool dominated = true;
        for (std::size_t j = 0; j < r.size(); ++j) dominated = dominated && r[j] <= q[j];
        if (!dominated) continue;
        double coef = ((order(q) - order(r)) % 2 == 0) ? 1.0 : -1.0;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < r.size(); ++j) {
          coef *= binomial(q[j], r[j]);
          idx = idx * static_cast<std::size_t>(out_grid) + static_cast<std::size_t>(base[j] + r[j]);
        }
        acc += coef * f[idx];
      }
      worst = std::max(worst, std::abs(acc) / std::pow(h, order(q)));
    }
  }
  return worst;
}

}  // namespace

MembershipReport FunctionClass::check_membership(double tol) const {
  MembershipReport report;
  std::visit(
      [&](const auto& set) {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, BallSet>) {
          for (const auto& g : members_) {
            for (std::size_t k = 0; k < g.indices().size(); ++k) {
              for (std::size_t node = 0; node < g.node_count(); ++node) {
                const double excess = norm(g.deriv(k, node)) - set.radius;
                report.max_excess = std::max(report.max_excess, excess);
                ++report.values_checked;
              }
            }
          }
          report.ok = report.max_excess <= tol;
        } else if constexpr (std::is_same_v<T, SpanSet>) {
          const auto q = orthonormal_span(set.psi);
          for (const auto& g : members_) {
            for (std::size_t k = 0; k < g.indices().size(); ++k) {
              for (std::size_t node = 0; node < g.node_count(); ++node) {
                HPoint v(g.deriv(k, node));
                HPoint residual = v;
                for (const auto& u : q) residual.axpy(-inner(v, u), u);
                const double excess = std::max(norm(residual), norm(v) - set.radius);
                report.max_excess = std::max(report.max_excess, excess);
                ++report.values_checked;
              }
            }
          }
          report.ok = report.max_excess <= tol;
        } else {
          const double scale = std::sqrt(static_cast<double>(dim_y_));
          std::vector<double> f(dim_y_);
          for (const auto& g : members_) {
            for (std::size_t k = 0; k < g.indices().size(); ++k) {
              for (std::size_t node = 0; node < g.node_count(); ++node) {
                const auto v = g.deriv(k, node);
                for (std::size_t j = 0; j < dim_y_; ++j) f[j] = v[j] * scale;
                const double worst = max_scaled_difference(f, set.out_dim, set.out_grid, set.out_order);
                report.max_excess = std::max(report.max_excess, worst - set.bound);
                ++report.values_checked;
              }
            }
          }
          report.ok = report.max_excess <= 0.05 * set.bound;
        }
      },
      b_);
  return report;
}

// ---------------------------------------------------------------------------
// generators

namespace {

int default_resolution(int d) {
  if (d == 1) return 1025;
  if (d == 2) return 65;
  return 9;
}

double weight(const std::vector<double>& freq, int max_order) {
  return std::max(1.0, std::pow(norm(freq), max_order));
}

/// Random trigonometric map R^d -> R^{coef_dim} with
/// sum_w weight(w) (|a_w| + |b_w|) = u * budget, u ~ U[1/4, 1], which bounds
/// every partial derivative of order <= weight_order by `budget`.
SmoothMap random_trig_map(int d, std::size_t coef_dim, int weight_order, double budget, int max_frequency,
                          Rng& rng) {
  std::vector<TrigTerm> terms;
  double total = 0.0;
  for (const auto& k : multi_indices(d, max_frequency * d)) {
    if (*std::max_element(k.begin(), k.end()) > max_frequency) continue;
    std::vector<double> freq(k.begin(), k.end());
    const double w = weight(freq, weight_order);
    const bool constant = order(k) == 0;
    HPoint a(coef_dim), b(coef_dim);
    for (std::size_t i = 0; i < coef_dim; ++i) {
      a[i] = rng.normal() / (w * w);
      b[i] = constant ? 0.0 : rng.normal() / (w * w);
    }
    total += w * (norm(a) + norm(b));
    terms.push_back({std::move(freq), std::move(a), std::move(b)});
  }
  const double target = budget * rng.uniform(0.25, 1.0);
  const double scale = total > 0.0 ? target / total : 0.0;
  SmoothMap map(d, coef_dim);
  for (auto& t : terms) {
    t.cos_coef *= scale;
    t.sin_coef *= scale;
    map.add(std::move(t));
  }
  return map;
}

void require_positive(int d, int m, std::size_t dim_y) {
  if (d <= 0 || m <= 0 || dim_y == 0) throw std::invalid_argument("generator: d, m and d_Y must be positive");
}

}  // namespace

FunctionClass generate_finite_dim_ball_class(int d, int m, std::size_t dim_y, double k_b, std::size_t count,
                                             std::uint64_t seed, GeneratorOptions options) {
  require_positive(d, m, dim_y);
  if (!(k_b > 0.0)) throw std::invalid_argument("generator: K_B must be positive");
  const int res = options.resolution > 0 ? options.resolution : default_resolution(d);
  std::vector<GridFunction> members;
  members.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, i);
    members.push_back(GridFunction::sample(random_trig_map(d, dim_y, m + 1, k_b, options.max_frequency, rng), m, res));
  }
  return FunctionClass(d, m, dim_y, res, BallSet{k_b}, seed, std::move(members));
}

FunctionClass generate_span_class(int d, int m, std::vector<HPoint> psi, double radius, std::size_t count,
                                  std::uint64_t seed, GeneratorOptions options) {
  const auto q = orthonormal_span(psi);
  const std::size_t dim_y = psi.front().dim();
  require_positive(d, m, dim_y);
  if (!(radius > 0.0)) throw std::invalid_argument("generator: radius must be positive");
  const int res = options.resolution > 0 ? options.resolution : default_resolution(d);
  std::vector<GridFunction> members;
  members.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, i);
    const SmoothMap theta = random_trig_map(d, q.size(), m + 1, radius, options.max_frequency, rng);
    SmoothMap map(d, dim_y);
    for (const auto& t : theta.trig_terms()) {
      HPoint a(dim_y), b(dim_y);
      for (std::size_t j = 0; j < q.size(); ++j) {
        a.axpy(t.cos_coef[j], q[j]);
        b.axpy(t.sin_coef[j], q[j]);
      }
      map.add(TrigTerm{t.freq, std::move(a), std::move(b)});
    }
    members.push_back(GridFunction::sample(std::move(map), m, res));
  }
  return FunctionClass(d, m, dim_y, res, SpanSet{std::move(psi), radius}, seed, std::move(members));
}

FunctionClass generate_smooth_output_class(int d, int m, int out_dim, int out_order, double bound, int out_grid,
                                           std::size_t count, std::uint64_t seed, GeneratorOptions options) {
  if (out_order <= 0) throw std::invalid_argument("smooth output class: m' must be a positive integer");
  if (out_dim <= 0) throw std::invalid_argument("smooth output class: d' must be positive");
  if (!(bound > 0.0)) throw std::invalid_argument("smooth output class: M must be positive");
  // j-th forward differences over steps h' resolve j-th partials to within j h' M / 2,
  // which stays inside the 5% slack only when h' <= 0.1 / m'
  if (out_grid < 2 || (out_grid - 1) < 10 * out_order) {
    throw std::invalid_argument("smooth output class: grid' too coarse for the finite-difference check");
  }
  std::size_t dim_y = 1;
  for (int j = 0; j < out_dim; ++j) dim_y *= static_cast<std::size_t>(out_grid);
  require_positive(d, m, dim_y);
  const int res = options.resolution > 0 ? options.resolution : default_resolution(d);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dim_y));
  const double h = 1.0 / (out_grid - 1);

  std::vector<GridFunction> members;
  members.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, i);
    // joint real-valued map on R^{d + d'}; splitting cos(w.x + w'.x') gives Y-valued coefficients
    const SmoothMap joint = random_trig_map(d + out_dim, 1, m + 1 + out_order, bound, options.max_frequency, rng);
    SmoothMap map(d, dim_y);
    for (const auto& t : joint.trig_terms()) {
      std::vector<double> w(t.freq.begin(), t.freq.begin() + d);
      HPoint a(dim_y), b(dim_y);
      for (std::size_t node = 0; node < dim_y; ++node) {
        std::size_t rem = node;
        double theta = 0.0;
        for (int j = out_dim - 1; j >= 0; --j) {
          theta += t.freq[static_cast<std::size_t>(d + j)] * static_cast<double>(rem % static_cast<std::size_t>(out_grid)) * h;
          rem /= static_cast<std::size_t>(out_grid);
        }
        const double ca = t.cos_coef[0], sb = t.sin_coef[0];
        a[node] = inv_sqrt * (ca * std::cos(theta) + sb * std::sin(theta));
        b[node] = inv_sqrt * (-ca * std::sin(theta) + sb * std::cos(theta));
      }
      map.add(TrigTerm{std::move(w), std::move(a), std::move(b)});
    }
    members.push_back(GridFunction::sample(std::move(map), m, res));
  }
  return FunctionClass(d, m, dim_y, res, SmoothOutputSet{out_dim, out_order, bound, out_grid}, seed,
                       std::move(members));
}

// ---------------------------------------------------------------------------
// norms

double sup_norm(const GridFunction& g) {
  double best = 0.0;
  for (std::size_t node = 0; node < g.node_count(); ++node) best = std::max(best, norm(g.value(node)));
  return best;
}

double sup_distance(const GridFunction& g1, const GridFunction& g2) {
  if (g1.node_count() != g2.node_count() || g1.dim_y() != g2.dim_y() || g1.input_dim() != g2.input_dim()) {
    throw std::invalid_argument("sup_distance: grids differ");
  }
  double best = 0.0;
  for (std::size_t node = 0; node < g1.node_count(); ++node) {
    best = std::max(best, distance(g1.value(node), g2.value(node)));
  }
  return best;
}

double lp_seminorm(const GridFunction& g, double p, const EmpiricalDesign& design) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_seminorm: p must be >= 1");
  if (design.empty()) throw std::invalid_argument("lp_seminorm: empty design");
  double acc = 0.0;
  for (std::size_t i = 0; i < design.size(); ++i) acc += std::pow(norm(g.evaluate(design[i])), p);
  return std::pow(acc / static_cast<double>(design.size()), 1.0 / p);
}

double semi_inner(const GridFunction& g1, const GridFunction& g2, const EmpiricalDesign& design) {
  if (design.empty()) throw std::invalid_argument("semi_inner: empty design");
  double acc = 0.0;
  for (std::size_t i = 0; i < design.size(); ++i) acc += inner(g1.evaluate(design[i]), g2.evaluate(design[i]));
  return acc / static_cast<double>(design.size());
}

std::vector<double> envelope(const FunctionClass& cls, const EmpiricalDesign& design) {
  if (cls.empty()) throw std::invalid_argument("envelope: empty class");
  std::vector<double> env(design.size(), 0.0);
  for (const auto& g : cls.members()) {
    for (std::size_t i = 0; i < design.size(); ++i) env[i] = std::max(env[i], norm(g.evaluate(design[i])));
  }
  return env;
}

double ClassSample::distance(std::size_t a, std::size_t b) const {
  double acc = 0.0;
  const double* pa = data.data() + a * points * dim_y;
  const double* pb = data.data() + b * points * dim_y;
  for (std::size_t k = 0; k < points * dim_y; ++k) {
    const double diff = pa[k] - pb[k];
    acc += diff * diff;
  }
  return points == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(points));
}

double ClassSample::l2_norm(std::size_t g) const {
  double acc = 0.0;
  const double* p = data.data() + g * points * dim_y;
  for (std::size_t k = 0; k < points * dim_y; ++k) acc += p[k] * p[k];
  return points == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(points));
}

ClassSample evaluate_on(const FunctionClass& cls, const EmpiricalDesign& design) {
  if (!design.empty() && design.input_dim() != cls.input_dim()) {
    throw std::invalid_argument("evaluate_on: design dimension differs from the class");
  }
  ClassSample out(cls.size(), design.size(), cls.dim_y());
  const MultiIndex zero(static_cast<std::size_t>(cls.input_dim()), 0);
  for (std::size_t g = 0; g < cls.size(); ++g) {
    for (std::size_t i = 0; i < design.size(); ++i) cls[g].generator().derivative_into(zero, design[i], out.at(g, i));
  }
  return out;
}

std::vector<HPoint> sample_b(const BDescriptor& b, std::size_t dim_y, std::size_t count, std::uint64_t seed) {
  std::vector<HPoint> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    Rng rng(seed, c);
    std::visit(
        [&](const auto& set) {
          using T = std::decay_t<decltype(set)>;
          if constexpr (std::is_same_v<T, BallSet>) {
            // direction uniform on the sphere, radius with density ~ r^{d_Y - 1}
            HPoint v(dim_y);
            for (std::size_t j = 0; j < dim_y; ++j) v[j] = rng.normal();
            const double len = norm(v);
            const double r = set.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim_y));
            if (len > 0.0) v *= r / len;
            out.push_back(std::move(v));
          } else if constexpr (std::is_same_v<T, SpanSet>) {
            const auto q = orthonormal_span(set.psi);
            HPoint theta(q.size());
            for (std::size_t j = 0; j < q.size(); ++j) theta[j] = rng.normal();
            const double len = norm(theta);
            const double r = set.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(q.size()));
            HPoint v(dim_y);
            for (std::size_t j = 0; j < q.size(); ++j) v.axpy(len > 0.0 ? theta[j] * r / len : 0.0, q[j]);
            out.push_back(std::move(v));
          } else {
            const SmoothMap f = random_trig_map(set.out_dim, 1, set.out_order + 1, set.bound, 3, rng);
            const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dim_y));
            HPoint v(dim_y);
            std::vector<double> x(static_cast<std::size_t>(set.out_dim));
            const double h = 1.0 / (set.out_grid - 1);
            for (std::size_t node = 0; node < dim_y; ++node) {
              std::size_t rem = node;
              for (int j = set.out_dim - 1; j >= 0; --j) {
                x[static_cast<std::size_t>(j)] = static_cast<double>(rem % static_cast<std::size_t>(set.out_grid)) * h;
                rem /= static_cast<std::size_t>(set.out_grid);
              }
              v[node] = inv_sqrt * f.value(x)[0];
            }
            out.push_back(std::move(v));
          }
        },
        b);
  }
  return out;
}

TaylorReport taylor_remainder_check(const GridFunction& g, std::span<const double> a, std::span<const double> h,
                                    double k) {
  const auto d = static_cast<std::size_t>(g.input_dim());
  if (a.size() != d || h.size() != d) throw std::invalid_argument("taylor_remainder_check: dimension mismatch");
  std::vector<double> end(d);
  for (std::size_t j = 0; j < d; ++j) {
    end[j] = a[j] + h[j];
    // the cube is convex, so both endpoints inside keeps the segment inside
    if (a[j] < 0.0 || a[j] > 1.0 || end[j] < 0.0 || end[j] > 1.0) {
      throw std::invalid_argument("taylor_remainder_check: segment leaves the unit cube");
    }
  }
  const int m = g.smoothness();
  HPoint remainder = g.evaluate(end);
  for (const auto& p : multi_indices(g.input_dim(), m)) {
    remainder.axpy(-multi_power(h, p) / multi_factorial(p), g.evaluate_derivative(p, a));
  }
  double fact = 1.0;
  for (int r = 2; r <= m + 1; ++r) fact *= r;
  const double lhs = norm(remainder);
  const double rhs = k * std::pow(norm(h), m + 1) / fact;
  return {lhs, rhs, lhs <= rhs * (1.0 + 1e-9)};
}

// ---------------------------------------------------------------------------
// serialization

namespace {

json hpoint_json(const HPoint& p) { return json(std::vector<double>(p.coords().begin(), p.coords().end())); }

HPoint hpoint_from(const json& j) { return HPoint(j.get<std::vector<double>>()); }

json b_json(const BDescriptor& b) {
  return std::visit(
      [](const auto& set) -> json {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, BallSet>) {
          return json{{"kind", "ball"}, {"radius", set.radius}};
        } else if constexpr (std::is_same_v<T, SpanSet>) {
          json psi = json::array();
          for (const auto& v : set.psi) psi.push_back(hpoint_json(v));
          return json{{"kind", "span"}, {"psi", psi}, {"radius", set.radius}};
        } else {
          return json{{"kind", "smooth_output"}, {"out_dim", set.out_dim}, {"out_order", set.out_order},
                      {"bound", set.bound}, {"out_grid", set.out_grid}};
        }
      },
      b);
}

BDescriptor b_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "ball") return BallSet{j.at("radius").get<double>()};
  if (kind == "span") {
    std::vector<HPoint> psi;
    for (const auto& v : j.at("psi")) psi.push_back(hpoint_from(v));
    return SpanSet{std::move(psi), j.at("radius").get<double>()};
  }
  if (kind == "smooth_output") {
    return SmoothOutputSet{j.at("out_dim").get<int>(), j.at("out_order").get<int>(), j.at("bound").get<double>(),
                           j.at("out_grid").get<int>()};
  }
  throw std::invalid_argument("unknown B descriptor kind: " + kind);
}

void append_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string FunctionClass::serialize() const {
  json header;
  header["format"] = "vecproc.function_class";
  header["version"] = 1;
  header["d"] = d_;
  header["m"] = m_;
  header["d_Y"] = dim_y_;
  header["resolution"] = resolution_;
  header["b_descriptor"] = b_json(b_);
  header["seed"] = seed_;
  header["member_count"] = members_.size();
  json multi = json::array();
  for (const auto& p : multi_indices(d_, m_)) multi.push_back(p);
  header["multi_indices"] = multi;
  json gens = json::array();
  for (const auto& g : members_) {
    json terms = json::array();
    for (const auto& t : g.generator().trig_terms()) {
      terms.push_back({{"freq", t.freq}, {"cos", hpoint_json(t.cos_coef)}, {"sin", hpoint_json(t.sin_coef)}});
    }
    json monos = json::array();
    for (const auto& t : g.generator().monomial_terms()) {
      monos.push_back({{"power", t.power}, {"coef", hpoint_json(t.coef)}});
    }
    gens.push_back({{"trig", terms}, {"monomial", monos}});
  }
  header["generators"] = gens;
  std::size_t payload = 0;
  for (const auto& g : members_) payload += g.raw().size();
  header["payload_doubles"] = payload;

  std::string out = header.dump() + "\n";
  out.reserve(out.size() + payload * 8);
  for (const auto& g : members_) {
    for (double v : g.raw()) append_le(out, v);
  }
  return out;
}

FunctionClass FunctionClass::deserialize(const std::string& bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw std::invalid_argument("deserialize: missing header");
  const json header = json::parse(bytes.substr(0, newline));
  if (header.at("format") != "vecproc.function_class") throw std::invalid_argument("deserialize: wrong format");
  const int d = header.at("d").get<int>();
  const int m = header.at("m").get<int>();
  const auto dim_y = header.at("d_Y").get<std::size_t>();
  const int res = header.at("resolution").get<int>();
  const auto payload = header.at("payload_doubles").get<std::size_t>();
  if (bytes.size() - newline - 1 != payload * 8) throw std::invalid_argument("deserialize: truncated payload");

  std::vector<GridFunction> members;
  const char* cursor = bytes.data() + newline + 1;
  for (const auto& gen : header.at("generators")) {
    SmoothMap map(d, dim_y);
    for (const auto& t : gen.at("trig")) {
      map.add(TrigTerm{t.at("freq").get<std::vector<double>>(), hpoint_from(t.at("cos")), hpoint_from(t.at("sin"))});
    }
    for (const auto& t : gen.at("monomial")) {
      map.add(MonomialTerm{t.at("power").get<MultiIndex>(), hpoint_from(t.at("coef"))});
    }
    auto g = GridFunction::sample(std::move(map), m, res);
    for (double v : g.raw()) {
      if (read_le(cursor) != v) throw std::invalid_argument("deserialize: payload disagrees with generator");
      cursor += 8;
    }
    members.push_back(std::move(g));
  }
  return FunctionClass(d, m, dim_y, res, b_from(header.at("b_descriptor")), header.at("seed").get<std::uint64_t>(),
                       std::move(members));
}

}  // namespace vecproc
