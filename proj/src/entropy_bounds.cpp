#include "vecproc/entropy_bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "vecproc/covering.hpp"

namespace vecproc {

std::string variant_name(const BoundVariant& v) {
  switch (v.index()) {
    case 0: return "assouad";
    case 1: return "box";
    case 2: return "exp";
    default: return "rkhs";
  }
}

namespace {

void validate(const BoundParams& p) {
  if (p.d <= 0 || p.m <= 0) throw std::invalid_argument("entropy bound: d and m must be positive");
  if (!(p.k_b > 0.0)) throw std::invalid_argument("entropy bound: K_B must be positive");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw std::invalid_argument("entropy bound: delta must lie in (0, 1)");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BoxVariant>) {
          if (!(v.tau >= 0.0)) throw std::invalid_argument("entropy bound: tau_box must be nonnegative");
        } else if constexpr (std::is_same_v<T, RkhsVariant>) {
          if (!(v.m_const > 0.0)) throw std::invalid_argument("entropy bound: M must be positive");
          if (!(v.h > p.d)) throw std::invalid_argument("entropy bound: RKHS smoothness h must exceed d");
        } else {
          if (!(v.m_const > 0.0)) throw std::invalid_argument("entropy bound: M must be positive");
          if (!(v.tau >= 0.0)) throw std::invalid_argument("entropy bound: tau must be nonnegative");
        }
      },
      p.variant);
}

double m_pow_d(const BoundParams& p) { return std::pow(static_cast<double>(p.m), p.d); }

}  // namespace

double net_count(int d, int m, double k_b, double delta) {
  return smooth_cover_net_size(d, m, smooth_cover_k1(d, m, k_b), delta);
}

double bound_assouad(const BoundParams& p) {
  validate(p);
  const auto* v = std::get_if<AssouadVariant>(&p.variant);
  if (v == nullptr) throw std::invalid_argument("bound_assouad: variant is not assouad");
  const double ed = std::exp(static_cast<double>(p.d));
  const double l = net_count(p.d, p.m, p.k_b, p.delta);
  const double md = m_pow_d(p);
  return l * md * (std::log(v->m_const) + v->tau * std::log(ed + 3.0)) +
         md * (std::log(v->m_const) + v->tau * std::log(4.0 * ed * p.k_b / p.delta));
}

double bound_box(const BoundParams& p) {
  validate(p);
  const auto* v = std::get_if<BoxVariant>(&p.variant);
  if (v == nullptr) throw std::invalid_argument("bound_box: variant is not box");
  const double ed = std::exp(static_cast<double>(p.d));
  return (v->tau + 1.0) * m_pow_d(p) * net_count(p.d, p.m, p.k_b, p.delta) * std::log(2.0 * ed / p.delta);
}

double bound_exp(const BoundParams& p) {
  validate(p);
  double m_const = 0.0, tau = 0.0;
  if (const auto* v = std::get_if<ExpVariant>(&p.variant)) {
    m_const = v->m_const;
    tau = v->tau;
  } else if (const auto* r = std::get_if<RkhsVariant>(&p.variant)) {
    m_const = r->m_const;
    tau = 2.0 * p.d / r->h;
  } else {
    throw std::invalid_argument("bound_exp: variant is not exponential");
  }
  const double ed = std::exp(static_cast<double>(p.d));
  return m_const * std::pow(2.0 * ed, tau) * m_pow_d(p) * net_count(p.d, p.m, p.k_b, p.delta) *
         std::pow(p.delta, -tau);
}

double bound_value(const BoundParams& p) {
  switch (p.variant.index()) {
    case 0: return bound_assouad(p);
    case 1: return bound_box(p);
    default: return bound_exp(p);
  }
}

double bound_exponent(const BoundParams& p) {
  validate(p);
  const double base = static_cast<double>(p.d) / p.m;
  if (const auto* v = std::get_if<ExpVariant>(&p.variant)) return base + v->tau;
  if (const auto* r = std::get_if<RkhsVariant>(&p.variant)) return base + 2.0 * p.d / r->h;
  return base;
}

double combined_smooth_exponent(double d, double m, double d_out, double m_out) {
  if (!(d > 0.0 && m > 0.0 && d_out > 0.0 && m_out > 0.0)) {
    throw std::invalid_argument("combined_smooth_exponent: arguments must be positive");
  }
  return d / m + d_out / m_out;
}

double clipped_distance_loss(std::span<const double> y, std::span<const double> yhat, double cap) {
  return std::min(distance(y, yhat), cap);
}

ContractionReport lipschitz_contraction_check(const ClassSample& sample, double loss_c, double cap,
                                              const std::vector<HPoint>& targets,
                                              const std::vector<double>& delta_grid) {
  if (!(loss_c > 0.0)) throw std::invalid_argument("lipschitz_contraction_check: c must be positive");
  if (!(cap > 0.0)) throw std::invalid_argument("lipschitz_contraction_check: cap must be positive");
  if (sample.members > kExactLimit) {
    throw std::invalid_argument("lipschitz_contraction_check: class too large for exact covers");
  }
  if (sample.members == 0) throw std::invalid_argument("lipschitz_contraction_check: empty class");
  if (targets.size() != sample.points) throw std::invalid_argument("lipschitz_contraction_check: one target per point");
  ClassSample loss(sample.members, sample.points, 1);
  for (std::size_t g = 0; g < sample.members; ++g) {
    for (std::size_t i = 0; i < sample.points; ++i) {
      loss.at(g, i)[0] = loss_c * clipped_distance_loss(targets[i].coords(), sample.at(g, i), cap);
    }
  }
  const PointCloud lg = PointCloud::l2_empirical(loss);
  const PointCloud gc = PointCloud::l2_empirical(sample);
  ContractionReport rep;
  for (double delta : delta_grid) {
    ContractionRow row;
    row.delta = delta;
    row.loss_cover = exact_cover_number(lg, loss_c * delta);
    row.class_cover = exact_cover_number(gc, delta);
    row.ok = row.loss_cover <= row.class_cover;
    rep.all_ok = rep.all_ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace vecproc
