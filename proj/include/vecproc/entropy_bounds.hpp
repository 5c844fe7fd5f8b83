#pragma once

// Closed-form entropy bounds for smooth classes, with the explicit constants
// of the piecewise-polynomial construction, and the Lipschitz contraction of
// empirical covering numbers.

#include <variant>
#include <vector>

#include "vecproc/function_class.hpp"

namespace vecproc {

struct AssouadVariant {
  double m_const;
  double tau;
};
struct BoxVariant {
  double tau;
};
struct ExpVariant {
  double m_const;
  double tau;
};
/// Ball of an RKHS with smooth Mercer kernel; enters as ExpVariant with tau = 2d/h.
struct RkhsVariant {
  double m_const;
  double h;
};

using BoundVariant = std::variant<AssouadVariant, BoxVariant, ExpVariant, RkhsVariant>;

struct BoundParams {
  int d = 1;
  int m = 1;
  double k_b = 1.0;
  BoundVariant variant = AssouadVariant{1.0, 1.0};
  double delta = 0.1;
};

std::string variant_name(const BoundVariant& v);

/// L = ceil(sqrt(d) (4 K1 / delta)^{1/m})^d, used in place of K2 delta^{-d/m}.
double net_count(int d, int m, double k_b, double delta);

/// L m^d (log M + tau log(e^d + 3)) + m^d (log M + tau log(4 e^d K_B / delta))
double bound_assouad(const BoundParams& p);
/// (tau + 1) m^d L log(2 e^d / delta)
double bound_box(const BoundParams& p);
/// M (2 e^d)^tau m^d L delta^{-tau}; also accepts the RKHS variant.
double bound_exp(const BoundParams& p);
/// Dispatches on the variant.
double bound_value(const BoundParams& p);

/// Leading exponent of delta^{-1} in each bound (box: ignoring the log factor).
double bound_exponent(const BoundParams& p);

/// d/m + d'/m'
double combined_smooth_exponent(double d, double m, double d_out, double m_out);

/// min(||y - yhat||, cap): bounded by cap and 1-Lipschitz in yhat.
double clipped_distance_loss(std::span<const double> y, std::span<const double> yhat, double cap);

struct ContractionRow {
  double delta = 0.0;
  std::size_t loss_cover = 0;   // N(c delta, L o G)
  std::size_t class_cover = 0;  // N(delta, G)
  bool ok = true;
};

struct ContractionReport {
  std::vector<ContractionRow> rows;
  bool all_ok = true;
};

/// Exact covering numbers of L o G and G under ||.||_{2,P_n}; loss_c is the
/// Lipschitz constant of the loss (clipped distance scaled by loss_c).
ContractionReport lipschitz_contraction_check(const ClassSample& sample, double loss_c, double cap,
                                              const std::vector<HPoint>& targets,
                                              const std::vector<double>& delta_grid);

}  // namespace vecproc
