#include "vecproc/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vecproc/parallel.hpp"

namespace vecproc {

CovarianceSpectrum::CovarianceSpectrum(std::vector<double> eigenvalues, std::optional<OrthonormalBasis> basis)
    : eigenvalues_(std::move(eigenvalues)),
      basis_(basis ? std::move(*basis) : OrthonormalBasis::identity(std::max<std::size_t>(1, eigenvalues_.size()))) {
  if (eigenvalues_.empty()) throw std::invalid_argument("CovarianceSpectrum: no eigenvalues");
  for (double l : eigenvalues_) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("CovarianceSpectrum: eigenvalues must be >= 0");
  }
  if (basis_.dim() != eigenvalues_.size()) throw std::invalid_argument("CovarianceSpectrum: basis dimension mismatch");
}

CovarianceSpectrum CovarianceSpectrum::geometric(std::size_t modes, double trace) {
  std::vector<double> ev(modes);
  double total = 0.0;
  for (std::size_t j = 0; j < modes; ++j) total += ev[j] = std::ldexp(1.0, -static_cast<int>(j + 1));
  for (double& l : ev) l *= trace / total;
  return CovarianceSpectrum(std::move(ev));
}

CovarianceSpectrum CovarianceSpectrum::uniform(std::size_t modes, double trace) {
  return CovarianceSpectrum(std::vector<double>(modes, trace / static_cast<double>(modes)));
}

CovarianceSpectrum CovarianceSpectrum::single(double trace) { return CovarianceSpectrum({trace}); }

double CovarianceSpectrum::trace() const noexcept {
  double t = 0.0;
  for (double l : eigenvalues_) t += l;
  return t;
}

double CovarianceSpectrum::largest() const noexcept {
  return *std::max_element(eigenvalues_.begin(), eigenvalues_.end());
}

double CovarianceSpectrum::quadratic_form(const HPoint& y) const {
  double q = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) {
    const double c = inner(y, basis_[j]);
    q += eigenvalues_[j] * c * c;
  }
  return q;
}

void sample_gaussian_into(const CovarianceSpectrum& spectrum, Rng& rng, std::span<double> out) {
  if (out.size() != spectrum.dim()) throw std::invalid_argument("sample_gaussian: dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const auto& ev = spectrum.eigenvalues();
  for (std::size_t j = 0; j < ev.size(); ++j) {
    const double xi = rng.normal();
    if (ev[j] == 0.0) continue;
    const double s = std::sqrt(ev[j]) * xi;
    const auto b = spectrum.basis()[j].coords();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += s * b[k];
  }
}

HPoint sample_gaussian(const HPoint& mean, const CovarianceSpectrum& spectrum, Rng& rng) {
  if (mean.dim() != spectrum.dim()) throw std::invalid_argument("sample_gaussian: dimension mismatch");
  HPoint y(spectrum.dim());
  sample_gaussian_into(spectrum, rng, y.coords());
  y += mean;
  return y;
}

namespace {

void validate_c(const std::vector<double>& c) {
  if (c.empty()) throw std::invalid_argument("need at least one summand");
  for (double v : c) {
    if (!(v > 0.0)) throw std::invalid_argument("bounds c_i must be positive");
  }
}

double sum_squares(const std::vector<double>& c) {
  double b2 = 0.0;
  for (double v : c) b2 += v * v;
  return b2;
}

/// ||sum_i c_i sigma_i u_i|| with u_i uniform on the sphere.
double bounded_vector_sum(std::size_t dim_y, const std::vector<double>& c, Rng& rng, std::vector<double>& s,
                          std::vector<double>& u) {
  std::fill(s.begin(), s.end(), 0.0);
  for (double ci : c) {
    double len2 = 0.0;
    do {
      len2 = 0.0;
      for (std::size_t k = 0; k < dim_y; ++k) {
        u[k] = rng.normal();
        len2 += u[k] * u[k];
      }
    } while (len2 == 0.0);
    const double scale = ci * rng.sign() / std::sqrt(len2);
    for (std::size_t k = 0; k < dim_y; ++k) s[k] += scale * u[k];
  }
  double n2 = 0.0;
  for (double v : s) n2 += v * v;
  return std::sqrt(n2);
}

}  // namespace

TailReport hoeffding_real_check(const std::vector<double>& c, const std::vector<double>& t_grid, std::size_t reps,
                                std::uint64_t seed) {
  validate_c(c);
  const double b = std::sqrt(sum_squares(c));
  std::vector<double> stats(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed, r);
    double s = 0.0;
    for (double ci : c) s += ci * rng.sign();
    stats[r] = s;
  }, 256);
  std::vector<double> thr, bnd;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("hoeffding: t must be nonnegative");
    thr.push_back(b * std::sqrt(2.0 * t));
    bnd.push_back(std::exp(-t));
  }
  return make_tail_report("S_n", "t", t_grid, thr, stats, bnd, seed);
}

TailReport hoeffding_hilbert_check(std::size_t dim_y, const std::vector<double>& c, const std::vector<double>& t_grid,
                                   std::size_t reps, std::uint64_t seed) {
  validate_c(c);
  if (dim_y == 0) throw std::invalid_argument("hoeffding: d_Y must be positive");
  const double b = std::sqrt(sum_squares(c));
  std::vector<double> stats(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed, r);
    std::vector<double> s(dim_y), u(dim_y);
    stats[r] = bounded_vector_sum(dim_y, c, rng, s, u);
  }, 256);
  std::vector<double> thr, bnd;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("hoeffding: t must be nonnegative");
    thr.push_back(2.0 * b * std::sqrt(t));
    bnd.push_back(2.0 * std::exp(-t));
  }
  return make_tail_report("norm_S_n", "t", t_grid, thr, stats, bnd, seed);
}

bool CoshReport::all_ok() const {
  for (const auto& r : rows) {
    if (!r.ok) return false;
  }
  return true;
}

CoshReport cosh_moment_check(std::size_t dim_y, const std::vector<double>& c, const std::vector<double>& lambda_grid,
                             std::size_t reps, std::uint64_t seed) {
  validate_c(c);
  if (dim_y == 0) throw std::invalid_argument("cosh_moment_check: d_Y must be positive");
  if (reps < 2) throw std::invalid_argument("cosh_moment_check: need at least 2 replicates");
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw std::invalid_argument("cosh_moment_check: lambda must be positive");
  }
  std::vector<double> norms(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed, r);
    std::vector<double> s(dim_y), u(dim_y);
    norms[r] = bounded_vector_sum(dim_y, c, rng, s, u);
  }, 256);
  CoshReport rep;
  rep.reps = reps;
  rep.seed = seed;
  const double b2 = sum_squares(c);
  for (double lambda : lambda_grid) {
    double sum = 0.0, sum2 = 0.0;
    for (double v : norms) {
      const double x = std::cosh(lambda * v);
      sum += x;
      sum2 += x * x;
    }
    const double n = static_cast<double>(reps);
    CoshRow row;
    row.lambda = lambda;
    row.mean = sum / n;
    row.se = std::sqrt(std::max(0.0, sum2 / n - row.mean * row.mean) / (n - 1.0));
    row.bound = std::exp(lambda * lambda * b2);
    row.inconclusive = row.se / row.mean > 0.2;
    row.ok = row.inconclusive || row.mean <= row.bound * (1.0 + 3.0 * row.se / row.mean);
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<MgfRow> gaussian_mgf_check(const CovarianceSpectrum& spectrum, const std::vector<double>& lambda_grid) {
  std::vector<MgfRow> rows;
  const double tr = spectrum.trace();
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0)) throw std::invalid_argument("gaussian_mgf_check: lambda must be positive");
    if (2.0 * lambda * spectrum.largest() >= 1.0 || 2.0 * lambda * tr >= 1.0) {
      throw std::invalid_argument("gaussian_mgf_check: lambda too large, the product diverges");
    }
    MgfRow row;
    row.lambda = lambda;
    double log_prod = 0.0;
    for (double l : spectrum.eigenvalues()) log_prod += -0.5 * std::log1p(-2.0 * lambda * l);
    row.product = std::exp(log_prod);
    row.bound = 1.0 / std::sqrt(1.0 - 2.0 * lambda * tr);
    row.ok = row.product <= row.bound * (1.0 + 1e-12);
    rows.push_back(row);
  }
  return rows;
}

TailReport gaussian_tail_check(const CovarianceSpectrum& spectrum, const std::vector<double>& a_grid,
                               std::size_t reps, std::uint64_t seed) {
  if (reps < 10000) throw std::invalid_argument("gaussian_tail_check: need at least 10^4 replicates");
  const double tr = spectrum.trace();
  std::vector<double> stats(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed, r);
    std::vector<double> y(spectrum.dim());
    sample_gaussian_into(spectrum, rng, y);
    stats[r] = norm(std::span<const double>(y));
  }, 256);
  std::vector<double> bnd;
  for (double a : a_grid) {
    if (!(a >= 0.0)) throw std::invalid_argument("gaussian_tail_check: a must be nonnegative");
    bnd.push_back(2.0 * std::exp(-3.0 * a * a / (8.0 * tr)));
  }
  return make_tail_report("norm_Y", "a", a_grid, a_grid, stats, bnd, seed);
}

}  // namespace vecproc
