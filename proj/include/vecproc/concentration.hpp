#pragma once

// Samplers and validators for Hoeffding-type and Gaussian concentration in
// (truncated) Hilbert space.

#include <cstdint>
#include <optional>
#include <vector>

#include "vecproc/hilbert.hpp"
#include "vecproc/report.hpp"
#include "vecproc/rng.hpp"

namespace vecproc {

/// Covariance operator sum_j lambda_j b_j (x) b_j.
class CovarianceSpectrum {
 public:
  explicit CovarianceSpectrum(std::vector<double> eigenvalues, std::optional<OrthonormalBasis> basis = std::nullopt);

  /// lambda_j proportional to 2^{-j}, j = 1..modes, scaled to the given trace.
  static CovarianceSpectrum geometric(std::size_t modes, double trace = 1.0);
  static CovarianceSpectrum uniform(std::size_t modes, double trace = 1.0);
  static CovarianceSpectrum single(double trace = 1.0);

  std::size_t dim() const noexcept { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  const OrthonormalBasis& basis() const noexcept { return basis_; }
  double trace() const noexcept;
  double largest() const noexcept;
  /// <Phi y, y>
  double quadratic_form(const HPoint& y) const;

 private:
  std::vector<double> eigenvalues_;
  OrthonormalBasis basis_;
};

/// mean + sum_j sqrt(lambda_j) xi_j b_j with xi_j iid standard normal.
HPoint sample_gaussian(const HPoint& mean, const CovarianceSpectrum& spectrum, Rng& rng);
/// Writes a centred draw into out without allocating.
void sample_gaussian_into(const CovarianceSpectrum& spectrum, Rng& rng, std::span<double> out);

/// S_n = sum_i sigma_i c_i against b sqrt(2t), bound e^{-t}.
TailReport hoeffding_real_check(const std::vector<double>& c, const std::vector<double>& t_grid, std::size_t reps,
                                std::uint64_t seed);

/// Y_i = c_i sigma_i u_i with u_i uniform on the unit sphere of R^{d_Y};
/// ||S_n|| against 2 b sqrt(t), bound 2 e^{-t}.
TailReport hoeffding_hilbert_check(std::size_t dim_y, const std::vector<double>& c, const std::vector<double>& t_grid,
                                   std::size_t reps, std::uint64_t seed);

struct CoshRow {
  double lambda = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool inconclusive = false;
  bool ok = true;
};

struct CoshReport {
  std::vector<CoshRow> rows;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  bool all_ok() const;
};

/// Mean of cosh(lambda ||S_n||) against prod_i e^{lambda^2 c_i^2}; rows whose
/// relative SE exceeds 0.2 are flagged inconclusive rather than failed.
CoshReport cosh_moment_check(std::size_t dim_y, const std::vector<double>& c, const std::vector<double>& lambda_grid,
                             std::size_t reps, std::uint64_t seed);

struct MgfRow {
  double lambda = 0.0;
  double product = 0.0;
  double bound = 0.0;
  bool ok = true;
};

/// Exact prod_j (1 - 2 lambda lambda_j)^{-1/2} against (1 - 2 lambda Tr Phi)^{-1/2}.
std::vector<MgfRow> gaussian_mgf_check(const CovarianceSpectrum& spectrum, const std::vector<double>& lambda_grid);

/// ||Y|| for centred Y ~ N(0, Phi) against a, bound 2 e^{-3a^2 / (8 Tr Phi)}.
TailReport gaussian_tail_check(const CovarianceSpectrum& spectrum, const std::vector<double>& a_grid,
                               std::size_t reps, std::uint64_t seed);

}  // namespace vecproc
