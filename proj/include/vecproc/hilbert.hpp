#pragma once

// Coordinate arithmetic for the truncated Hilbert space Y = R^{d_Y}.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace vecproc {

/// Element of Y, stored as coordinates in a fixed orthonormal basis.
class HPoint {
 public:
  HPoint() = default;
  explicit HPoint(std::size_t dim) : coords_(dim, 0.0) {}
  HPoint(std::initializer_list<double> coords);
  /// Throws std::invalid_argument if any coordinate is NaN or infinite.
  explicit HPoint(std::vector<double> coords);
  explicit HPoint(std::span<const double> coords);

  static HPoint unit(std::size_t dim, std::size_t k);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t k) const { return coords_[k]; }
  double& operator[](std::size_t k) { return coords_[k]; }
  std::span<const double> coords() const noexcept { return coords_; }
  std::span<double> coords() noexcept { return coords_; }

  HPoint& operator+=(const HPoint& other);
  HPoint& operator-=(const HPoint& other);
  HPoint& operator*=(double s) noexcept;
  /// this += s * other
  HPoint& axpy(double s, const HPoint& other);

  friend HPoint operator+(HPoint a, const HPoint& b) { return a += b; }
  friend HPoint operator-(HPoint a, const HPoint& b) { return a -= b; }
  friend HPoint operator*(double s, HPoint a) noexcept { return a *= s; }
  friend HPoint operator-(HPoint a) noexcept { return a *= -1.0; }
  friend bool operator==(const HPoint&, const HPoint&) = default;

 private:
  std::vector<double> coords_;
};

double inner(const HPoint& u, const HPoint& v);
double inner(std::span<const double> u, std::span<const double> v);
double norm(const HPoint& u) noexcept;
double norm(std::span<const double> u) noexcept;
double distance(std::span<const double> u, std::span<const double> v);

/// Columns b_1..b_{d_Y} with <b_i, b_j> = delta_ij to within kOrthonormalTol.
class OrthonormalBasis {
 public:
  static constexpr double kOrthonormalTol = 1e-12;

  /// Throws std::invalid_argument if the columns are not orthonormal.
  explicit OrthonormalBasis(std::vector<HPoint> columns);

  static OrthonormalBasis identity(std::size_t dim);
  /// Modified Gram-Schmidt on linearly independent vectors.
  static OrthonormalBasis gram_schmidt(std::vector<HPoint> vectors);

  std::size_t dim() const noexcept { return columns_.size(); }
  const HPoint& operator[](std::size_t k) const { return columns_[k]; }
  std::span<const HPoint> columns() const noexcept { return columns_; }

 private:
  OrthonormalBasis() = default;
  std::vector<HPoint> columns_;
};

/// Coordinates (<u, b_1>, ..., <u, b_{d_Y}>).
HPoint change_basis(const HPoint& u, const OrthonormalBasis& basis);
/// Inverse of change_basis: sum_k c_k b_k.
HPoint from_basis(const HPoint& coords, const OrthonormalBasis& basis);

}  // namespace vecproc
